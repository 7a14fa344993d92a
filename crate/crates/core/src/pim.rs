//! Precise integration: `e^{H tau}` as identity plus a separately accumulated increment.

use nalgebra::{DMatrix, DVector};

use crate::cfd6::{norm_inf, Generator};
use crate::error::{Error, Result};
use crate::grid::Field;

pub const DEFAULT_BISECTION: u32 = 20;

/// `T(tau) = I + increment`. The identity is never added to the stored matrix.
#[derive(Clone, Debug)]
pub struct Propagator {
    increment: DMatrix<f64>,
    tau: f64,
    bisection_order: u32,
    fingerprint: u64,
    step_scale: f64,
}

/// `X + X^2/2 + X^3/6 + X^4/24` with `X = H dt`, nested as `X(I + X/2(I + X/3(I + X/4)))`.
pub fn taylor_increment(h_matrix: &DMatrix<f64>, dt: f64) -> Result<DMatrix<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let n = h_matrix.nrows();
    let x = h_matrix * dt;
    let eye = DMatrix::<f64>::identity(n, n);
    let mut inner = &eye + &x / 4.0;
    inner = &eye + (&x * &inner) / 3.0;
    inner = &eye + (&x * &inner) / 2.0;
    let t = &x * inner;
    check_finite(&t, "taylor increment")?;
    Ok(t)
}

/// `T_a <- 2 T_a + T_a T_a`, `n` times.
pub fn square_up(mut increment: DMatrix<f64>, n: u32) -> Result<DMatrix<f64>> {
    for round in 0..n {
        let sq = &increment * &increment;
        increment *= 2.0;
        increment += sq;
        if increment.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!(
                "increment overflowed in squaring round {}",
                round + 1
            )));
        }
    }
    Ok(increment)
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Overflow(format!("{what} has non-finite entries")))
    }
}

pub fn build_propagator(gen: &Generator, tau: f64, n: u32) -> Result<Propagator> {
    Propagator::from_matrix(&gen.h_matrix, tau, n)
}

pub fn apply(prop: &Propagator, field: &Field) -> Result<Field> {
    if field.grid().rank() != 1 {
        return Err(Error::Dimension(
            "apply takes a rank-1 field; use splitting::apply_axis".into(),
        ));
    }
    Field::new(field.grid().clone(), prop.apply(field.values())?)
}

impl Propagator {
    pub fn from_matrix(h_matrix: &DMatrix<f64>, tau: f64, n: u32) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        if !h_matrix.is_square() {
            return Err(Error::Dimension(format!(
                "generator is {:?}",
                h_matrix.shape()
            )));
        }
        let dt = tau / 2f64.powi(n as i32);
        let increment = square_up(taylor_increment(h_matrix, dt)?, n)?;
        Ok(Propagator {
            increment,
            tau,
            bisection_order: n,
            fingerprint: fingerprint(h_matrix, tau, n),
            step_scale: norm_inf(h_matrix) * dt,
        })
    }

    pub fn identity(n: usize, tau: f64) -> Self {
        Propagator::from_increment(DMatrix::zeros(n, n), tau, 0)
    }

    /// Wraps an increment built elsewhere (embedding, composition).
    pub fn from_increment(increment: DMatrix<f64>, tau: f64, bisection_order: u32) -> Self {
        let fingerprint = fingerprint(&increment, tau, bisection_order);
        Propagator {
            increment,
            tau,
            bisection_order,
            fingerprint,
            step_scale: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.increment.nrows()
    }

    pub fn increment(&self) -> &DMatrix<f64> {
        &self.increment
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn bisection_order(&self) -> u32 {
        self.bisection_order
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `||H||_inf * tau / 2^n`, the scale the Taylor increment was evaluated at.
    pub fn step_scale(&self) -> f64 {
        self.step_scale
    }

    pub(crate) fn set_step_scale(&mut self, s: f64) {
        self.step_scale = s;
    }

    /// `I + increment`, for diagnostics only.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        &self.increment + DMatrix::<f64>::identity(n, n)
    }

    /// `v + increment * v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "propagator is {0}x{0}, vector has {1}",
                self.dim(),
                v.len()
            )));
        }
        let x = DVector::from_column_slice(v);
        let y = &self.increment * &x + x;
        Ok(y.as_slice().to_vec())
    }

    /// `self` followed by `other`: `(I + B)(I + A) = I + A + B + B A`.
    pub fn then(&self, other: &Propagator) -> Result<Propagator> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(
                "composing propagators of different size".into(),
            ));
        }
        let inc = &self.increment + &other.increment + &other.increment * &self.increment;
        let mut p = Propagator::from_increment(inc, self.tau + other.tau, self.bisection_order);
        p.step_scale = self.step_scale.max(other.step_scale);
        Ok(p)
    }

    /// `T^k` by binary powering on increments.
    pub fn power(&self, k: u64) -> Result<Propagator> {
        let mut result: Option<Propagator> = None;
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.then(&base)?,
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.then(&base)?;
            }
        }
        let mut p = result.unwrap_or_else(|| Propagator::identity(self.dim(), 0.0));
        check_finite(&p.increment, "propagator power")?;
        p.step_scale = self.step_scale;
        p.bisection_order = self.bisection_order;
        Ok(p)
    }
}

/// FNV-1a over the matrix bits, `tau` and `n`.
fn fingerprint(m: &DMatrix<f64>, tau: f64, n: u32) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&(m.nrows() as u64).to_le_bytes());
    eat(&(m.ncols() as u64).to_le_bytes());
    for v in m.iter() {
        eat(&v.to_bits().to_le_bytes());
    }
    eat(&tau.to_bits().to_le_bytes());
    eat(&n.to_le_bytes());
    h
}
