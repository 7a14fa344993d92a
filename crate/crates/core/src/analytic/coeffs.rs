//! Cosine coefficients of the transformed initial potential.
//!
//! `B` is the plain integral of `phi0` against the cosine product over the unit box, so
//! `phi0 = sum A B cos(a pi x) ...` with `A_0 = 1`, `A_{k>0} = 2`. Mixed-parity entries are
//! stored as exact zeros.

use std::f64::consts::PI;

use serde::Serialize;

use super::quadrature;
use super::special::{bessel_i_scaled, chebyshev_power_coeffs, hyper_3f4, wallis};
use crate::error::{Error, Result};

/// Dense table over `[0, m)^rank` in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffTable {
    pub rank: usize,
    pub m: usize,
    pub values: Vec<f64>,
}

impl CoeffTable {
    pub fn from_fn(
        rank: usize,
        m: usize,
        mut f: impl FnMut(&[usize]) -> Result<f64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(m.pow(rank as u32));
        let mut idx = vec![0usize; rank];
        for flat in 0..m.pow(rank as u32) {
            let mut r = flat;
            for k in (0..rank).rev() {
                idx[k] = r % m;
                r /= m;
            }
            values.push(f(&idx)?);
        }
        Ok(CoeffTable { rank, m, values })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[idx.iter().fold(0, |acc, &i| acc * self.m + i)]
    }

    /// Largest magnitude among entries whose largest index is at least `m - width`.
    pub fn shell_max(&self, width: usize) -> f64 {
        let lo = self.m.saturating_sub(width);
        let mut best = 0.0f64;
        for (flat, v) in self.values.iter().enumerate() {
            let mut r = flat;
            let mut top = 0;
            for _ in 0..self.rank {
                top = top.max(r % self.m);
                r /= self.m;
            }
            if top >= lo {
                best = best.max(v.abs());
            }
        }
        best
    }
}

/// `A_0 = 1`, `A_k = 2`.
pub fn cosine_weight(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        2.0
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "omega must be positive, got {omega}"
        )))
    }
}

/// `z = 1/(2 omega pi)`: the exponent scale of `phi0` for the sine-family initial data.
pub fn potential_scale(omega: f64) -> f64 {
    1.0 / (2.0 * omega * PI)
}

/// `int_0^1 exp(-z (1 - cos pi x)) cos(a pi x) dx = e^{-z} I_a(z)`.
pub fn b_1d(omega: f64, alpha: usize) -> Result<f64> {
    check_omega(omega)?;
    bessel_i_scaled(alpha as u32, potential_scale(omega))
}

/// Same integral for `exp(-z (1 - cos pi x cos pi y))`: a product of two half-argument Bessel
/// values when `a + b` is even, zero otherwise.
pub fn b_2d(omega: f64, alpha: usize, beta: usize) -> Result<f64> {
    check_omega(omega)?;
    if (alpha + beta) % 2 == 1 {
        return Ok(0.0);
    }
    let w = 0.5 * potential_scale(omega);
    let s = ((alpha + beta) / 2) as u32;
    let d = (alpha.abs_diff(beta) / 2) as u32;
    Ok(bessel_i_scaled(s, w)? * bessel_i_scaled(d, w)?)
}

/// Same integral for `exp(-z (1 - cos pi x cos pi y cos pi z))`. Nonzero only when all three
/// indices share parity. The two largest indices `p >= q` enter through a 3F4 series, the
/// smallest through the power expansion of its Chebyshev polynomial.
pub fn b_3d(omega: f64, alpha: usize, beta: usize, gamma: usize) -> Result<f64> {
    check_omega(omega)?;
    if alpha % 2 != beta % 2 || beta % 2 != gamma % 2 {
        return Ok(0.0);
    }
    let z = potential_scale(omega);
    if z > 700.0 {
        return Err(Error::SpecialFunction(format!(
            "potential scale {z} overflows"
        )));
    }
    let mut s = [alpha, beta, gamma];
    s.sort_unstable_by(|a, b| b.cmp(a));
    let [p, q, r] = s;
    let mu = (p + q) / 2;
    let nu = (p - q) / 2;
    // (z/4)^p / (mu! nu!), interleaved to keep intermediates in range
    let mut pref = 1.0;
    for i in 1..=p {
        pref *= z / 4.0;
        if i <= mu {
            pref /= i as f64;
        }
        if i <= nu {
            pref /= i as f64;
        }
    }
    let x = 0.25 * z * z;
    let pf = p as f64;
    let mut sum = 0.0;
    for (j, c) in chebyshev_power_coeffs(r).iter().enumerate() {
        if *c == 0.0 || (p + j) % 2 == 1 {
            continue;
        }
        let jf = j as f64;
        let f = hyper_3f4(
            [(pf + 1.0) / 2.0, pf / 2.0 + 1.0, (pf + jf + 1.0) / 2.0],
            [
                mu as f64 + 1.0,
                nu as f64 + 1.0,
                pf + 1.0,
                (pf + jf) / 2.0 + 1.0,
            ],
            x,
        )?;
        sum += c * wallis(p + j) * f;
    }
    Ok((-z).exp() * pref * sum)
}

pub fn coeffs_1d(omega: f64, m: usize) -> Result<CoeffTable> {
    CoeffTable::from_fn(1, m, |i| Ok(cosine_weight(i[0]) * b_1d(omega, i[0])?))
}

pub fn coeffs_2d(omega: f64, m: usize) -> Result<CoeffTable> {
    CoeffTable::from_fn(2, m, |i| {
        Ok(cosine_weight(i[0]) * cosine_weight(i[1]) * b_2d(omega, i[0], i[1])?)
    })
}

pub fn coeffs_3d(omega: f64, m: usize) -> Result<CoeffTable> {
    let mut cache = std::collections::HashMap::new();
    CoeffTable::from_fn(3, m, |i| {
        let mut key = [i[0], i[1], i[2]];
        key.sort_unstable();
        let b = match cache.get(&key) {
            Some(b) => *b,
            None => {
                let b = b_3d(omega, key[0], key[1], key[2])?;
                cache.insert(key, b);
                b
            }
        };
        Ok(cosine_weight(i[0]) * cosine_weight(i[1]) * cosine_weight(i[2]) * b)
    })
}

/// Coefficients of an arbitrary potential on `[0, 1]` by Simpson-Richardson quadrature.
pub fn coeffs_quadrature_1d(phi0: impl Fn(f64) -> f64, m: usize, tol: f64) -> Result<CoeffTable> {
    let scale = quadrature::simpson_richardson(|x| phi0(x).abs(), 0.0, 1.0, 1e-10, 1e-300)?;
    CoeffTable::from_fn(1, m, |i| {
        let a = i[0] as f64 * PI;
        let b = quadrature::simpson_richardson(|x| phi0(x) * (a * x).cos(), 0.0, 1.0, tol, scale)?;
        Ok(cosine_weight(i[0]) * b)
    })
}
