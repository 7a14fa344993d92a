//! Truncated cosine series for the heat potential and the velocities it induces.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DMatrixView};
use serde::{Deserialize, Serialize};

use super::coeffs::{self, CoeffTable};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::hopfcole::PHI_FLOOR;

/// Where a reference value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    ClosedForm,
    Series,
    Quadrature,
}

impl OracleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::ClosedForm => "closed-form",
            OracleKind::Series => "series",
            OracleKind::Quadrature => "quadrature",
        }
    }
}

pub const DEFAULT_TRUNCATION: usize = 40;
/// Target for the largest retained coefficient on the outer shell, relative to the mean term.
pub const TAIL_TOLERANCE: f64 = 1e-15;

/// `phi(x, t) = sum C e^{-|k|^2 pi^2 omega t} prod cos(k_i pi x_i)` on the unit box.
#[derive(Clone, Debug)]
pub struct FourierOracle {
    pub omega: f64,
    pub coeffs: CoeffTable,
    pub kind: OracleKind,
}

impl FourierOracle {
    pub fn new(omega: f64, coeffs: CoeffTable, kind: OracleKind) -> Self {
        FourierOracle {
            omega,
            coeffs,
            kind,
        }
    }

    /// Builds with `m` terms per index, adding ten at a time until the outer shell is below
    /// `TAIL_TOLERANCE` of the constant term or `max_m` is reached.
    pub fn with_auto_truncation(
        omega: f64,
        m: usize,
        max_m: usize,
        build: impl Fn(usize) -> Result<CoeffTable>,
        kind: OracleKind,
    ) -> Result<Self> {
        let mut m = m;
        loop {
            let table = build(m)?;
            let head = table.values[0].abs();
            if table.shell_max(2) <= TAIL_TOLERANCE * head || m >= max_m {
                return Ok(FourierOracle::new(omega, table, kind));
            }
            m = (m + 10).min(max_m);
        }
    }

    pub fn bessel_1d(omega: f64) -> Result<Self> {
        Self::with_auto_truncation(
            omega,
            DEFAULT_TRUNCATION,
            400,
            |m| coeffs::coeffs_1d(omega, m),
            OracleKind::Series,
        )
    }

    pub fn bessel_2d(omega: f64) -> Result<Self> {
        Self::with_auto_truncation(
            omega,
            DEFAULT_TRUNCATION,
            300,
            |m| coeffs::coeffs_2d(omega, m),
            OracleKind::Series,
        )
    }

    pub fn hyper_3d(omega: f64) -> Result<Self> {
        Self::with_auto_truncation(
            omega,
            20,
            80,
            |m| coeffs::coeffs_3d(omega, m),
            OracleKind::Series,
        )
    }

    pub fn rank(&self) -> usize {
        self.coeffs.rank
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.m
    }

    /// Same oracle cut down to `m` terms per index.
    pub fn truncated(&self, m: usize) -> FourierOracle {
        let m = m.min(self.coeffs.m);
        let table =
            CoeffTable::from_fn(self.rank(), m, |i| Ok(self.coeffs.get(i))).expect("infallible");
        FourierOracle::new(self.omega, table, self.kind)
    }

    fn basis(&self, xs: &[f64], t: f64, derivative: bool) -> DMatrix<f64> {
        let m = self.coeffs.m;
        DMatrix::from_fn(xs.len(), m, |i, k| {
            let kp = k as f64 * PI;
            let decay = (-kp * kp * self.omega * t).exp();
            if derivative {
                -kp * (kp * xs[i]).sin() * decay
            } else {
                (kp * xs[i]).cos() * decay
            }
        })
    }

    /// Potential and its gradient on the tensor product of `points[k]` along axis `k`.
    fn contract(&self, points: &[Vec<f64>], t: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let rank = self.rank();
        let cos: Vec<_> = points.iter().map(|p| self.basis(p, t, false)).collect();
        let der: Vec<_> = points.iter().map(|p| self.basis(p, t, true)).collect();
        let run = |which: Option<usize>| {
            let mut data = self.coeffs.values.clone();
            let mut shape = vec![self.coeffs.m; rank];
            for k in 0..rank {
                let b = if which == Some(k) { &der[k] } else { &cos[k] };
                data = contract_axis(&data, &shape, k, b);
                shape[k] = b.nrows();
            }
            data
        };
        let phi = run(None);
        let grad = (0..rank).map(|k| run(Some(k))).collect();
        (phi, grad)
    }

    /// `(phi, grad phi)` at one point.
    pub fn phi_grad(&self, p: &[f64], t: f64) -> Result<(f64, Vec<f64>)> {
        self.check_point(p, t)?;
        let pts: Vec<Vec<f64>> = p.iter().map(|&x| vec![x]).collect();
        let (phi, grad) = self.contract(&pts, t);
        Ok((phi[0], grad.into_iter().map(|g| g[0]).collect()))
    }

    pub fn phi(&self, p: &[f64], t: f64) -> Result<f64> {
        Ok(self.phi_grad(p, t)?.0)
    }

    pub fn velocity(&self, p: &[f64], t: f64) -> Result<Vec<f64>> {
        let (phi, grad) = self.phi_grad(p, t)?;
        if !(phi >= PHI_FLOOR) {
            return Err(Error::SingularTransform {
                node: vec![],
                value: phi,
            });
        }
        Ok(grad.iter().map(|g| -2.0 * self.omega * g / phi).collect())
    }

    /// Potential and velocities at every node of `grid`.
    pub fn evaluate_grid(&self, grid: &Grid, t: f64) -> Result<(Field, Vec<Field>)> {
        if grid.rank() != self.rank() {
            return Err(Error::Dimension(format!(
                "oracle rank {} on grid rank {}",
                self.rank(),
                grid.rank()
            )));
        }
        self.check_point(&vec![0.0; self.rank()], t)?;
        let pts: Vec<Vec<f64>> = grid.axes().iter().map(|a| a.nodes()).collect();
        let (phi, grad) = self.contract(&pts, t);
        if let Some(i) = phi.iter().position(|&p| !(p >= PHI_FLOOR)) {
            return Err(Error::SingularTransform {
                node: grid.multi_index(i),
                value: phi[i],
            });
        }
        let vel = grad
            .iter()
            .map(|g| {
                let v = g
                    .iter()
                    .zip(&phi)
                    .map(|(g, p)| -2.0 * self.omega * g / p)
                    .collect();
                Field::new(grid.clone(), v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((Field::new(grid.clone(), phi)?, vel))
    }

    fn check_point(&self, p: &[f64], t: f64) -> Result<()> {
        if p.len() != self.rank() {
            return Err(Error::Dimension(format!(
                "point of rank {} for oracle of rank {}",
                p.len(),
                self.rank()
            )));
        }
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("time must be non-negative, got {t}")));
        }
        Ok(())
    }
}

pub fn series_solution(oracle: &FourierOracle, point: &[f64], t: f64) -> Result<Vec<f64>> {
    oracle.velocity(point, t)
}

/// Replaces dimension `axis` (length `shape[axis]`) of a row-major tensor by `b * (that index)`.
fn contract_axis(data: &[f64], shape: &[usize], axis: usize, b: &DMatrix<f64>) -> Vec<f64> {
    let len = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let out_len = b.nrows();
    let bt = b.transpose();
    let mut out = Vec::with_capacity(outer * out_len * inner);
    for o in 0..outer {
        let chunk = &data[o * len * inner..(o + 1) * len * inner];
        // column-major (inner x len) view of the row-major (len x inner) block
        let x = DMatrixView::from_slice(chunk, inner, len);
        let y = x * &bt;
        out.extend_from_slice(y.as_slice());
    }
    out
}
