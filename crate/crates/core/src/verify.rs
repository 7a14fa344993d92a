//! Structural checks: generator spectra, propagator spectral radius, irrotationality.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cfd6::{norm_inf, Generator, GeneratorKind};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::pim::{Propagator, DEFAULT_BISECTION};

pub const MAX_EIGEN_N: usize = 512;
/// Eigenvalue tolerance relative to `||H||_inf`.
pub const EIG_REL_TOL: f64 = 1e-8;
pub const RHO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub kind: GeneratorKind,
    pub n: usize,
    pub omega: f64,
    pub tau: f64,
    pub norm_inf: f64,
    pub max_real_eig: f64,
    pub max_imag_eig: f64,
    pub min_real_eig: f64,
    pub spectral_radius_t: f64,
    /// Imaginary parts within tolerance; required to pass only for periodic generators.
    pub real_spectrum: bool,
    pub passed: bool,
}

fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<nalgebra::Complex<f64>>> {
    if m.nrows() > MAX_EIGEN_N {
        return Err(Error::Size(format!(
            "dense eigensolve limited to n <= {MAX_EIGEN_N}, got {}",
            m.nrows()
        )));
    }
    let ev = m.clone().complex_eigenvalues();
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("eigenvalues did not converge".into()));
    }
    Ok(ev.iter().copied().collect())
}

pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Largest eigenvalue modulus of `I + increment`.
pub fn propagator_spectral_radius(p: &Propagator) -> Result<f64> {
    spectral_radius(&p.dense())
}

/// Eigenvalues of `H` and the spectral radius of `e^{H tau}` built by precise integration.
/// Realness is part of the verdict for periodic generators only.
pub fn check_generator_spectrum(gen: &Generator, tau: f64) -> Result<StabilityReport> {
    let ev = eigenvalues(&gen.h_matrix)?;
    let norm = norm_inf(&gen.h_matrix);
    let tol = EIG_REL_TOL * norm;
    let max_real = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let min_real = ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let max_imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let prop = Propagator::from_matrix(&gen.h_matrix, tau, DEFAULT_BISECTION)?;
    let rho = propagator_spectral_radius(&prop)?;
    let real_spectrum = max_imag <= tol;
    let mut passed = max_real <= tol && rho <= 1.0 + RHO_TOL;
    if gen.kind == GeneratorKind::Periodic {
        passed &= real_spectrum;
    }
    Ok(StabilityReport {
        kind: gen.kind,
        n: gen.n(),
        omega: gen.omega,
        tau,
        norm_inf: norm,
        max_real_eig: max_real,
        max_imag_eig: max_imag,
        min_real_eig: min_real,
        spectral_radius_t: rho,
        real_spectrum,
        passed,
    })
}

/// All eigenvalues of `H`, sorted by real part.
pub fn generator_eigenvalues(gen: &Generator) -> Result<Vec<(f64, f64)>> {
    let mut ev: Vec<(f64, f64)> = eigenvalues(&gen.h_matrix)?
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(ev)
}

/// Largest `|du_j/dx_i - du_i/dx_j|` over interior nodes, by centred differences.
pub fn check_curl(fields: &[Field]) -> Result<f64> {
    let rank = fields.len();
    if rank < 2 {
        return Err(Error::Dimension(
            "curl needs at least two velocity components".into(),
        ));
    }
    let grid = fields[0].grid();
    if grid.rank() != rank || fields.iter().any(|f| f.grid() != grid) {
        return Err(Error::Dimension(
            "one component per axis on a common grid".into(),
        ));
    }
    let shape = grid.shape();
    let mut worst = 0.0f64;
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        if idx.iter().zip(&shape).any(|(&i, &n)| i == 0 || i + 1 == n) {
            continue;
        }
        let d = |f: &Field, axis: usize| {
            let s = grid.stride(axis);
            (f.values()[flat + s] - f.values()[flat - s]) / (2.0 * grid.axis(axis).h)
        };
        for i in 0..rank {
            for j in i + 1..rank {
                worst = worst.max((d(&fields[j], i) - d(&fields[i], j)).abs());
            }
        }
    }
    Ok(worst)
}
