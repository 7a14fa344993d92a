//! Composite Simpson rules with Richardson refinement, in one to three dimensions.

use crate::error::{Error, Result};

const MAX_LEVELS: u32 = 22;

/// One cell `[a, b]`: Simpson on four subintervals extrapolated against two (Boole's rule).
pub fn simpson_richardson_cell(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / 4.0;
    let f0 = f(a);
    let f1 = f(a + h);
    let f2 = f(a + 2.0 * h);
    let f3 = f(a + 3.0 * h);
    let f4 = f(b);
    let s2 = (2.0 * h / 3.0) * (f0 + 4.0 * f2 + f4);
    let s4 = (h / 3.0) * (f0 + 4.0 * f1 + 2.0 * f2 + 4.0 * f3 + f4);
    s4 + (s4 - s2) / 15.0
}

/// Composite Simpson with `m` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let m = m + (m & 1);
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Doubles the Simpson panel count, extrapolating `(16 S_2m - S_m)/15`, until two successive
/// extrapolants differ by at most `tol * max(|I|, scale)`.
pub fn simpson_richardson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    scale: f64,
) -> Result<f64> {
    richardson_1d(|m| simpson(&f, a, b, m), tol, scale)
}

fn richardson_1d(rule: impl Fn(usize) -> f64, tol: f64, scale: f64) -> Result<f64> {
    let mut m = 8;
    let mut coarse = rule(m);
    let mut prev: Option<f64> = None;
    for _ in 0..MAX_LEVELS {
        m *= 2;
        let fine = rule(m);
        let r = fine + (fine - coarse) / 15.0;
        if let Some(p) = prev {
            if (r - p).abs() <= tol * r.abs().max(scale) {
                return Ok(r);
            }
        }
        prev = Some(r);
        coarse = fine;
    }
    Err(Error::Quadrature(format!(
        "no agreement to {tol:e} after {m} panels"
    )))
}

fn simpson_weights(m: usize) -> Vec<f64> {
    (0..=m)
        .map(|i| {
            if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect()
}

/// Tensor-product Simpson on `[a, b]^d` with `m` panels per axis.
pub fn simpson_box(f: &impl Fn(&[f64]) -> f64, dim: usize, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let w = simpson_weights(m);
    let x: Vec<f64> = (0..=m).map(|i| a + i as f64 * h).collect();
    let scale = (h / 3.0).powi(dim as i32);
    let mut s = 0.0;
    match dim {
        1 => {
            for i in 0..=m {
                s += w[i] * f(&[x[i]]);
            }
        }
        2 => {
            for i in 0..=m {
                let mut row = 0.0;
                for j in 0..=m {
                    row += w[j] * f(&[x[i], x[j]]);
                }
                s += w[i] * row;
            }
        }
        3 => {
            for i in 0..=m {
                let mut plane = 0.0;
                for j in 0..=m {
                    let mut row = 0.0;
                    for k in 0..=m {
                        row += w[k] * f(&[x[i], x[j], x[k]]);
                    }
                    plane += w[j] * row;
                }
                s += w[i] * plane;
            }
        }
        _ => return f64::NAN,
    }
    s * scale
}

/// Richardson-refined tensor Simpson; `max_panels` bounds the work in higher dimensions.
pub fn simpson_richardson_box(
    f: impl Fn(&[f64]) -> f64,
    dim: usize,
    a: f64,
    b: f64,
    tol: f64,
    scale: f64,
    max_panels: usize,
) -> Result<f64> {
    let mut m = 8;
    let mut coarse = simpson_box(&f, dim, a, b, m);
    let mut prev: Option<f64> = None;
    while m * 2 <= max_panels {
        m *= 2;
        let fine = simpson_box(&f, dim, a, b, m);
        let r = fine + (fine - coarse) / 15.0;
        if let Some(p) = prev {
            if (r - p).abs() <= tol * r.abs().max(scale) {
                return Ok(r);
            }
        }
        prev = Some(r);
        coarse = fine;
    }
    Err(Error::Quadrature(format!(
        "{dim}-d rule did not reach {tol:e} within {max_panels} panels"
    )))
}

/// Adaptive Simpson with Richardson correction on accepted panels.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Quadrature(format!(
                "adaptive Simpson hit depth limit on [{a}, {b}]"
            )));
        }
        Ok(rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&f, a, b, fa, fm, fb, whole, tol, 50)
}
