//! Tridiagonal and cyclic tridiagonal factorizations for the compact left-hand matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;

/// LU factors of a tridiagonal matrix (no pivoting). Pivots smaller than `PIVOT_TOL` times the
/// original diagonal are rejected so callers can fall back to a pivoted solve.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiagonal {
    /// `lower[i]` sits at (i+1, i), `upper[i]` at (i, i+1).
    pub fn factor(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::Dimension("tridiagonal band lengths".into()));
        }
        let mut d = diag.to_vec();
        let mut l = lower.to_vec();
        let tiny = |i: usize, v: f64| {
            !v.is_finite() || v.abs() <= PIVOT_TOL * diag[i].abs().max(f64::MIN_POSITIVE)
        };
        for i in 1..n {
            if tiny(i - 1, d[i - 1]) {
                return Err(Error::Factorization(format!("zero pivot at row {}", i - 1)));
            }
            l[i - 1] /= d[i - 1];
            d[i] -= l[i - 1] * upper[i - 1];
        }
        if tiny(n - 1, d[n - 1]) {
            return Err(Error::Factorization(format!("zero pivot at row {}", n - 1)));
        }
        Ok(Tridiagonal {
            lower: l,
            diag: d,
            upper: upper.to_vec(),
        })
    }

    /// Reads the three bands of `a`; fails if anything lies outside them.
    pub fn from_dense(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        for j in 0..n {
            for i in 0..n {
                if i.abs_diff(j) > 1 && a[(i, j)] != 0.0 {
                    return Err(Error::Factorization(format!(
                        "entry ({i},{j}) outside the tridiagonal band"
                    )));
                }
            }
        }
        let lower: Vec<f64> = (0..n - 1).map(|i| a[(i + 1, i)]).collect();
        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        let upper: Vec<f64> = (0..n - 1).map(|i| a[(i, i + 1)]).collect();
        Tridiagonal::factor(&lower, &diag, &upper)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.diag.len();
        for i in 1..n {
            x[i] -= self.lower[i - 1] * x[i - 1];
        }
        x[n - 1] /= self.diag[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1]) / self.diag[i];
        }
    }
}

/// Symmetric circulant tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (corners included), solved by Sherman-Morrison on top of a plain tridiagonal solve.
#[derive(Clone, Debug)]
pub struct CyclicTridiagonal {
    inner: Tridiagonal,
    corr: Vec<f64>,
    gamma: f64,
    e: f64,
}

impl CyclicTridiagonal {
    pub fn factor(n: usize, d: f64, e: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Size(format!("cyclic system needs n >= 3, got {n}")));
        }
        let gamma = -d;
        let mut diag = vec![d; n];
        diag[0] = d - gamma;
        diag[n - 1] = d - e * e / gamma;
        let inner = Tridiagonal::factor(&vec![e; n - 1], &diag, &vec![e; n - 1])?;
        let mut corr = vec![0.0; n];
        corr[0] = gamma;
        corr[n - 1] = e;
        inner.solve_in_place(&mut corr);
        Ok(CyclicTridiagonal {
            inner,
            corr,
            gamma,
            e,
        })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = x.len();
        self.inner.solve_in_place(x);
        let v0 = 1.0;
        let vn = self.e / self.gamma;
        let num = v0 * x[0] + vn * x[n - 1];
        let den = 1.0 + v0 * self.corr[0] + vn * self.corr[n - 1];
        let f = num / den;
        for (xi, ci) in x.iter_mut().zip(&self.corr) {
            *xi -= f * ci;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense() {
        let n = 9;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 1.0;
            if i > 0 {
                a[(i, i - 1)] = 2.0 / 11.0;
            }
            if i + 1 < n {
                a[(i, i + 1)] = 2.0 / 11.0;
            }
        }
        a[(0, 1)] = 126.0 / 11.0;
        a[(1, 0)] = 11.0 / 128.0;
        let t = Tridiagonal::from_dense(&a).unwrap();
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = rhs.clone();
        t.solve_in_place(&mut x);
        let r = &a * nalgebra::DVector::from_vec(x);
        for i in 0..n {
            assert!((r[i] - rhs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn cyclic_matches_dense() {
        let n = 12;
        let (d, e) = (1.0, 2.0 / 11.0);
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = d;
            a[(i, (i + 1) % n)] = e;
            a[(i, (i + n - 1) % n)] = e;
        }
        let c = CyclicTridiagonal::factor(n, d, e).unwrap();
        let rhs: Vec<f64> = (0..n)
            .map(|i| (0.3 * i as f64).cos() + 0.1 * i as f64)
            .collect();
        let mut x = rhs.clone();
        c.solve_in_place(&mut x);
        let r = &a * nalgebra::DVector::from_vec(x);
        for i in 0..n {
            assert!((r[i] - rhs[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_band() {
        let mut a = DMatrix::<f64>::identity(5, 5);
        a[(0, 3)] = 1.0;
        assert!(Tridiagonal::from_dense(&a).is_err());
    }
}
