//! Reference computations shared by the integration tests. None of these reuse the library's
//! own solvers: exponentials come from Taylor scaling-and-squaring, symmetric eigensystems or
//! the discrete Fourier diagonalization; series use exact rationals; integrals use Romberg.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn rel_inf(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    norm_inf(&(a - reference)) / norm_inf(reference)
}

/// `exp(m)` by scaling to norm <= 1/2, a degree-24 Taylor sum accumulated with Neumaier
/// compensation, then squaring back.
pub fn expm_ref(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = norm_inf(m);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m / 2f64.powi(s);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut comp = DMatrix::<f64>::zeros(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..=24 {
        term = &term * &a / k as f64;
        for (i, t) in term.iter().enumerate() {
            let s0 = sum[i];
            let s1 = s0 + t;
            comp[i] += if s0.abs() >= t.abs() {
                (s0 - s1) + t
            } else {
                (t - s1) + s0
            };
            sum[i] = s1;
        }
    }
    let mut e = sum + comp;
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

/// `exp(m)` for symmetric `m` through its eigensystem.
pub fn expm_sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::exp));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Eigenvalue of the periodic compact second-derivative generator for wavenumber `k` on `n`
/// points, from its stencil symbols.
pub fn periodic_symbol(n: usize, k: usize, h: f64, omega: f64) -> f64 {
    let t = 2.0 * PI * k as f64 / n as f64;
    let b = -51.0 / 22.0 + 2.0 * (12.0 / 11.0) * t.cos() + 2.0 * (3.0 / 44.0) * (2.0 * t).cos();
    let a = 1.0 + 2.0 * (2.0 / 11.0) * t.cos();
    omega * b / (a * h * h)
}

/// `exp(tau H)` for the periodic generator, by Fourier diagonalization.
pub fn periodic_exp(n: usize, h: f64, omega: f64, tau: f64) -> DMatrix<f64> {
    let lam: Vec<f64> = (0..n)
        .map(|k| (tau * periodic_symbol(n, k, h, omega)).exp())
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let d = (i + n - j) % n;
        lam.iter()
            .enumerate()
            .map(|(k, e)| e * (2.0 * PI * (k * d) as f64 / n as f64).cos())
            .sum::<f64>()
            / n as f64
    })
}

/// Symmetric negative semidefinite matrix with spectrum in `[-scale, 0]`, one exact zero.
pub fn random_nsd(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    let mut d: Vec<f64> = (0..n).map(|_| -scale * rng.gen::<f64>()).collect();
    d[0] = 0.0;
    let h = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * q.transpose();
    (&h + h.transpose()) * 0.5
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Exact rational from a float (every finite double is a dyadic rational).
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `I_n(x)` from its ascending series in exact arithmetic.
pub fn bessel_i_exact(n: u32, x: f64, terms: usize) -> f64 {
    let half = rational(x) / rat(2, 1);
    let half_sq = &half * &half;
    let mut term = BigRational::one();
    for i in 1..=n {
        term = term * &half / rat(i as i64, 1);
    }
    let mut sum = BigRational::zero();
    for k in 0..terms {
        sum += &term;
        term = term * &half_sq / rat(((k + 1) * (k + 1 + n as usize)) as i64, 1);
    }
    sum.to_f64().unwrap()
}

/// Generalized hypergeometric partial sum with rational parameters `num/den`.
pub fn pfq_exact(top: &[(i64, i64)], bottom: &[(i64, i64)], z: f64, terms: usize) -> f64 {
    let z = rational(z);
    let top: Vec<BigRational> = top.iter().map(|&(p, q)| rat(p, q)).collect();
    let bottom: Vec<BigRational> = bottom.iter().map(|&(p, q)| rat(p, q)).collect();
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for k in 0..terms {
        sum += &term;
        let kk = rat(k as i64, 1);
        for a in &top {
            term *= a + &kk;
        }
        for b in &bottom {
            term /= b + &kk;
        }
        term = term * &z / rat(k as i64 + 1, 1);
    }
    sum.to_f64().unwrap()
}

/// Romberg table on `[a, b]` starting from one panel, stopping when successive
/// diagonal entries agree to `tol` (absolute) or `max_level` is reached.
pub fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_level: u32) -> f64 {
    let mut rows: Vec<Vec<f64>> = vec![vec![0.5 * (b - a) * (f(a) + f(b))]];
    for level in 1..=max_level {
        let panels = 1usize << level;
        let h = (b - a) / panels as f64;
        let mid: f64 = (0..panels / 2).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * rows[level as usize - 1][0] + h * mid];
        for j in 1..=level as usize {
            let p = 4f64.powi(j as i32);
            let prev = &rows[level as usize - 1];
            row.push(row[j - 1] + (row[j - 1] - prev[j - 1]) / (p - 1.0));
        }
        let done = level >= 4
            && (row[level as usize] - rows[level as usize - 1][level as usize - 1]).abs() <= tol;
        rows.push(row);
        if done {
            break;
        }
    }
    *rows.last().unwrap().last().unwrap()
}

/// Composite trapezoid weights on `[0, 1]` with `panels` panels.
fn trapezoid(panels: usize) -> (Vec<f64>, Vec<f64>) {
    let h = 1.0 / panels as f64;
    let x: Vec<f64> = (0..=panels).map(|i| i as f64 * h).collect();
    let w: Vec<f64> = (0..=panels)
        .map(|i| if i == 0 || i == panels { 0.5 * h } else { h })
        .collect();
    (x, w)
}

/// `int_{[0,1]^d} g(x) prod_k cos(idx_k pi x_k) dx` for every index tuple in `[0, m)^d`,
/// returned in row-major order, from tensor trapezoid rules on `2^(level-1)` and `2^level`
/// panels combined by one Richardson step. Also returns the largest gap between the two levels.
pub fn cosine_moments(
    g: impl Fn(&[f64]) -> f64,
    dim: usize,
    m: usize,
    level: u32,
) -> (Vec<f64>, f64) {
    let mut estimates: Vec<Vec<f64>> = Vec::new();
    for lv in [level - 1, level] {
        let panels = 1usize << lv;
        let (x, w) = trapezoid(panels);
        let np = panels + 1;
        let cosines: Vec<Vec<f64>> = (0..m)
            .map(|a| x.iter().map(|xi| (a as f64 * PI * xi).cos()).collect())
            .collect();
        // weighted samples, then contract one axis at a time against the cosine table
        let total = np.pow(dim as u32);
        let mut vals = vec![0.0; total];
        let mut p = vec![0.0; dim];
        for (flat, v) in vals.iter_mut().enumerate() {
            let mut r = flat;
            let mut wt = 1.0;
            for k in (0..dim).rev() {
                let i = r % np;
                r /= np;
                p[k] = x[i];
                wt *= w[i];
            }
            *v = wt * g(&p);
        }
        let mut shape = vec![np; dim];
        for axis in 0..dim {
            let outer: usize = shape[..axis].iter().product();
            let inner: usize = shape[axis + 1..].iter().product();
            let mut next = vec![0.0; outer * m * inner];
            for o in 0..outer {
                for a in 0..m {
                    for i in 0..inner {
                        let mut s = 0.0;
                        for (j, c) in cosines[a].iter().enumerate() {
                            s += c * vals[(o * np + j) * inner + i];
                        }
                        next[(o * m + a) * inner + i] = s;
                    }
                }
            }
            vals = next;
            shape[axis] = m;
        }
        estimates.push(vals);
    }
    // one Richardson step (Simpson) on the two finest levels; their gap bounds the error
    let fine = estimates.pop().unwrap();
    let coarse = estimates.pop().unwrap();
    let gap = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| (f - c).abs())
        .fold(0.0, f64::max);
    let value = fine
        .iter()
        .zip(&coarse)
        .map(|(f, c)| f + (f - c) / 3.0)
        .collect();
    (value, gap)
}
