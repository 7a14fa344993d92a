//! Modified Bessel functions of integer order, generalized hypergeometric series and the
//! small combinatorial helpers used by the coefficient formulas.

use crate::error::{Error, Result};

pub const BESSEL_MAX_ORDER: u32 = 200;
pub const BESSEL_MAX_ARG: f64 = 700.0;
const SERIES_LIMIT: f64 = 20.0;

fn check_bessel(n: u32, x: f64) -> Result<()> {
    if n > BESSEL_MAX_ORDER {
        return Err(Error::SpecialFunction(format!(
            "I_n order {n} exceeds {BESSEL_MAX_ORDER}"
        )));
    }
    if !(0.0..=BESSEL_MAX_ARG).contains(&x) {
        return Err(Error::SpecialFunction(format!(
            "I_n argument {x} outside [0, {BESSEL_MAX_ARG}]"
        )));
    }
    Ok(())
}

/// `I_n(x)`.
pub fn bessel_i(n: u32, x: f64) -> Result<f64> {
    check_bessel(n, x)?;
    if x <= SERIES_LIMIT {
        Ok(ascending_series(n, x))
    } else {
        Ok(miller_scaled(n, x) * x.exp())
    }
}

/// `e^{-x} I_n(x)`; stays finite where `I_n` alone would be huge.
pub fn bessel_i_scaled(n: u32, x: f64) -> Result<f64> {
    check_bessel(n, x)?;
    if x <= SERIES_LIMIT {
        Ok(ascending_series(n, x) * (-x).exp())
    } else {
        Ok(miller_scaled(n, x))
    }
}

fn ascending_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + n as f64));
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
    }
}

/// Downward recurrence `I_{k-1} = I_{k+1} + (2k/x) I_k`, normalized by `e^x = I_0 + 2 sum I_k`.
fn miller_scaled(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x.ceil());
    let start = (top + 40.0 + 12.0 * top.sqrt()) as u32;
    let mut above = 0.0;
    let mut cur = 1.0;
    let mut sum = 2.0;
    let mut result = if start == n { cur } else { 0.0 };
    for k in (1..=start).rev() {
        let below = above + (2.0 * k as f64 / x) * cur;
        above = cur;
        cur = below;
        if k - 1 == n {
            result = cur;
        }
        sum += if k == 1 { cur } else { 2.0 * cur };
        if cur > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            sum *= 1e-250;
            result *= 1e-250;
        }
    }
    result / sum
}

/// `pFq(top; bottom; z)` summed until a term drops below `1e-17` of the partial sum.
pub fn hyper_pfq(top: &[f64], bottom: &[f64], z: f64) -> Result<f64> {
    if let Some(b) = bottom.iter().find(|b| **b <= 0.0 && b.fract() == 0.0) {
        return Err(Error::SpecialFunction(format!(
            "bottom parameter {b} is a pole"
        )));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    for s in 0..100_000u32 {
        let sf = s as f64;
        let mut ratio = z / (sf + 1.0);
        for a in top {
            ratio *= a + sf;
        }
        for b in bottom {
            ratio /= b + sf;
        }
        term *= ratio;
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term == 0.0 || term.abs() < 1e-17 * (sum + comp).abs() {
            return Ok(sum + comp);
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::SpecialFunction(format!(
        "{}F{} series did not converge at z = {z}",
        top.len(),
        bottom.len()
    )))
}

pub fn hyper_3f4(top: [f64; 3], bottom: [f64; 4], z: f64) -> Result<f64> {
    hyper_pfq(&top, &bottom, z)
}

/// Power coefficients of the Chebyshev polynomial: `cos(g t) = sum_j c_j cos(t)^j`.
pub fn chebyshev_power_coeffs(gamma: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if gamma == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..gamma {
        let mut next = vec![0.0; cur.len() + 1];
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += 2.0 * c;
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Mean of `cos(t)^q` over `[0, pi]`: `(q-1)!!/q!!` for even `q`, zero for odd.
pub fn wallis(q: usize) -> f64 {
    if q % 2 == 1 {
        return 0.0;
    }
    let mut w = 1.0;
    let mut k = 2;
    while k <= q {
        w *= (k - 1) as f64 / k as f64;
        k += 2;
    }
    w
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}
