//! Sixth-order compact second-derivative operator `A f'' = B f` and the heat generator
//! `H = omega * A^-1 B`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::banded::{CyclicTridiagonal, Tridiagonal};
use crate::error::{Error, Result};
use crate::grid::MIN_NODES;

pub const INTERIOR_A: f64 = 2.0 / 11.0;
pub const INTERIOR_B: [f64; 5] = [
    3.0 / 44.0,
    12.0 / 11.0,
    -51.0 / 22.0,
    12.0 / 11.0,
    3.0 / 44.0,
];

/// Off-diagonal of the first-row left-hand closure.
pub const ROW1_A: f64 = 126.0 / 11.0;
/// Right-hand closure of the first row without its leading entry.
pub const ROW1_B_TAIL: [f64; 6] = [
    -2943.0 / 110.0,
    573.0 / 44.0,
    167.0 / 99.0,
    -18.0 / 11.0,
    57.0 / 110.0,
    -131.0 / 1980.0,
];
/// Leading first-row coefficient as published; leaves a row sum of 1/155430.
pub const ROW1_LEAD_PRINTED: f64 = 2077.0 / 157.0;
/// Leading first-row coefficient from Taylor matching; annihilates constants exactly.
pub const ROW1_LEAD_DERIVED: f64 = 13097.0 / 990.0;

pub const ROW2_A: f64 = 11.0 / 128.0;
pub const ROW2_B: [f64; 7] = [
    585.0 / 512.0,
    -141.0 / 64.0,
    459.0 / 512.0,
    9.0 / 32.0,
    -81.0 / 512.0,
    3.0 / 64.0,
    -3.0 / 512.0,
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClosureCoefficient {
    #[default]
    Derived,
    Printed,
}

impl ClosureCoefficient {
    pub fn value(self) -> f64 {
        match self {
            ClosureCoefficient::Derived => ROW1_LEAD_DERIVED,
            ClosureCoefficient::Printed => ROW1_LEAD_PRINTED,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Closure,
    Periodic,
}

/// Which leading coefficient a closure operator was built with, next to the published one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureMeta {
    pub row1_lead: f64,
    pub row1_lead_printed: f64,
    pub choice: ClosureCoefficient,
}

#[derive(Clone, Debug)]
pub struct CompactOperator {
    pub a_matrix: DMatrix<f64>,
    /// Already divided by h^2.
    pub b_matrix: DMatrix<f64>,
    pub h: f64,
    pub boundary_kind: BoundaryKind,
    pub closure: Option<ClosureMeta>,
}

impl CompactOperator {
    pub fn from_matrices(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        h: f64,
        kind: BoundaryKind,
    ) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::Dimension(format!(
                "A is {:?}, B is {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(CompactOperator {
            a_matrix: a,
            b_matrix: b,
            h,
            boundary_kind: kind,
            closure: None,
        })
    }

    pub fn n(&self) -> usize {
        self.a_matrix.nrows()
    }
}

pub fn assemble_closure(n: usize, h: f64) -> Result<CompactOperator> {
    assemble_closure_with(n, h, ClosureCoefficient::Derived)
}

pub fn assemble_closure_with(
    n: usize,
    h: f64,
    coefficient: ClosureCoefficient,
) -> Result<CompactOperator> {
    if n < MIN_NODES {
        return Err(Error::Size(format!(
            "closure operator needs n >= {MIN_NODES}, got {n}"
        )));
    }
    check_spacing(h)?;
    let inv_h2 = 1.0 / (h * h);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for i in 2..n - 2 {
        a[(i, i - 1)] = INTERIOR_A;
        a[(i, i)] = 1.0;
        a[(i, i + 1)] = INTERIOR_A;
        for (o, c) in INTERIOR_B.iter().enumerate() {
            b[(i, i + o - 2)] = c * inv_h2;
        }
    }
    let mut row1 = [0.0; 7];
    row1[0] = coefficient.value();
    row1[1..].copy_from_slice(&ROW1_B_TAIL);
    // first two rows and their mirror images at the far end
    for (i, mirror) in [(0, n - 1), (1, n - 2)] {
        let (coeffs, off) = if i == 0 {
            (row1, ROW1_A)
        } else {
            (ROW2_B, ROW2_A)
        };
        a[(i, i)] = 1.0;
        a[(mirror, mirror)] = 1.0;
        if i == 0 {
            a[(0, 1)] = off;
            a[(n - 1, n - 2)] = off;
        } else {
            a[(1, 0)] = off;
            a[(1, 2)] = off;
            a[(n - 2, n - 1)] = off;
            a[(n - 2, n - 3)] = off;
        }
        for (j, c) in coeffs.iter().enumerate() {
            b[(i, j)] = c * inv_h2;
            b[(mirror, n - 1 - j)] = c * inv_h2;
        }
    }
    Ok(CompactOperator {
        a_matrix: a,
        b_matrix: b,
        h,
        boundary_kind: BoundaryKind::Closure,
        closure: Some(ClosureMeta {
            row1_lead: coefficient.value(),
            row1_lead_printed: ROW1_LEAD_PRINTED,
            choice: coefficient,
        }),
    })
}

pub fn assemble_periodic(n: usize, h: f64) -> Result<CompactOperator> {
    if n < 6 {
        return Err(Error::Size(format!(
            "periodic operator needs n >= 6, got {n}"
        )));
    }
    check_spacing(h)?;
    Ok(circulant(n, h))
}

/// The wrapped interior stencil for any `n >= 3`; entries that alias onto the same node add up.
pub fn circulant(n: usize, h: f64) -> CompactOperator {
    let inv_h2 = 1.0 / (h * h);
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] += 1.0;
        a[(i, (i + 1) % n)] += INTERIOR_A;
        a[(i, (i + n - 1) % n)] += INTERIOR_A;
        for (o, c) in INTERIOR_B.iter().enumerate() {
            b[(i, (i + n + o - 2) % n)] += c * inv_h2;
        }
    }
    CompactOperator {
        a_matrix: a,
        b_matrix: b,
        h,
        boundary_kind: BoundaryKind::Periodic,
        closure: None,
    }
}

fn check_spacing(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("spacing must be positive, got {h}")))
    }
}

/// Where a generator came from; folded and interior generators act on wall-bounded axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Closure,
    Periodic,
    /// Periodic operator on the mirrored axis folded back with even symmetry (zero slope at walls).
    ReflectEven,
    /// Odd fold restricted to interior nodes (zero value at walls).
    ReflectOdd,
    /// Closure operator restricted to interior nodes.
    ClosureInterior,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub h_matrix: DMatrix<f64>,
    pub omega: f64,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn n(&self) -> usize {
        self.h_matrix.nrows()
    }

    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.h_matrix)
    }
}

pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
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

/// `omega * A^-1 B`, one column at a time.
pub fn form_generator(op: &CompactOperator, omega: f64) -> Result<Generator> {
    check_omega(omega)?;
    let n = op.n();
    let mut h = op.b_matrix.clone();
    match op.boundary_kind {
        BoundaryKind::Closure => match Tridiagonal::from_dense(&op.a_matrix) {
            Ok(lu) => {
                for mut col in h.column_iter_mut() {
                    lu.solve_in_place(col.as_mut_slice());
                }
            }
            // the boundary rows can leave a vanishing pivot; partial pivoting copes
            Err(_) => h = dense_solve(&op.a_matrix, &op.b_matrix)?,
        },
        BoundaryKind::Periodic => {
            if let Some(cyc) = cyclic_structure(&op.a_matrix) {
                let lu = CyclicTridiagonal::factor(n, cyc.0, cyc.1)?;
                for mut col in h.column_iter_mut() {
                    lu.solve_in_place(col.as_mut_slice());
                }
            } else {
                h = dense_solve(&op.a_matrix, &op.b_matrix)?;
            }
        }
    }
    h *= omega;
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization(
            "generator has non-finite entries".into(),
        ));
    }
    let kind = match op.boundary_kind {
        BoundaryKind::Closure => GeneratorKind::Closure,
        BoundaryKind::Periodic => GeneratorKind::Periodic,
    };
    Ok(Generator {
        h_matrix: h,
        omega,
        kind,
    })
}

fn dense_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Factorization("left-hand matrix is singular".into()))
}

fn cyclic_structure(a: &DMatrix<f64>) -> Option<(f64, f64)> {
    let n = a.nrows();
    if n < 5 {
        return None;
    }
    let d = a[(0, 0)];
    let e = a[(0, 1)];
    for i in 0..n {
        for j in 0..n {
            let dist = (i + n - j) % n;
            let want = match dist {
                0 => d,
                1 => e,
                x if x == n - 1 => e,
                _ => 0.0,
            };
            if a[(i, j)] != want {
                return None;
            }
        }
    }
    Some((d, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Folds the periodic generator on the mirrored axis of `2(n-1)` points back onto `n` nodes.
/// Even parity gives an `n x n` operator for fields with zero wall slope; odd parity gives the
/// `(n-2) x (n-2)` interior operator for fields that vanish on both walls.
pub fn reflect_generator(n: usize, h: f64, omega: f64, parity: Parity) -> Result<Generator> {
    if n < MIN_NODES {
        return Err(Error::Size(format!(
            "reflected operator needs n >= {MIN_NODES}, got {n}"
        )));
    }
    let m = 2 * (n - 1);
    let periodic = form_generator(&assemble_periodic(m, h)?, omega)?;
    let hp = &periodic.h_matrix;
    let mut folded = DMatrix::zeros(n, n);
    for j in 0..m {
        let (k, sign) = if j < n {
            (j, 1.0)
        } else {
            (m - j, if parity == Parity::Even { 1.0 } else { -1.0 })
        };
        for i in 0..n {
            folded[(i, k)] += sign * hp[(i, j)];
        }
    }
    Ok(match parity {
        Parity::Even => Generator {
            h_matrix: folded,
            omega,
            kind: GeneratorKind::ReflectEven,
        },
        Parity::Odd => Generator {
            h_matrix: folded.view((1, 1), (n - 2, n - 2)).into_owned(),
            omega,
            kind: GeneratorKind::ReflectOdd,
        },
    })
}

/// Closure generator with the two wall rows and columns removed.
pub fn closure_interior_generator(
    n: usize,
    h: f64,
    omega: f64,
    coefficient: ClosureCoefficient,
) -> Result<Generator> {
    let full = form_generator(&assemble_closure_with(n, h, coefficient)?, omega)?;
    Ok(Generator {
        h_matrix: full.h_matrix.view((1, 1), (n - 2, n - 2)).into_owned(),
        omega,
        kind: GeneratorKind::ClosureInterior,
    })
}

/// Row-major text dump: a `# rows cols` header, then one line per row at full precision.
pub fn write_matrix<W: Write>(mut w: W, m: &DMatrix<f64>) -> Result<()> {
    writeln!(w, "# {} {}", m.nrows(), m.ncols())?;
    for r in m.row_iter() {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<DMatrix<f64>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty matrix dump".into()))??;
    let dims: Vec<usize> = header
        .trim_start_matches('#')
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("bad matrix header {header:?}")))
        })
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Config(format!("bad matrix header {header:?}")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for line in lines.take(rows) {
        for tok in line?.split_whitespace() {
            data.push(
                tok.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad matrix entry {tok:?}")))?,
            );
        }
    }
    if data.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "matrix dump has {} entries, header says {rows}x{cols}",
            data.len()
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}
