//! Uniform tensor grids, sampled fields and error norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary closures reach seven nodes in from each end.
pub const MIN_NODES: usize = 8;

/// One node-inclusive axis `a = x_0 < ... < x_{n-1} = b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub h: f64,
}

impl Axis {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::Size(format!(
                "axis needs at least {MIN_NODES} nodes, got {n}"
            )));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Domain(format!(
                "axis endpoints [{a}, {b}] are not an interval"
            )));
        }
        Ok(Axis {
            a,
            b,
            n,
            h: (b - a) / (n - 1) as f64,
        })
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Halves the spacing: n -> 2n - 1 with the same endpoints.
    pub fn refine(&self) -> Axis {
        let n = 2 * self.n - 1;
        Axis {
            a: self.a,
            b: self.b,
            n,
            h: (self.b - self.a) / (n - 1) as f64,
        }
    }

    /// Index of the node closest to `x`, if it lies on the grid to within `1e-9 h`.
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let s = (x - self.a) / self.h;
        let i = s.round();
        if i < 0.0 || i as usize >= self.n || (s - i).abs() > 1e-9 {
            return None;
        }
        Some(i as usize)
    }
}

/// Rank 1..=3 tensor product of axes. Storage is row-major: the last axis is contiguous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::Dimension(format!(
                "grid rank must be 1..=3, got {}",
                axes.len()
            )));
        }
        Ok(Grid { axes })
    }

    /// Same axis `[a, b]` with `n` nodes repeated `rank` times.
    pub fn cube(rank: usize, a: f64, b: f64, n: usize) -> Result<Self> {
        let axis = Axis::new(a, b, n)?;
        Grid::new(vec![axis; rank])
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, k: usize) -> usize {
        self.axes[k + 1..].iter().map(|a| a.n).product()
    }

    /// Product of the axis spacings.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.h).product()
    }

    pub fn refine(&self) -> Grid {
        Grid {
            axes: self.axes.iter().map(Axis::refine).collect(),
        }
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank()];
        for k in (0..self.rank()).rev() {
            let n = self.axes[k].n;
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, ax)| acc * ax.n + i)
    }

    /// Coordinates of the node with flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, ax)| ax.coord(i))
            .collect()
    }

    /// Flat index of a grid node given by coordinates, if every coordinate is a node.
    pub fn locate(&self, p: &[f64]) -> Option<usize> {
        if p.len() != self.rank() {
            return None;
        }
        let idx: Option<Vec<usize>> = p
            .iter()
            .zip(&self.axes)
            .map(|(&x, ax)| ax.node_at(x))
            .collect();
        idx.map(|i| self.flat_index(&i))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "field has {} values, grid {:?} needs {}",
                values.len(),
                grid.shape(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!(
                "field entry {:?} is {}",
                grid.multi_index(i),
                values[i]
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.flat_index(idx)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }
}

/// How the discrete L2 norm is weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum L2Convention {
    /// sqrt(prod(h) * sum e^2)
    #[default]
    Weighted,
    /// sqrt(mean e^2)
    Rms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub l2: f64,
    pub linf: f64,
    pub n: Vec<usize>,
    pub h: Vec<f64>,
}

pub fn error_norms(numeric: &Field, reference: &Field) -> Result<ErrorReport> {
    error_norms_with(numeric, reference, L2Convention::Weighted)
}

pub fn error_norms_with(
    numeric: &Field,
    reference: &Field,
    convention: L2Convention,
) -> Result<ErrorReport> {
    if numeric.grid != reference.grid {
        return Err(Error::Dimension(format!(
            "error norms need matching grids, got {:?} and {:?}",
            numeric.grid.shape(),
            reference.grid.shape()
        )));
    }
    let mut linf = 0.0f64;
    let mut sum = 0.0;
    for (a, b) in numeric.values.iter().zip(&reference.values) {
        let e = (a - b).abs();
        linf = linf.max(e);
        sum += e * e;
    }
    let weight = match convention {
        L2Convention::Weighted => numeric.grid.cell_volume(),
        L2Convention::Rms => 1.0 / numeric.values.len() as f64,
    };
    Ok(ErrorReport {
        l2: (weight * sum).sqrt(),
        linf,
        n: numeric.grid.shape(),
        h: numeric.grid.axes().iter().map(|a| a.h).collect(),
    })
}

/// Observed order between two grids whose spacing differs by a factor of two.
pub fn convergence_order(coarse_err: f64, fine_err: f64) -> Result<f64> {
    if !(coarse_err > 0.0 && fine_err > 0.0) {
        return Err(Error::Domain(format!(
            "convergence order needs positive errors, got {coarse_err:e} and {fine_err:e}"
        )));
    }
    Ok((coarse_err / fine_err).log2())
}
