//! Per-axis propagators applied across tensor grids.

use nalgebra::{DMatrix, DMatrixView};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfd6::ClosureCoefficient;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::hopfcole::HeatState;
use crate::pim::Propagator;
use crate::walls::{axis_operator, axis_propagator, BoundaryTreatment, WallCondition, WallType};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitScheme {
    #[default]
    Lie,
    Strang,
}

// lines handed to one task when the contracted axis is contiguous
const LINES_PER_TASK: usize = 256;

/// Multiplies every grid line along `axis` by `I + increment`.
pub fn apply_axis(prop: &Propagator, field: &Field, axis: usize) -> Result<Field> {
    let grid = field.grid();
    if axis >= grid.rank() {
        return Err(Error::Dimension(format!(
            "axis {axis} on a rank-{} grid",
            grid.rank()
        )));
    }
    let n = grid.axis(axis).n;
    if prop.dim() != n {
        return Err(Error::Dimension(format!(
            "propagator is {0}x{0}, axis {axis} has {n} nodes",
            prop.dim()
        )));
    }
    let mut data = field.values().to_vec();
    apply_in_place(prop.increment(), &mut data, n, grid.stride(axis));
    Field::new(grid.clone(), data)
}

fn apply_in_place(inc: &DMatrix<f64>, data: &mut [f64], n: usize, inner: usize) {
    if inner == 1 {
        // consecutive lines form the columns of an n x lines column-major matrix
        data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| {
            let lines = chunk.len() / n;
            let x = DMatrixView::from_slice(chunk, n, lines);
            let y = inc * x;
            for (c, v) in chunk.iter_mut().zip(y.as_slice()) {
                *c += v;
            }
        });
    } else {
        let inc_t = inc.transpose();
        data.par_chunks_mut(n * inner).for_each(|chunk| {
            // the block is n x inner row-major, i.e. inner x n column-major
            let x = DMatrixView::from_slice(chunk, inner, n);
            let y = x * &inc_t;
            for (c, v) in chunk.iter_mut().zip(y.as_slice()) {
                *c += v;
            }
        });
    }
}

/// One propagator per axis sharing a step `tau`; Strang also keeps half steps for all but the
/// innermost axis of the sweep.
#[derive(Clone, Debug)]
pub struct SplitPropagator {
    axis_propagators: Vec<Propagator>,
    half_steps: Vec<Propagator>,
    scheme: SplitScheme,
    order: Vec<usize>,
}

impl SplitPropagator {
    pub fn lie(axis_propagators: Vec<Propagator>) -> Result<Self> {
        check_common_tau(&axis_propagators)?;
        let order = (0..axis_propagators.len()).collect();
        Ok(SplitPropagator {
            axis_propagators,
            half_steps: vec![],
            scheme: SplitScheme::Lie,
            order,
        })
    }

    /// `half_steps[k]` advances axis `order[k]` by `tau/2`, for every axis but the last in the sweep.
    pub fn strang(axis_propagators: Vec<Propagator>, half_steps: Vec<Propagator>) -> Result<Self> {
        check_common_tau(&axis_propagators)?;
        if half_steps.len() + 1 != axis_propagators.len() {
            return Err(Error::Dimension(
                "strang needs a half step for every axis but the last".into(),
            ));
        }
        let order = (0..axis_propagators.len()).collect();
        Ok(SplitPropagator {
            axis_propagators,
            half_steps,
            scheme: SplitScheme::Strang,
            order,
        })
    }

    /// Changes the sweep order (Lie only; the Strang half steps are tied to the build order).
    pub fn with_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.rank()).collect::<Vec<_>>() {
            return Err(Error::Dimension(format!(
                "{order:?} is not an axis permutation"
            )));
        }
        if self.scheme == SplitScheme::Strang {
            return Err(Error::Config(
                "axis order is fixed for strang splitting".into(),
            ));
        }
        self.order = order;
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.axis_propagators.len()
    }

    pub fn tau(&self) -> f64 {
        self.axis_propagators[0].tau()
    }

    pub fn scheme(&self) -> SplitScheme {
        self.scheme
    }

    pub fn axis_propagators(&self) -> &[Propagator] {
        &self.axis_propagators
    }

    pub fn apply(&self, field: &Field) -> Result<Field> {
        if field.grid().rank() != self.rank() {
            return Err(Error::Dimension(format!(
                "rank-{} split propagator on a rank-{} field",
                self.rank(),
                field.grid().rank()
            )));
        }
        match self.scheme {
            SplitScheme::Lie => {
                let mut f = field.clone();
                for &k in &self.order {
                    f = apply_axis(&self.axis_propagators[k], &f, k)?;
                }
                Ok(f)
            }
            SplitScheme::Strang => {
                let r = self.rank();
                let mut f = field.clone();
                for k in 0..r - 1 {
                    f = apply_axis(&self.half_steps[k], &f, k)?;
                }
                f = apply_axis(&self.axis_propagators[r - 1], &f, r - 1)?;
                for k in (0..r - 1).rev() {
                    f = apply_axis(&self.half_steps[k], &f, k)?;
                }
                Ok(f)
            }
        }
    }

    /// `k` steps at once. Disjoint-axis factors commute, so the result is the per-axis power
    /// (half steps raised to `2k` under Strang).
    pub fn power(&self, k: u64) -> Result<SplitPropagator> {
        let mut props = Vec::with_capacity(self.rank());
        for (a, p) in self.axis_propagators.iter().enumerate() {
            let powered = match self.scheme {
                SplitScheme::Strang if a + 1 < self.rank() => self.half_steps[a].power(2 * k)?,
                _ => p.power(k)?,
            };
            props.push(powered);
        }
        let mut sp = SplitPropagator::lie(props)?;
        sp.order = self.order.clone();
        Ok(sp)
    }
}

fn check_common_tau(props: &[Propagator]) -> Result<()> {
    if props.is_empty() || props.len() > 3 {
        return Err(Error::Dimension(format!(
            "need 1..=3 axis propagators, got {}",
            props.len()
        )));
    }
    let tau = props[0].tau();
    if props.iter().any(|p| (p.tau() - tau).abs() > 1e-14 * tau) {
        return Err(Error::Config("axis propagators must share tau".into()));
    }
    Ok(())
}

/// Propagators for the potential and each gradient component.
#[derive(Clone, Debug)]
pub struct HeatPropagator {
    pub phi: SplitPropagator,
    pub grad: Vec<SplitPropagator>,
}

/// Options shared by every axis propagator of a run.
#[derive(Clone, Copy, Debug)]
pub struct PropagatorOptions {
    pub tau: f64,
    pub bisection: u32,
    pub scheme: SplitScheme,
    pub treatment: BoundaryTreatment,
    pub coefficient: ClosureCoefficient,
}

impl HeatPropagator {
    pub fn build(
        grid: &Grid,
        omega: f64,
        walls: WallType,
        opts: &PropagatorOptions,
    ) -> Result<Self> {
        let conds = walls.conditions(grid.rank());
        let mut cache: Vec<(usize, WallCondition, bool, Propagator)> = Vec::new();
        let mut get = |axis: usize, c: WallCondition, half: bool| -> Result<Propagator> {
            if let Some(hit) = cache
                .iter()
                .find(|e| e.0 == axis && e.1 == c && e.2 == half)
            {
                return Ok(hit.3.clone());
            }
            // axes with identical extent and condition share an operator
            let ax = grid.axis(axis);
            if let Some(hit) = cache
                .iter()
                .find(|e| grid.axis(e.0) == ax && e.1 == c && e.2 == half)
            {
                let p = hit.3.clone();
                cache.push((axis, c, half, p.clone()));
                return Ok(p);
            }
            let op = axis_operator(ax, omega, c, opts.treatment, opts.coefficient)?;
            let tau = if half { opts.tau / 2.0 } else { opts.tau };
            let p = axis_propagator(&op, tau, opts.bisection)?;
            cache.push((axis, c, half, p.clone()));
            Ok(p)
        };
        let mut split = |cs: &[WallCondition]| -> Result<SplitPropagator> {
            let full = (0..cs.len())
                .map(|k| get(k, cs[k], false))
                .collect::<Result<Vec<_>>>()?;
            match opts.scheme {
                SplitScheme::Lie => SplitPropagator::lie(full),
                SplitScheme::Strang => {
                    let half = (0..cs.len() - 1)
                        .map(|k| get(k, cs[k], true))
                        .collect::<Result<Vec<_>>>()?;
                    SplitPropagator::strang(full, half)
                }
            }
        };
        let phi = split(&conds.phi)?;
        let grad = conds
            .grad
            .iter()
            .map(|c| split(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(HeatPropagator { phi, grad })
    }

    pub fn tau(&self) -> f64 {
        self.phi.tau()
    }

    pub fn power(&self, k: u64) -> Result<HeatPropagator> {
        Ok(HeatPropagator {
            phi: self.phi.power(k)?,
            grad: self
                .grad
                .iter()
                .map(|g| g.power(k))
                .collect::<Result<_>>()?,
        })
    }

    /// Largest `||H|| tau / 2^n` over all axis propagators.
    pub fn step_scale(&self) -> f64 {
        std::iter::once(&self.phi)
            .chain(&self.grad)
            .flat_map(|s| s.axis_propagators())
            .map(|p| p.step_scale())
            .fold(0.0, f64::max)
    }
}

/// Advances the potential and every gradient component by one step.
pub fn step(hp: &HeatPropagator, state: &HeatState) -> Result<HeatState> {
    advance(hp, state, hp.tau())
}

/// Applies `hp` and adds `dt` to the clock.
pub fn advance(hp: &HeatPropagator, state: &HeatState, dt: f64) -> Result<HeatState> {
    if hp.grad.len() != state.grad.len() {
        return Err(Error::Dimension("propagator and state ranks differ".into()));
    }
    let phi = hp.phi.apply(&state.phi)?;
    let grad = hp
        .grad
        .iter()
        .zip(&state.grad)
        .map(|(p, g)| p.apply(g))
        .collect::<Result<Vec<_>>>()?;
    HeatState::new(phi, grad, state.omega, state.time + dt)
}
