//! Per-axis wall conditions and the propagators that honour them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cfd6::{self, ClosureCoefficient, Generator, Parity};
use crate::error::Result;
use crate::grid::Axis;
use crate::pim::Propagator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallCondition {
    /// Zero normal derivative.
    Neumann,
    /// Wall values held at their initial values.
    Dirichlet,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTreatment {
    /// Periodic stencil on the mirrored axis, folded back (even for Neumann, odd for Dirichlet).
    #[default]
    Reflect,
    /// One-sided closure rows. Neumann axes evolve every node with the full closure operator.
    Closure,
}

/// What the velocity does on the walls of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallType {
    /// `u . n = 0`: the potential has zero normal slope, so each gradient component vanishes on its
    /// own walls.
    NoFlux,
    /// The potential is constant along the walls: tangential gradients vanish there.
    Isopotential,
}

/// Conditions per axis for the potential and for each gradient component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldConditions {
    pub phi: Vec<WallCondition>,
    pub grad: Vec<Vec<WallCondition>>,
}

impl WallType {
    pub fn conditions(self, rank: usize) -> FieldConditions {
        use WallCondition::*;
        let (phi_c, own, other) = match self {
            WallType::NoFlux => (Neumann, Dirichlet, Neumann),
            WallType::Isopotential => (Dirichlet, Neumann, Dirichlet),
        };
        FieldConditions {
            phi: vec![phi_c; rank],
            grad: (0..rank)
                .map(|k| {
                    (0..rank)
                        .map(|j| if j == k { own } else { other })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Generator for one axis, plus whether it acts on interior nodes behind a linear wall lift.
#[derive(Clone, Debug)]
pub struct AxisOperator {
    pub generator: Generator,
    pub axis: Axis,
    pub lifted: bool,
}

pub fn axis_operator(
    axis: &Axis,
    omega: f64,
    condition: WallCondition,
    treatment: BoundaryTreatment,
    coefficient: ClosureCoefficient,
) -> Result<AxisOperator> {
    let (generator, lifted) = match (treatment, condition) {
        (BoundaryTreatment::Reflect, WallCondition::Neumann) => (
            cfd6::reflect_generator(axis.n, axis.h, omega, Parity::Even)?,
            false,
        ),
        (BoundaryTreatment::Reflect, WallCondition::Dirichlet) => (
            cfd6::reflect_generator(axis.n, axis.h, omega, Parity::Odd)?,
            true,
        ),
        (BoundaryTreatment::Closure, WallCondition::Neumann) => (
            cfd6::form_generator(
                &cfd6::assemble_closure_with(axis.n, axis.h, coefficient)?,
                omega,
            )?,
            false,
        ),
        (BoundaryTreatment::Closure, WallCondition::Dirichlet) => (
            cfd6::closure_interior_generator(axis.n, axis.h, omega, coefficient)?,
            true,
        ),
    };
    Ok(AxisOperator {
        generator,
        axis: *axis,
        lifted,
    })
}

/// Full `n x n` propagator for the axis. Lifted operators evolve `phi - s` on interior nodes,
/// where `s` is the straight line through the two wall values; wall rows stay identity.
pub fn axis_propagator(op: &AxisOperator, tau: f64, bisection: u32) -> Result<Propagator> {
    let inner = Propagator::from_matrix(&op.generator.h_matrix, tau, bisection)?;
    if !op.lifted {
        return Ok(inner);
    }
    Ok(embed_lifted(&inner, op.axis.n))
}

pub fn embed_lifted(inner: &Propagator, n: usize) -> Propagator {
    let ta = inner.increment();
    let m = n - 2;
    let last = (n - 1) as f64;
    let mut inc = DMatrix::zeros(n, n);
    for r in 0..m {
        let mut left = 0.0;
        let mut right = 0.0;
        for c in 0..m {
            let v = ta[(r, c)];
            inc[(r + 1, c + 1)] = v;
            let x = (c + 1) as f64 / last;
            left += v * (1.0 - x);
            right += v * x;
        }
        inc[(r + 1, 0)] = -left;
        inc[(r + 1, n - 1)] = -right;
    }
    let mut p = Propagator::from_increment(inc, inner.tau(), inner.bisection_order());
    p.set_step_scale(inner.step_scale());
    p
}
