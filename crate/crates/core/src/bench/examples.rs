//! The nine benchmark problems: domains, initial data, wall types and reference solutions.

use std::f64::consts::PI;

use super::config::Slice;
use crate::analytic::coeffs::coeffs_quadrature_1d;
use crate::analytic::{closed_form, FourierOracle, OracleKind};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::hopfcole::InitialData;
use crate::walls::{BoundaryTreatment, WallType};

#[derive(Clone, Debug)]
pub struct ExampleInfo {
    pub id: u32,
    pub rank: usize,
    pub domain: (f64, f64),
    /// `None` for the plain heat problem solved without the transform.
    pub walls: Option<WallType>,
    pub oracle: OracleKind,
    pub re: f64,
    pub n: usize,
    pub tau: f64,
    pub sample_times: &'static [f64],
    pub probes: &'static [&'static [f64]],
    /// Probes compare the heat potential rather than the velocity.
    pub probe_phi: bool,
    pub slice: Option<Slice>,
    pub ladder: &'static [usize],
    pub treatment: BoundaryTreatment,
    pub assert_linf: Option<f64>,
    pub assert_probe_tol: Option<f64>,
}

const TABLE_1D: [&[f64]; 3] = [&[0.25], &[0.5], &[0.75]];
const TABLE_2D: [&[f64]; 9] = [
    &[0.25, 0.25],
    &[0.5, 0.25],
    &[0.75, 0.25],
    &[0.25, 0.5],
    &[0.5, 0.5],
    &[0.75, 0.5],
    &[0.25, 0.75],
    &[0.5, 0.75],
    &[0.75, 0.75],
];
const TABLE_3D: [&[f64]; 11] = [
    &[0.25, 0.0, 0.0],
    &[0.25, 0.25, 0.0],
    &[0.25, 0.25, 0.25],
    &[0.25, 0.5, 0.0],
    &[0.25, 0.5, 0.25],
    &[0.25, 0.75, 0.0],
    &[0.5, 0.0, 0.0],
    &[0.5, 0.25, 0.0],
    &[0.5, 0.25, 0.25],
    &[0.75, 0.0, 0.0],
    &[0.75, 0.25, 0.0],
];
const LATE_TIMES: [f64; 5] = [0.4, 0.6, 0.8, 1.0, 3.0];

pub fn info(id: u32) -> Result<ExampleInfo> {
    let base = ExampleInfo {
        id,
        rank: 1,
        domain: (0.0, 1.0),
        walls: Some(WallType::NoFlux),
        oracle: OracleKind::ClosedForm,
        re: 10.0,
        n: 41,
        tau: 5e-5,
        sample_times: &[0.1],
        probes: &[],
        probe_phi: false,
        slice: None,
        ladder: &[11, 21, 41],
        treatment: BoundaryTreatment::Reflect,
        assert_linf: None,
        assert_probe_tol: None,
    };
    Ok(match id {
        1 => ExampleInfo {
            re: 100.0,
            assert_linf: Some(1e-11),
            ..base
        },
        2 => ExampleInfo {
            re: 100.0,
            tau: 5e-4,
            sample_times: &[0.1, 1.0],
            assert_linf: Some(1e-9),
            ..base
        },
        3 => ExampleInfo {
            oracle: OracleKind::Series,
            tau: 1e-4,
            sample_times: &LATE_TIMES,
            probes: &TABLE_1D,
            assert_probe_tol: Some(1e-8),
            ..base
        },
        4 => ExampleInfo {
            oracle: OracleKind::Quadrature,
            tau: 1e-4,
            sample_times: &LATE_TIMES,
            probes: &TABLE_1D,
            assert_probe_tol: Some(1e-6),
            ..base
        },
        5 => ExampleInfo {
            domain: (-PI, PI),
            walls: None,
            re: 1.0,
            tau: 4e-4,
            sample_times: &[1.0, 2.0, 3.0],
            ladder: &[17, 33, 65, 129],
            treatment: BoundaryTreatment::Closure,
            assert_linf: Some(1e-7),
            ..base
        },
        6 => ExampleInfo {
            rank: 2,
            walls: Some(WallType::Isopotential),
            tau: 5e-4,
            sample_times: &[1.0],
            assert_linf: Some(1e-8),
            ..base
        },
        7 => ExampleInfo {
            rank: 2,
            oracle: OracleKind::Series,
            re: 100.0,
            n: 81,
            sample_times: &[0.25, 0.5, 0.75, 1.0],
            probes: &TABLE_2D,
            ladder: &[21, 41, 81],
            assert_probe_tol: Some(1e-5),
            ..base
        },
        8 => ExampleInfo {
            rank: 3,
            walls: Some(WallType::Isopotential),
            re: 100.0,
            n: 81,
            sample_times: &[1.0],
            slice: Some(Slice {
                axis: 2,
                value: 0.25,
            }),
            ladder: &[11, 21, 41],
            assert_linf: Some(1e-6),
            ..base
        },
        9 => ExampleInfo {
            rank: 3,
            oracle: OracleKind::Series,
            sample_times: &[0.1],
            probes: &TABLE_3D,
            probe_phi: true,
            slice: Some(Slice {
                axis: 2,
                value: 0.25,
            }),
            ladder: &[11, 21, 41],
            assert_probe_tol: Some(1e-5),
            ..base
        },
        other => return Err(Error::UnknownExample(other)),
    })
}

pub fn grid(id: u32, n: &[usize]) -> Result<Grid> {
    let info = info(id)?;
    if n.len() != info.rank {
        return Err(Error::Dimension(format!(
            "example {id} needs {} grid sizes",
            info.rank
        )));
    }
    let axes = n
        .iter()
        .map(|&k| crate::grid::Axis::new(info.domain.0, info.domain.1, k))
        .collect::<Result<Vec<_>>>()?;
    Grid::new(axes)
}

/// Initial velocity of a transform-based example, with its potential measured from the origin.
#[derive(Clone, Copy, Debug)]
pub struct ExampleData {
    pub id: u32,
    pub omega: f64,
    pub epsilon: f64,
}

impl ExampleData {
    pub fn new(id: u32, omega: f64, epsilon: f64) -> Result<Self> {
        match id {
            1..=4 | 6..=9 => Ok(ExampleData { id, omega, epsilon }),
            5 => Err(Error::Config(
                "example 5 is a heat problem with no velocity potential".into(),
            )),
            other => Err(Error::UnknownExample(other)),
        }
    }

    /// Heat potential at t = 0 for the examples defined through it.
    fn potential_profile(&self, p: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (s, c): (Vec<f64>, Vec<f64>) =
            p.iter().map(|x| ((PI * x).sin(), (PI * x).cos())).unzip();
        match self.id {
            1 => Some((
                (self.epsilon + c[0]) / (self.epsilon + 1.0),
                vec![-PI * s[0] / (self.epsilon + 1.0)],
            )),
            2 => {
                let (s2, c2) = ((2.0 * PI * p[0]).sin(), (2.0 * PI * p[0]).cos());
                Some((
                    (4.0 + c[0] + 2.0 * c2) / 7.0,
                    vec![-PI * (s[0] + 4.0 * s2) / 7.0],
                ))
            }
            6 => {
                let (s2, c2) = ((2.0 * PI * p[0]).sin(), (2.0 * PI * p[0]).cos());
                Some((
                    (2.0 + s2 * s[1]) / 2.0,
                    vec![PI * c2 * s[1], 0.5 * PI * s2 * c[1]],
                ))
            }
            8 => Some((
                1.0 + s[0] * s[1] * s[2],
                vec![
                    PI * c[0] * s[1] * s[2],
                    PI * s[0] * c[1] * s[2],
                    PI * s[0] * s[1] * c[2],
                ],
            )),
            _ => None,
        }
    }
}

impl InitialData for ExampleData {
    fn rank(&self) -> usize {
        match self.id {
            6 | 7 => 2,
            8 | 9 => 3,
            _ => 1,
        }
    }

    fn velocity(&self, p: &[f64], out: &mut [f64]) {
        if let Some((phi, grad)) = self.potential_profile(p) {
            for (o, g) in out.iter_mut().zip(grad) {
                *o = -2.0 * self.omega * g / phi;
            }
            return;
        }
        let (s, c): (Vec<f64>, Vec<f64>) =
            p.iter().map(|x| ((PI * x).sin(), (PI * x).cos())).unzip();
        match self.id {
            3 => out[0] = s[0],
            4 => out[0] = 4.0 * p[0] * (1.0 - p[0]),
            7 => {
                out[0] = s[0] * c[1];
                out[1] = c[0] * s[1];
            }
            9 => {
                out[0] = s[0] * c[1] * c[2];
                out[1] = c[0] * s[1] * c[2];
                out[2] = c[0] * c[1] * s[2];
            }
            _ => out.fill(f64::NAN),
        }
    }

    fn potential(&self, p: &[f64]) -> Option<f64> {
        if let Some((phi, _)) = self.potential_profile(p) {
            return Some(-2.0 * self.omega * phi.ln());
        }
        let c: Vec<f64> = p.iter().map(|x| (PI * x).cos()).collect();
        match self.id {
            3 => Some((1.0 - c[0]) / PI),
            4 => Some(2.0 * p[0] * p[0] - 4.0 / 3.0 * p[0].powi(3)),
            7 => Some((1.0 - c[0] * c[1]) / PI),
            9 => Some((1.0 - c[0] * c[1] * c[2]) / PI),
            _ => None,
        }
    }
}

/// Reference solution for an example.
#[derive(Clone, Debug)]
pub enum Reference {
    Closed { id: u32, omega: f64, epsilon: f64 },
    Series(FourierOracle),
}

/// Truncation for the quadrature-coefficient series of example 4.
const QUADRATURE_TERMS: usize = 120;

pub fn reference(id: u32, omega: f64, epsilon: f64) -> Result<Reference> {
    Ok(match id {
        1 | 2 | 5 | 6 | 8 => Reference::Closed { id, omega, epsilon },
        3 => Reference::Series(FourierOracle::bessel_1d(omega)?),
        4 => {
            let phi0 = move |x: f64| (-(3.0 * x * x - 2.0 * x * x * x) / (3.0 * omega)).exp();
            let table = coeffs_quadrature_1d(phi0, QUADRATURE_TERMS, 1e-14)?;
            Reference::Series(FourierOracle::new(omega, table, OracleKind::Quadrature))
        }
        7 => Reference::Series(FourierOracle::bessel_2d(omega)?),
        9 => Reference::Series(FourierOracle::hyper_3d(omega)?),
        other => return Err(Error::UnknownExample(other)),
    })
}

impl Reference {
    pub fn kind(&self) -> OracleKind {
        match self {
            Reference::Closed { .. } => OracleKind::ClosedForm,
            Reference::Series(o) => o.kind,
        }
    }

    /// Velocity and normalized heat potential at one point.
    pub fn at(&self, p: &[f64], t: f64) -> Result<(Vec<f64>, f64)> {
        match self {
            Reference::Closed { id, omega, epsilon } => {
                let v = closed_form(*id, *omega, *epsilon, p, t)?;
                Ok((v.velocity, v.phi.unwrap_or(f64::NAN)))
            }
            Reference::Series(o) => {
                let (phi, _) = o.phi_grad(p, t)?;
                Ok((o.velocity(p, t)?, phi))
            }
        }
    }

    pub fn on_grid(&self, grid: &Grid, t: f64) -> Result<(Vec<Field>, Field)> {
        match self {
            Reference::Series(o) => {
                let (phi, vel) = o.evaluate_grid(grid, t)?;
                Ok((vel, phi))
            }
            Reference::Closed { .. } => {
                let rank = grid.rank();
                let mut vel = vec![Vec::with_capacity(grid.len()); rank];
                let mut phi = Vec::with_capacity(grid.len());
                for i in 0..grid.len() {
                    let (v, ph) = self.at(&grid.point(i), t)?;
                    for k in 0..rank {
                        vel[k].push(v[k]);
                    }
                    phi.push(ph);
                }
                let vel = vel
                    .into_iter()
                    .map(|v| Field::new(grid.clone(), v))
                    .collect::<Result<_>>()?;
                // the heat problem has no separate potential; NaN would fail the field check
                let phi = if phi.iter().all(|p| p.is_finite()) {
                    phi
                } else {
                    vec![0.0; grid.len()]
                };
                Ok((vel, Field::new(grid.clone(), phi)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potentials_match_velocities() {
        // d/dx_k of the registered potential equals the velocity component
        let h = 1e-6;
        for id in [1, 2, 3, 4, 6, 7, 8, 9] {
            let d = ExampleData::new(id, 0.05, 2.0).unwrap();
            let r = d.rank();
            let p: Vec<f64> = [0.31, 0.62, 0.17][..r].to_vec();
            let mut u = vec![0.0; r];
            d.velocity(&p, &mut u);
            for k in 0..r {
                let mut a = p.clone();
                let mut b = p.clone();
                a[k] += h;
                b[k] -= h;
                let g = (d.potential(&a).unwrap() - d.potential(&b).unwrap()) / (2.0 * h);
                assert!(
                    (g - u[k]).abs() < 1e-7,
                    "example {id} axis {k}: {g} vs {}",
                    u[k]
                );
            }
            assert!(d.potential(&vec![0.0; r]).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn initial_velocity_matches_reference() {
        for id in [1, 2, 6, 8] {
            let d = ExampleData::new(id, 0.05, 2.0).unwrap();
            let r = d.rank();
            let p: Vec<f64> = [0.31, 0.62, 0.17][..r].to_vec();
            let mut u = vec![0.0; r];
            d.velocity(&p, &mut u);
            let (v, _) = reference(id, 0.05, 2.0).unwrap().at(&p, 0.0).unwrap();
            for k in 0..r {
                assert!((u[k] - v[k]).abs() < 1e-14, "example {id}");
            }
        }
    }

    #[test]
    fn every_example_is_registered() {
        for id in 1..=9 {
            let i = info(id).unwrap();
            assert_eq!(i.id, id);
            assert!(i.probes.iter().all(|p| p.len() == i.rank));
        }
        assert!(info(0).is_err());
    }
}
