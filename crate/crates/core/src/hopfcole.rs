//! Forward and inverse modified Hopf-Cole transforms.
//!
//! `u_k = -2 omega dphi/dx_k / phi`. The potential and each gradient component are carried as
//! separate heat-equation states, so the inverse never differentiates `phi` numerically.

use serde::{Deserialize, Serialize};

use crate::analytic::quadrature;
use crate::error::{Error, Result};
use crate::grid::{Axis, Field, Grid};

/// Smallest admissible `phi`.
pub const PHI_FLOOR: f64 = 1e-300;

/// Burgers' initial velocity, optionally with its potential `D` (so that `u = grad D`) measured
/// from the lower corner of the box.
pub trait InitialData: Sync {
    fn rank(&self) -> usize;
    fn velocity(&self, p: &[f64], out: &mut [f64]);
    fn potential(&self, _p: &[f64]) -> Option<f64> {
        None
    }
}

/// Wraps a velocity closure with no registered potential.
pub struct VelocityFn<F> {
    pub rank: usize,
    pub f: F,
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> VelocityFn<F> {
    pub fn new(rank: usize, f: F) -> Self {
        VelocityFn { rank, f }
    }
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> InitialData for VelocityFn<F> {
    fn rank(&self) -> usize {
        self.rank
    }
    fn velocity(&self, p: &[f64], out: &mut [f64]) {
        (self.f)(p, out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatState {
    pub phi: Field,
    pub grad: Vec<Field>,
    pub omega: f64,
    pub time: f64,
}

impl HeatState {
    pub fn new(phi: Field, grad: Vec<Field>, omega: f64, time: f64) -> Result<Self> {
        check_omega(omega)?;
        if grad.len() != phi.grid().rank() || grad.iter().any(|g| g.grid() != phi.grid()) {
            return Err(Error::Dimension(
                "one gradient field per axis on the potential's grid".into(),
            ));
        }
        Ok(HeatState {
            phi,
            grad,
            omega,
            time,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }
}

/// Whether the potential integral uses the registered closed form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialSource {
    /// Closed form when registered, quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
}

/// How velocities are recovered from a heat state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientMode {
    /// Use the separately evolved gradient fields.
    #[default]
    Evolved,
    /// Differentiate the potential (sixth-order explicit differences).
    Differenced,
}

pub fn check_kappa(kappa: f64) -> Result<()> {
    if kappa == 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "only kappa = 1 is supported, got {kappa}"
        )))
    }
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

pub fn forward_1d(u0: &dyn InitialData, omega: f64, grid: &Grid) -> Result<HeatState> {
    if grid.rank() != 1 || u0.rank() != 1 {
        return Err(Error::Dimension(
            "forward_1d needs rank-1 data and grid".into(),
        ));
    }
    forward(u0, omega, grid, PotentialSource::Auto)
}

pub fn forward_nd(u0: &dyn InitialData, omega: f64, grid: &Grid) -> Result<HeatState> {
    forward(u0, omega, grid, PotentialSource::Auto)
}

/// `phi = exp(-D / 2 omega)`, `grad_k = -(u0_k / 2 omega) phi`.
pub fn forward(
    u0: &dyn InitialData,
    omega: f64,
    grid: &Grid,
    source: PotentialSource,
) -> Result<HeatState> {
    check_omega(omega)?;
    let rank = grid.rank();
    if u0.rank() != rank {
        return Err(Error::Dimension(format!(
            "initial data has rank {}, grid {}",
            u0.rank(),
            rank
        )));
    }
    let registered = source == PotentialSource::Auto && u0.potential(&grid.point(0)).is_some();
    let d: Vec<f64> = if registered {
        (0..grid.len())
            .map(|i| u0.potential(&grid.point(i)).unwrap_or(f64::NAN))
            .collect()
    } else {
        path_potential(u0, grid)?
    };
    let mut phi = Vec::with_capacity(grid.len());
    let mut grad = vec![Vec::with_capacity(grid.len()); rank];
    let mut u = vec![0.0; rank];
    for (i, di) in d.iter().enumerate() {
        let p = grid.point(i);
        let ph = (-di / (2.0 * omega)).exp();
        if !(ph >= PHI_FLOOR) {
            return Err(Error::SingularTransform {
                node: grid.multi_index(i),
                value: ph,
            });
        }
        u0.velocity(&p, &mut u);
        for k in 0..rank {
            grad[k].push(-(u[k] / (2.0 * omega)) * ph);
        }
        phi.push(ph);
    }
    let phi = Field::new(grid.clone(), phi)?;
    let grad = grad
        .into_iter()
        .map(|g| Field::new(grid.clone(), g))
        .collect::<Result<_>>()?;
    HeatState::new(phi, grad, omega, 0.0)
}

/// Cumulative integrals `int_a^{x_i} f` over the nodes of `axis`, each cell by Simpson on four
/// subintervals with one Richardson step against two.
pub fn cumulative_integral(axis: &Axis, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(axis.n);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..axis.n - 1 {
        let x0 = axis.coord(i);
        let x1 = axis.coord(i + 1);
        acc += quadrature::simpson_richardson_cell(&f, x0, x1);
        out.push(acc);
    }
    out
}

/// Symmetrized path integrals of the velocity from the lower corner.
fn path_potential(u0: &dyn InitialData, grid: &Grid) -> Result<Vec<f64>> {
    let rank = grid.rank();
    let comp = |k: usize, p: &[f64]| {
        let mut u = [0.0; 3];
        u0.velocity(p, &mut u[..rank]);
        u[k]
    };
    let corner: Vec<f64> = grid.axes().iter().map(|a| a.a).collect();
    let mut d = vec![0.0; grid.len()];
    match rank {
        1 => {
            let line = cumulative_integral(grid.axis(0), |x| comp(0, &[x]));
            d.copy_from_slice(&line);
        }
        2 => {
            let (ax, ay) = (grid.axis(0), grid.axis(1));
            let ux_base = cumulative_integral(ax, |s| comp(0, &[s, corner[1]]));
            let vy_base = cumulative_integral(ay, |s| comp(1, &[corner[0], s]));
            for j in 0..ay.n {
                let y = ay.coord(j);
                let ux = cumulative_integral(ax, |s| comp(0, &[s, y]));
                for i in 0..ax.n {
                    d[i * ay.n + j] += 0.5 * (ux[i] + ux_base[i] + vy_base[j]);
                }
            }
            for i in 0..ax.n {
                let x = ax.coord(i);
                let vy = cumulative_integral(ay, |s| comp(1, &[x, s]));
                for j in 0..ay.n {
                    d[i * ay.n + j] += 0.5 * vy[j];
                }
            }
        }
        3 => {
            let (ax, ay, az) = (grid.axis(0), grid.axis(1), grid.axis(2));
            let (nx, ny, nz) = (ax.n, ay.n, az.n);
            let (a, c, e) = (corner[0], corner[1], corner[2]);
            let idx = |i: usize, j: usize, k: usize| (i * ny + j) * nz + k;
            let third = 1.0 / 3.0;
            // terms along x: u(s,y,z) + u(s,c,z) + u(s,c,e)
            let u_ce = cumulative_integral(ax, |s| comp(0, &[s, c, e]));
            let mut u_cz = Vec::with_capacity(nz);
            for k in 0..nz {
                let z = az.coord(k);
                u_cz.push(cumulative_integral(ax, |s| comp(0, &[s, c, z])));
            }
            for j in 0..ny {
                for k in 0..nz {
                    let (y, z) = (ay.coord(j), az.coord(k));
                    let u_yz = cumulative_integral(ax, |s| comp(0, &[s, y, z]));
                    for i in 0..nx {
                        d[idx(i, j, k)] += third * (u_yz[i] + u_cz[k][i] + u_ce[i]);
                    }
                }
            }
            // along y: v(x,s,z) + v(x,s,e) + v(a,s,e)
            let v_ae = cumulative_integral(ay, |s| comp(1, &[a, s, e]));
            for i in 0..nx {
                let x = ax.coord(i);
                let v_xe = cumulative_integral(ay, |s| comp(1, &[x, s, e]));
                for k in 0..nz {
                    let z = az.coord(k);
                    let v_xz = cumulative_integral(ay, |s| comp(1, &[x, s, z]));
                    for j in 0..ny {
                        d[idx(i, j, k)] += third * (v_xz[j] + v_xe[j] + v_ae[j]);
                    }
                }
            }
            // along z: w(x,y,s) + w(a,y,s) + w(a,c,s)
            let w_ac = cumulative_integral(az, |s| comp(2, &[a, c, s]));
            let mut w_ay = Vec::with_capacity(ny);
            for j in 0..ny {
                let y = ay.coord(j);
                w_ay.push(cumulative_integral(az, |s| comp(2, &[a, y, s])));
            }
            for i in 0..nx {
                for j in 0..ny {
                    let (x, y) = (ax.coord(i), ay.coord(j));
                    let w_xy = cumulative_integral(az, |s| comp(2, &[x, y, s]));
                    for k in 0..nz {
                        d[idx(i, j, k)] += third * (w_xy[k] + w_ay[j][k] + w_ac[k]);
                    }
                }
            }
        }
        r => return Err(Error::Dimension(format!("rank {r}"))),
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Quadrature("potential integral is not finite".into()));
    }
    Ok(d)
}

/// `u_k = -2 omega grad_k / phi`.
pub fn inverse(state: &HeatState) -> Result<Vec<Field>> {
    inverse_with(state, GradientMode::Evolved)
}

pub fn inverse_with(state: &HeatState, mode: GradientMode) -> Result<Vec<Field>> {
    let grid = state.grid();
    let phi = state.phi.values();
    if let Some(i) = phi.iter().position(|&p| !(p.abs() >= PHI_FLOOR)) {
        return Err(Error::SingularTransform {
            node: grid.multi_index(i),
            value: phi[i],
        });
    }
    let grads: Vec<Field> = match mode {
        GradientMode::Evolved => state.grad.clone(),
        GradientMode::Differenced => (0..grid.rank())
            .map(|k| difference(&state.phi, k))
            .collect::<Result<_>>()?,
    };
    grads
        .iter()
        .map(|g| {
            let v = g
                .values()
                .iter()
                .zip(phi)
                .map(|(g, p)| -2.0 * state.omega * g / p)
                .collect();
            Field::new(grid.clone(), v)
        })
        .collect()
}

// sixth-order first derivative: centred in the interior, one-sided 7-point near walls
const CENTRED: [f64; 7] = [
    -1.0 / 60.0,
    3.0 / 20.0,
    -3.0 / 4.0,
    0.0,
    3.0 / 4.0,
    -3.0 / 20.0,
    1.0 / 60.0,
];
const ONE_SIDED: [[f64; 7]; 3] = [
    [
        -49.0 / 20.0,
        6.0,
        -15.0 / 2.0,
        20.0 / 3.0,
        -15.0 / 4.0,
        6.0 / 5.0,
        -1.0 / 6.0,
    ],
    [
        -1.0 / 6.0,
        -77.0 / 60.0,
        5.0 / 2.0,
        -5.0 / 3.0,
        5.0 / 6.0,
        -1.0 / 4.0,
        1.0 / 30.0,
    ],
    [
        1.0 / 30.0,
        -2.0 / 5.0,
        -7.0 / 12.0,
        4.0 / 3.0,
        -1.0 / 2.0,
        2.0 / 15.0,
        -1.0 / 60.0,
    ],
];

/// Sixth-order derivative of `f` along `axis`.
pub fn difference(f: &Field, axis: usize) -> Result<Field> {
    let grid = f.grid();
    let ax = grid.axis(axis);
    let n = ax.n;
    let stride = grid.stride(axis);
    let block = n * stride;
    let src = f.values();
    let mut out = vec![0.0; src.len()];
    for start in (0..src.len()).step_by(block) {
        for off in 0..stride {
            let at = |i: usize| src[start + off + i * stride];
            for i in 0..n {
                let d = if i >= 3 && i + 3 < n {
                    (0..7).map(|j| CENTRED[j] * at(i + j - 3)).sum::<f64>()
                } else if i < 3 {
                    (0..7).map(|j| ONE_SIDED[i][j] * at(j)).sum::<f64>()
                } else {
                    let r = n - 1 - i;
                    -(0..7).map(|j| ONE_SIDED[r][j] * at(n - 1 - j)).sum::<f64>()
                };
                out[start + off + i * stride] = d / ax.h;
            }
        }
    }
    Field::new(grid.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    struct Zero(usize);
    impl InitialData for Zero {
        fn rank(&self) -> usize {
            self.0
        }
        fn velocity(&self, _p: &[f64], out: &mut [f64]) {
            out.fill(0.0)
        }
    }

    #[test]
    fn zero_data() {
        for rank in 1..=3 {
            let g = Grid::cube(rank, 0.0, 1.0, 9).unwrap();
            let s = forward(&Zero(rank), 0.1, &g, PotentialSource::Quadrature).unwrap();
            assert!(s.phi.values().iter().all(|&v| v == 1.0));
            assert!(s.grad.iter().all(|g| g.max_abs() == 0.0));
        }
    }

    #[test]
    fn sine_quadrature_matches_closed_form() {
        let omega = 0.1;
        let g = Grid::cube(1, 0.0, 1.0, 41).unwrap();
        let u0 = VelocityFn {
            rank: 1,
            f: |p: &[f64], o: &mut [f64]| o[0] = (PI * p[0]).sin(),
        };
        let s = forward_1d(&u0, omega, &g).unwrap();
        for (i, v) in s.phi.values().iter().enumerate() {
            let x = g.axis(0).coord(i);
            let exact = (((PI * x).cos() - 1.0) / (2.0 * omega * PI)).exp();
            assert!((v - exact).abs() <= 1e-12, "{i}: {v} {exact}");
        }
    }

    #[test]
    fn constant_phi_gives_rest() {
        let g = Grid::cube(2, 0.0, 1.0, 9).unwrap();
        let s = HeatState::new(
            Field::constant(&g, 3.0),
            vec![Field::zeros(&g), Field::zeros(&g)],
            0.2,
            0.0,
        )
        .unwrap();
        for u in inverse(&s).unwrap() {
            assert_eq!(u.max_abs(), 0.0);
        }
    }

    #[test]
    fn floor_violation_names_node() {
        let g = Grid::cube(1, 0.0, 1.0, 9).unwrap();
        let mut phi = Field::constant(&g, 1.0);
        phi.values_mut()[4] = 0.0;
        let s = HeatState::new(phi, vec![Field::zeros(&g)], 0.2, 0.0).unwrap();
        match inverse(&s) {
            Err(Error::SingularTransform { node, .. }) => assert_eq!(node, vec![4]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kappa_other_than_one_rejected() {
        assert!(check_kappa(1.0).is_ok());
        assert!(check_kappa(2.0).is_err());
    }

    #[test]
    fn difference_is_sixth_order() {
        let mut errs = vec![];
        for n in [21, 41] {
            let g = Grid::cube(1, 0.0, 1.0, n).unwrap();
            let f = Field::from_fn(&g, |p| (2.0 * p[0]).exp());
            let d = difference(&f, 0).unwrap();
            let e = d
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| (v - 2.0 * (2.0 * g.axis(0).coord(i)).exp()).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!((errs[0] / errs[1]).log2() > 5.5, "{errs:?}");
    }
}
