mod common;

use std::f64::consts::PI;

use burgers_core::analytic::closed_form;
use burgers_core::bench::examples::{self, ExampleData};
use burgers_core::cfd6::ClosureCoefficient;
use burgers_core::grid::{Field, Grid};
use burgers_core::hopfcole::{self, GradientMode, HeatState, PotentialSource, VelocityFn};
use burgers_core::pim::DEFAULT_BISECTION;
use burgers_core::splitting::{self, apply_axis, HeatPropagator, PropagatorOptions, SplitScheme};
use burgers_core::walls::{self, BoundaryTreatment, WallCondition, WallType};

use common::rng;
use rand::Rng;

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn first_example_antiderivative() {
    let (omega, eps) = (0.01, 2.0);
    let grid = Grid::cube(1, 0.0, 1.0, 81).unwrap();
    let data = ExampleData::new(1, omega, eps).unwrap();
    let state = hopfcole::forward(&data, omega, &grid, PotentialSource::Quadrature).unwrap();
    let phi = Field::from_fn(&grid, |p| (eps + (PI * p[0]).cos()) / (eps + 1.0));
    let grad = Field::from_fn(&grid, |p| -PI * (PI * p[0]).sin() / (eps + 1.0));
    assert!(max_gap(state.phi.values(), phi.values()) < 1e-12);
    assert!(max_gap(state.grad[0].values(), grad.values()) < 1e-10);
}

#[test]
fn path_potential_converges_at_sixth_order() {
    let omega = 0.01;
    let data = ExampleData::new(2, omega, 2.0).unwrap();
    let errs: Vec<f64> = [21, 41, 81]
        .iter()
        .map(|&n| {
            let grid = Grid::cube(1, 0.0, 1.0, n).unwrap();
            let q = hopfcole::forward(&data, omega, &grid, PotentialSource::Quadrature).unwrap();
            let a = hopfcole::forward(&data, omega, &grid, PotentialSource::Auto).unwrap();
            max_gap(q.phi.values(), a.phi.values())
        })
        .collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() > 5.5, "{errs:?}");
    }
    assert!(errs[2] < 1e-11);
}

#[test]
fn two_dimensional_path_potential() {
    // velocity (sin pi x cos pi y, cos pi x sin pi y) has potential (1 - cos pi x cos pi y) / pi
    let omega = 0.1;
    let grid = Grid::cube(2, 0.0, 1.0, 41).unwrap();
    let u0 = VelocityFn::new(2, |p: &[f64], out: &mut [f64]| {
        out[0] = (PI * p[0]).sin() * (PI * p[1]).cos();
        out[1] = (PI * p[0]).cos() * (PI * p[1]).sin();
    });
    let state = hopfcole::forward(&u0, omega, &grid, PotentialSource::Quadrature).unwrap();
    let d: Vec<f64> = state
        .phi
        .values()
        .iter()
        .map(|f| -2.0 * omega * f.ln())
        .collect();
    let exact: Vec<f64> = (0..grid.len())
        .map(|i| {
            let p = grid.point(i);
            (1.0 - (PI * p[0]).cos() * (PI * p[1]).cos()) / PI
        })
        .collect();
    assert!(max_gap(&d, &exact) <= 1e-10);
}

#[test]
fn three_dimensional_initial_potential() {
    let omega = 0.01;
    let grid = Grid::cube(3, 0.0, 1.0, 11).unwrap();
    let data = ExampleData::new(8, omega, 0.0).unwrap();
    let state = hopfcole::forward_nd(&data, omega, &grid).unwrap();
    let want = Field::from_fn(&grid, |p| {
        1.0 + p.iter().map(|x| (PI * x).sin()).product::<f64>()
    });
    assert!(max_gap(state.phi.values(), want.values()) < 1e-14);
}

#[test]
fn inverse_of_first_example_fields_is_exact_solution() {
    let (omega, eps, t) = (0.1, 2.0, 0.3);
    let grid = Grid::cube(1, 0.0, 1.0, 21).unwrap();
    let e = (-PI * PI * omega * t).exp();
    let phi = Field::from_fn(&grid, |p| eps + e * (PI * p[0]).cos());
    let grad = Field::from_fn(&grid, |p| -PI * e * (PI * p[0]).sin());
    let u = hopfcole::inverse(&HeatState::new(phi, vec![grad], omega, t).unwrap()).unwrap();
    for i in 0..grid.len() {
        let x = grid.point(i);
        // closed form is normalized by (eps + 1); the velocity is unaffected
        let want = closed_form(1, omega, eps, &x, t).unwrap().velocity[0];
        assert!((u[0].values()[i] - want).abs() < 1e-15);
    }
}

#[test]
fn inverse_then_regradient_is_consistent() {
    let mut r = rng(3);
    let omega = 0.05;
    let grid = Grid::cube(2, 0.0, 1.0, 9).unwrap();
    let phi = Field::from_fn(&grid, |_| r.gen_range(0.1..3.0));
    let grads: Vec<Field> = (0..2)
        .map(|_| Field::from_fn(&grid, |_| r.gen_range(-2.0..2.0)))
        .collect();
    let state = HeatState::new(phi.clone(), grads.clone(), omega, 0.0).unwrap();
    let u = hopfcole::inverse(&state).unwrap();
    for k in 0..2 {
        for i in 0..grid.len() {
            let back = -(u[k].values()[i] / (2.0 * omega)) * phi.values()[i];
            let g = grads[k].values()[i];
            assert!((back - g).abs() <= 4.0 * f64::EPSILON * g.abs());
        }
    }
}

#[test]
fn differenced_gradients_converge_to_evolved() {
    let omega = 0.1;
    let data = ExampleData::new(6, omega, 0.0).unwrap();
    let gaps: Vec<f64> = [21, 41, 81]
        .iter()
        .map(|&n| {
            let grid = examples::grid(6, &[n, n]).unwrap();
            let state = hopfcole::forward(&data, omega, &grid, PotentialSource::Auto).unwrap();
            let evolved = hopfcole::inverse_with(&state, GradientMode::Evolved).unwrap();
            let differenced = hopfcole::inverse_with(&state, GradientMode::Differenced).unwrap();
            (0..2)
                .map(|k| max_gap(evolved[k].values(), differenced[k].values()))
                .fold(0.0, f64::max)
        })
        .collect();
    for w in gaps.windows(2) {
        assert!((w[0] / w[1]).log2() > 5.0, "{gaps:?}");
    }
    assert!(gaps[2] < 1e-7, "{gaps:?}");
}

fn options(tau: f64) -> PropagatorOptions {
    PropagatorOptions {
        tau,
        bisection: DEFAULT_BISECTION,
        scheme: SplitScheme::Lie,
        treatment: BoundaryTreatment::Reflect,
        coefficient: ClosureCoefficient::Derived,
    }
}

#[test]
fn axis_applications_commute() {
    let mut r = rng(5);
    let grid = Grid::cube(2, 0.0, 1.0, 16).unwrap();
    let ax = walls::axis_operator(
        grid.axis(0),
        0.2,
        WallCondition::Dirichlet,
        BoundaryTreatment::Reflect,
        ClosureCoefficient::Derived,
    )
    .unwrap();
    let ay = walls::axis_operator(
        grid.axis(1),
        0.2,
        WallCondition::Neumann,
        BoundaryTreatment::Reflect,
        ClosureCoefficient::Derived,
    )
    .unwrap();
    let tx = walls::axis_propagator(&ax, 1e-2, DEFAULT_BISECTION).unwrap();
    let ty = walls::axis_propagator(&ay, 1e-2, DEFAULT_BISECTION).unwrap();
    let f = Field::from_fn(&grid, |_| r.gen_range(-1.0..1.0));
    let xy = apply_axis(&tx, &apply_axis(&ty, &f, 1).unwrap(), 0).unwrap();
    let yx = apply_axis(&ty, &apply_axis(&tx, &f, 0).unwrap(), 1).unwrap();
    assert!(max_gap(xy.values(), yx.values()) <= 1e-12);
}

#[test]
fn one_step_of_the_three_dimensional_example() {
    let omega = 0.01;
    let tau = 5e-5;
    let grid = examples::grid(8, &[41, 41, 41]).unwrap();
    let data = ExampleData::new(8, omega, 0.0).unwrap();
    let state = hopfcole::forward(&data, omega, &grid, PotentialSource::Auto).unwrap();
    let hp = HeatPropagator::build(&grid, omega, WallType::Isopotential, &options(tau)).unwrap();
    let next = splitting::step(&hp, &state).unwrap();
    assert!((next.time - tau).abs() < 1e-18);
    let u = hopfcole::inverse(&next).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        let exact = closed_form(8, omega, 0.0, &grid.point(i), tau).unwrap();
        for (uk, ek) in u.iter().zip(&exact.velocity) {
            worst = worst.max((uk.values()[i] - ek).abs());
        }
        worst = worst.max((next.phi.values()[i] - exact.phi.unwrap()).abs());
    }
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn strang_matches_lie_for_commuting_axes() {
    let omega = 0.1;
    let grid = Grid::cube(2, 0.0, 1.0, 21).unwrap();
    let data = ExampleData::new(6, omega, 0.0).unwrap();
    let state = hopfcole::forward(&data, omega, &grid, PotentialSource::Auto).unwrap();
    let lie = HeatPropagator::build(&grid, omega, WallType::Isopotential, &options(1e-3)).unwrap();
    let strang = HeatPropagator::build(
        &grid,
        omega,
        WallType::Isopotential,
        &PropagatorOptions {
            scheme: SplitScheme::Strang,
            ..options(1e-3)
        },
    )
    .unwrap();
    let a = splitting::advance(&lie.power(100).unwrap(), &state, 0.1).unwrap();
    let b = splitting::advance(&strang.power(100).unwrap(), &state, 0.1).unwrap();
    assert!(max_gap(a.phi.values(), b.phi.values()) < 1e-12);
    for k in 0..2 {
        assert!(max_gap(a.grad[k].values(), b.grad[k].values()) < 1e-12);
    }
}

#[test]
fn power_march_matches_stepping() {
    let omega = 0.1;
    let grid = Grid::cube(1, 0.0, 1.0, 21).unwrap();
    let data = ExampleData::new(3, omega, 0.0).unwrap();
    let state = hopfcole::forward(&data, omega, &grid, PotentialSource::Auto).unwrap();
    let hp = HeatPropagator::build(&grid, omega, WallType::NoFlux, &options(1e-3)).unwrap();
    let mut s = state.clone();
    for _ in 0..37 {
        s = splitting::step(&hp, &s).unwrap();
    }
    let p = splitting::advance(&hp.power(37).unwrap(), &state, 37e-3).unwrap();
    assert!(max_gap(s.phi.values(), p.phi.values()) < 1e-13);
    assert!(max_gap(s.grad[0].values(), p.grad[0].values()) < 1e-13);
}

#[test]
fn singular_potential_is_reported() {
    // a strong velocity drives exp(-D / 2 omega) below the floor
    let grid = Grid::cube(1, 0.0, 1.0, 11).unwrap();
    let u0 = VelocityFn::new(1, |_: &[f64], out: &mut [f64]| out[0] = 1.0);
    let err = hopfcole::forward(&u0, 1e-4, &grid, PotentialSource::Quadrature).unwrap_err();
    assert!(
        matches!(err, burgers_core::Error::SingularTransform { .. }),
        "{err}"
    );
}
