mod common;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use burgers_core::analytic::{b_2d, b_3d, bessel_i, bessel_i_scaled};
use burgers_core::bench::config::RunConfig;
use burgers_core::cfd6::{self, ClosureCoefficient};
use burgers_core::grid::{error_norms, error_norms_with, Axis, Field, Grid, L2Convention};
use burgers_core::hopfcole::{self, PotentialSource, VelocityFn};
use burgers_core::pim::{Propagator, DEFAULT_BISECTION};
use burgers_core::splitting::apply_axis;
use burgers_core::walls::{self, BoundaryTreatment, WallCondition};

use common::{random_nsd, rel_inf, rng};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn grid_index_round_trip(shape in prop::collection::vec(8usize..13, 1..4), pick in 0.0f64..1.0) {
        let axes: Vec<Axis> = shape.iter().map(|&n| Axis::new(0.0, 1.0, n).unwrap()).collect();
        let grid = Grid::new(axes).unwrap();
        let flat = ((grid.len() - 1) as f64 * pick) as usize;
        let idx = grid.multi_index(flat);
        prop_assert_eq!(grid.flat_index(&idx), flat);
        let p = grid.point(flat);
        prop_assert_eq!(grid.locate(&p), Some(flat));
    }

    #[test]
    fn error_norm_invariants(values in prop::collection::vec(-10.0f64..10.0, 9..=9), c in -5.0f64..5.0) {
        let grid = Grid::cube(1, 0.0, 1.0, 9).unwrap();
        let e = Field::new(grid.clone(), values.clone()).unwrap();
        let zero = Field::zeros(&grid);
        let r = error_norms(&e, &zero).unwrap();
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(r.linf >= 0.0 && r.l2 >= 0.0);
        prop_assert_eq!(r.linf, max);
        let rms = error_norms_with(&e, &zero, L2Convention::Rms).unwrap();
        prop_assert!(rms.l2 <= rms.linf * (1.0 + 1e-15));
        let scaled = error_norms(&e.scale(c), &zero).unwrap();
        prop_assert!((scaled.linf - c.abs() * r.linf).abs() <= 1e-14 * r.linf.max(1.0));
        prop_assert!((scaled.l2 - c.abs() * r.l2).abs() <= 1e-13 * r.l2.max(1.0));
    }

    #[test]
    fn second_derivative_rows_kill_constants(n in 8usize..48) {
        let h = 1.0 / (n - 1) as f64;
        let closure = cfd6::assemble_closure_with(n, h, ClosureCoefficient::Derived).unwrap();
        let periodic = cfd6::assemble_periodic(n, 1.0 / n as f64).unwrap();
        for op in [&closure, &periodic] {
            for row in op.b_matrix.row_iter() {
                prop_assert!(row.iter().sum::<f64>().abs() * op.h * op.h <= 1e-12);
            }
        }
    }

    #[test]
    fn lifted_propagator_keeps_straight_lines(n in 8usize..32, a in -3.0f64..3.0, b in -3.0f64..3.0, omega in 0.01f64..1.0) {
        let axis = Axis::new(0.0, 1.0, n).unwrap();
        let op = walls::axis_operator(&axis, omega, WallCondition::Dirichlet, BoundaryTreatment::Reflect, ClosureCoefficient::Derived).unwrap();
        prop_assert!(op.lifted);
        let p = walls::axis_propagator(&op, 1e-3, DEFAULT_BISECTION).unwrap();
        let line: Vec<f64> = axis.nodes().iter().map(|x| a + b * x).collect();
        let out = p.apply(&line).unwrap();
        prop_assert!(max_gap(&out, &line) <= 1e-12);
    }

    #[test]
    fn bessel_recurrence(n in 1u32..20, x in 0.1f64..60.0) {
        let lhs = bessel_i(n - 1, x).unwrap() - bessel_i(n + 1, x).unwrap();
        let rhs = 2.0 * n as f64 / x * bessel_i(n, x).unwrap();
        let scale = bessel_i(n - 1, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn scaled_bessel_times_exponential(n in 0u32..30, x in 0.0f64..600.0) {
        let plain = bessel_i(n, x).unwrap();
        let scaled = bessel_i_scaled(n, x).unwrap() * x.exp();
        prop_assert!((plain - scaled).abs() <= 1e-13 * plain.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn odd_index_sums_vanish(omega in 0.01f64..1.0, a in 0usize..12, b in 0usize..12, c in 0usize..12) {
        if (a + b) % 2 == 1 {
            prop_assert_eq!(b_2d(omega, a, b).unwrap(), 0.0);
        }
        if a % 2 != b % 2 || b % 2 != c % 2 {
            prop_assert_eq!(b_3d(omega, a, b, c).unwrap(), 0.0);
        }
    }

    #[test]
    fn config_json_round_trip(id in 1u32..10, stride in 1usize..4) {
        let mut cfg = RunConfig::defaults(id).unwrap();
        cfg.stride = stride;
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn power_equals_repeated_application(seed in 0u64..1000, k in 1u64..24) {
        let mut r = rng(seed);
        let h = random_nsd(6, 20.0, &mut r);
        let p = Propagator::from_matrix(&h, 1e-2, DEFAULT_BISECTION).unwrap();
        let v: Vec<f64> = (0..6).map(|i| (i as f64 + seed as f64).sin()).collect();
        let mut w = v.clone();
        for _ in 0..k {
            w = p.apply(&w).unwrap();
        }
        let direct = p.power(k).unwrap().apply(&v).unwrap();
        prop_assert!(max_gap(&w, &direct) <= 1e-12);
    }

    #[test]
    fn semigroup(seed in 0u64..1000, tau in 1e-4f64..1e-1) {
        let mut r = rng(seed);
        let h: DMatrix<f64> = random_nsd(6, 10.0, &mut r);
        let one = Propagator::from_matrix(&h, tau, DEFAULT_BISECTION).unwrap();
        let two = Propagator::from_matrix(&h, 2.0 * tau, DEFAULT_BISECTION).unwrap();
        let sq = one.then(&one).unwrap();
        prop_assert!(rel_inf(&sq.dense(), &two.dense()) <= 1e-12);
    }

    #[test]
    fn transform_round_trip(a in -1.0f64..1.0, b in -1.0f64..1.0, k in 1u32..4, omega in 0.05f64..1.0) {
        let grid = Grid::cube(1, 0.0, 1.0, 21).unwrap();
        let u0 = |x: f64| a * (k as f64 * PI * x).sin() + b * (PI * x).cos();
        let data = VelocityFn::new(1, move |p: &[f64], out: &mut [f64]| out[0] = u0(p[0]));
        let state = hopfcole::forward(&data, omega, &grid, PotentialSource::Quadrature).unwrap();
        let u = hopfcole::inverse(&state).unwrap();
        for i in 0..grid.len() {
            let want = u0(grid.point(i)[0]);
            prop_assert!((u[0].values()[i] - want).abs() <= 1e-14 * want.abs().max(1.0));
        }
    }

    #[test]
    fn axis_sweeps_commute(seed in 0u64..1000, nx in 8usize..14, ny in 8usize..14, omega in 0.01f64..0.5) {
        let mut r = rng(seed);
        let grid = Grid::new(vec![Axis::new(0.0, 1.0, nx).unwrap(), Axis::new(0.0, 1.0, ny).unwrap()]).unwrap();
        let prop = |k: usize, cond| {
            let op = walls::axis_operator(grid.axis(k), omega, cond, BoundaryTreatment::Reflect, ClosureCoefficient::Derived).unwrap();
            walls::axis_propagator(&op, 1e-3, DEFAULT_BISECTION).unwrap()
        };
        let tx = prop(0, WallCondition::Neumann);
        let ty = prop(1, WallCondition::Dirichlet);
        let f = Field::from_fn(&grid, |_| rand::Rng::gen_range(&mut r, -1.0..1.0));
        let xy = apply_axis(&tx, &apply_axis(&ty, &f, 1).unwrap(), 0).unwrap();
        let yx = apply_axis(&ty, &apply_axis(&tx, &f, 0).unwrap(), 1).unwrap();
        prop_assert!(max_gap(xy.values(), yx.values()) <= 1e-13);
    }
}
