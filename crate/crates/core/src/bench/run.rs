use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{March, RunConfig};
use super::examples::{self, ExampleData, Reference};
use crate::analytic::OracleKind;
use crate::cfd6;
use crate::error::{Error, Result, StageExt};
use crate::grid::{error_norms_with, ErrorReport, Field, Grid};
use crate::hopfcole::{self, HeatState};
use crate::pim::Propagator;
use crate::splitting::{self, HeatPropagator, PropagatorOptions};
use crate::walls::{embed_lifted, WallCondition};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub t: f64,
    /// One report per velocity component.
    pub components: Vec<ErrorReport>,
    /// Largest component error and root-sum-square of the component L2 norms.
    pub combined: ErrorReport,
    /// Potential against the reference potential, when the example defines one.
    pub phi: Option<ErrorReport>,
    pub phi_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub point: Vec<f64>,
    pub t: f64,
    pub numeric: Vec<f64>,
    pub reference: Vec<f64>,
    pub phi_numeric: Option<f64>,
    pub phi_reference: Option<f64>,
    /// Error of the tabulated quantity (velocity, or potential for heat tables).
    pub abs_err: f64,
    pub oracle: OracleKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest `||H|| tau / 2^n` over the axis generators.
    pub step_scale: f64,
    pub steps: u64,
    /// Largest gradient value on walls where that gradient should stay zero.
    pub boundary_drift: f64,
    pub phi_min: f64,
}

/// One table line: a node, its time, numeric and reference values.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub point: Vec<f64>,
    pub t: f64,
    pub numeric: Vec<f64>,
    pub reference: Vec<f64>,
    pub abs_err: f64,
    pub oracle: OracleKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub oracle: OracleKind,
    pub samples: Vec<SampleReport>,
    pub probes: Vec<ProbeRow>,
    pub diagnostics: Diagnostics,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub wall_clock_s: f64,
    #[serde(skip)]
    pub rows: Vec<TableRow>,
}

impl RunReport {
    pub fn final_sample(&self) -> Option<&SampleReport> {
        self.samples.last()
    }

    /// Velocity L-infinity error at the last sample time.
    pub fn final_linf(&self) -> f64 {
        self.final_sample()
            .map(|s| s.combined.linf)
            .unwrap_or(f64::NAN)
    }

    pub fn probe(&self, point: &[f64], t: f64) -> Option<&ProbeRow> {
        self.probes.iter().find(|p| {
            (p.t - t).abs() < 1e-12
                && p.point
                    .iter()
                    .zip(point)
                    .all(|(a, b)| (a - b).abs() < 1e-12)
        })
    }
}

pub fn run_example(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    if cfg.example_id == 5 {
        return solve_heat_dirichlet(cfg);
    }
    let clock = Instant::now();
    let omega = cfg.omega();
    let info = examples::info(cfg.example_id)?;
    let walls = info
        .walls
        .ok_or_else(|| Error::Config("example has no wall type".into()))?;
    let grid = examples::grid(cfg.example_id, &cfg.n)?;
    let data = ExampleData::new(cfg.example_id, omega, cfg.epsilon)?;
    let mut state =
        hopfcole::forward(&data, omega, &grid, cfg.potential).stage("forward transform")?;
    let hp = HeatPropagator::build(&grid, omega, walls, &propagator_options(cfg))
        .stage("propagator build")?;
    let reference =
        examples::reference(cfg.example_id, omega, cfg.epsilon).stage("oracle build")?;
    let conds = walls.conditions(grid.rank());

    let mut out = Collector::new(cfg, &grid, &reference, info.probe_phi)?;
    let mut steps_done = 0u64;
    let mut drift = 0.0f64;
    let mut phi_min = f64::INFINITY;
    for t in cfg.samples() {
        let target = cfg.steps_to(t)?;
        let k = target - steps_done;
        state = march(&hp, state, k, cfg).stage("time march")?;
        steps_done = target;
        state.time = t;
        for (g, cs) in state.grad.iter().zip(&conds.grad) {
            drift = drift.max(wall_max(g, cs));
        }
        phi_min = phi_min.min(state.phi.min());
        let vel = hopfcole::inverse_with(&state, cfg.gradient_mode).stage("inverse transform")?;
        out.record(t, &vel, Some(&state.phi))
            .stage("oracle comparison")?;
    }
    let diagnostics = Diagnostics {
        step_scale: hp.step_scale(),
        steps: steps_done,
        boundary_drift: drift,
        phi_min,
    };
    Ok(out.finish(diagnostics, clock))
}

fn propagator_options(cfg: &RunConfig) -> PropagatorOptions {
    PropagatorOptions {
        tau: cfg.tau,
        bisection: cfg.bisection_order,
        scheme: cfg.splitting,
        treatment: cfg.boundary_treatment,
        coefficient: cfg.closure_coefficient,
    }
}

fn march(hp: &HeatPropagator, state: HeatState, k: u64, cfg: &RunConfig) -> Result<HeatState> {
    if k == 0 {
        return Ok(state);
    }
    match cfg.march {
        March::Power => splitting::advance(&hp.power(k)?, &state, k as f64 * cfg.tau),
        March::Step => {
            let mut s = state;
            for _ in 0..k {
                s = splitting::step(hp, &s)?;
            }
            Ok(s)
        }
    }
}

/// Largest magnitude of `f` on the walls of every axis whose condition is Dirichlet.
fn wall_max(f: &Field, conds: &[WallCondition]) -> f64 {
    let grid = f.grid();
    let mut m = 0.0f64;
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        let on_wall = conds.iter().enumerate().any(|(k, c)| {
            *c == WallCondition::Dirichlet && (idx[k] == 0 || idx[k] + 1 == grid.axis(k).n)
        });
        if on_wall {
            m = m.max(f.values()[flat].abs());
        }
    }
    m
}

/// Turns solution snapshots into error reports, probe rows and table rows.
struct Collector<'a> {
    cfg: &'a RunConfig,
    grid: &'a Grid,
    reference: &'a Reference,
    probe_phi: bool,
    probe_nodes: Vec<usize>,
    table_nodes: Vec<usize>,
    samples: Vec<SampleReport>,
    probes: Vec<ProbeRow>,
    rows: Vec<TableRow>,
}

impl<'a> Collector<'a> {
    fn new(
        cfg: &'a RunConfig,
        grid: &'a Grid,
        reference: &'a Reference,
        probe_phi: bool,
    ) -> Result<Self> {
        let probe_nodes = cfg
            .probes
            .iter()
            .map(|p| {
                grid.locate(p).ok_or_else(|| {
                    Error::Config(format!(
                        "probe {p:?} is not a node of the {:?} grid",
                        grid.shape()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let slice_index = match cfg.slice {
            Some(s) => Some((
                s.axis,
                grid.axis(s.axis).node_at(s.value).ok_or_else(|| {
                    Error::Config(format!(
                        "slice {} = {} is not a grid plane",
                        s.axis, s.value
                    ))
                })?,
            )),
            None => None,
        };
        let table_nodes = (0..grid.len())
            .filter(|&flat| {
                let idx = grid.multi_index(flat);
                let on_slice = slice_index.is_none_or(|(a, i)| idx[a] == i);
                let on_stride = idx
                    .iter()
                    .enumerate()
                    .all(|(k, &i)| Some(k) == slice_index.map(|s| s.0) || i % cfg.stride == 0);
                on_slice && on_stride
            })
            .collect();
        Ok(Collector {
            cfg,
            grid,
            reference,
            probe_phi,
            probe_nodes,
            table_nodes,
            samples: vec![],
            probes: vec![],
            rows: vec![],
        })
    }

    fn record(&mut self, t: f64, vel: &[Field], phi: Option<&Field>) -> Result<()> {
        let (ref_vel, ref_phi) = self.reference.on_grid(self.grid, t)?;
        let conv = self.cfg.l2_convention;
        let components = vel
            .iter()
            .zip(&ref_vel)
            .map(|(a, b)| error_norms_with(a, b, conv))
            .collect::<Result<Vec<_>>>()?;
        let combined = ErrorReport {
            l2: components.iter().map(|c| c.l2 * c.l2).sum::<f64>().sqrt(),
            linf: components.iter().map(|c| c.linf).fold(0.0, f64::max),
            n: components[0].n.clone(),
            h: components[0].h.clone(),
        };
        let phi_report = match phi {
            Some(p) => Some(error_norms_with(p, &ref_phi, conv)?),
            None => None,
        };
        self.samples.push(SampleReport {
            t,
            components,
            combined,
            phi: phi_report,
            phi_min: phi.map_or(f64::NAN, |p| p.min()),
        });
        let kind = self.reference.kind();
        for &node in &self.probe_nodes {
            let numeric: Vec<f64> = vel.iter().map(|f| f.values()[node]).collect();
            let reference: Vec<f64> = ref_vel.iter().map(|f| f.values()[node]).collect();
            let phi_numeric = phi.map(|p| p.values()[node]);
            let phi_reference = phi.map(|_| ref_phi.values()[node]);
            let abs_err = match (self.probe_phi, phi_numeric, phi_reference) {
                (true, Some(a), Some(b)) => (a - b).abs(),
                _ => max_diff(&numeric, &reference),
            };
            self.probes.push(ProbeRow {
                point: self.grid.point(node),
                t,
                numeric,
                reference,
                phi_numeric,
                phi_reference,
                abs_err,
                oracle: kind,
            });
        }
        for &node in &self.table_nodes {
            let numeric: Vec<f64> = vel.iter().map(|f| f.values()[node]).collect();
            let reference: Vec<f64> = ref_vel.iter().map(|f| f.values()[node]).collect();
            self.rows.push(TableRow {
                point: self.grid.point(node),
                t,
                abs_err: max_diff(&numeric, &reference),
                numeric,
                reference,
                oracle: kind,
            });
        }
        Ok(())
    }

    fn finish(self, diagnostics: Diagnostics, clock: Instant) -> RunReport {
        let mut assertions = vec![];
        if let (Some(limit), Some(last)) = (self.cfg.assert_linf, self.samples.last()) {
            let value = last.combined.linf;
            assertions.push(Assertion {
                name: format!("linf(t={})", last.t),
                value,
                limit,
                passed: value <= limit,
            });
        }
        if let Some(limit) = self.cfg.assert_probe_tol {
            let value = self.probes.iter().map(|p| p.abs_err).fold(0.0, f64::max);
            assertions.push(Assertion {
                name: "probe_abs_err".into(),
                value,
                limit,
                passed: value <= limit,
            });
        }
        let passed = assertions.iter().all(|a| a.passed);
        RunReport {
            config: self.cfg.clone(),
            oracle: self.reference.kind(),
            samples: self.samples,
            probes: self.probes,
            diagnostics,
            assertions,
            passed,
            wall_clock_s: clock.elapsed().as_secs_f64(),
            rows: self.rows,
        }
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Linear heat runs. Example 5 evolves interior nodes with the wall rows removed from the
/// generator and re-imposes the exact wall values after every step; example 9's potential
/// table comes from the transform pipeline.
pub fn solve_heat_dirichlet(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    match cfg.example_id {
        5 => {}
        9 => return run_example(cfg),
        other => {
            return Err(Error::Config(format!(
                "example {other} is not a heat-equation run"
            )))
        }
    }
    let clock = Instant::now();
    let grid = examples::grid(5, &cfg.n)?;
    let axis = *grid.axis(0);
    let reference = examples::reference(5, 1.0, cfg.epsilon)?;
    let exact = |x: f64, t: f64| (-t).exp() * x.sin();
    let generator = match cfg.boundary_treatment {
        crate::walls::BoundaryTreatment::Closure => {
            cfd6::closure_interior_generator(axis.n, axis.h, 1.0, cfg.closure_coefficient)
        }
        crate::walls::BoundaryTreatment::Reflect => {
            cfd6::reflect_generator(axis.n, axis.h, 1.0, cfd6::Parity::Odd)
        }
    }
    .stage("generator")?;
    let inner = Propagator::from_matrix(&generator.h_matrix, cfg.tau, cfg.bisection_order)
        .stage("propagator build")?;
    let prop = embed_lifted(&inner, axis.n);
    let mut u: Vec<f64> = axis.nodes().iter().map(|&x| exact(x, 0.0)).collect();
    let mut out = Collector::new(cfg, &grid, &reference, false)?;
    let mut steps = 0u64;
    for t in cfg.samples() {
        let target = cfg.steps_to(t)?;
        while steps < target {
            u = prop.apply(&u)?;
            steps += 1;
            let tn = steps as f64 * cfg.tau;
            u[0] = exact(axis.a, tn);
            u[axis.n - 1] = exact(axis.coord(axis.n - 1), tn);
        }
        let field = Field::new(grid.clone(), u.clone())?;
        out.record(t, &[field], None).stage("oracle comparison")?;
    }
    let diagnostics = Diagnostics {
        step_scale: prop.step_scale(),
        steps,
        boundary_drift: 0.0,
        phi_min: f64::NAN,
    };
    Ok(out.finish(diagnostics, clock))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    /// Error of the first velocity component.
    pub linf_u: f64,
    pub linf: f64,
    pub l2: f64,
    /// Order against the previous level; `None` on the first level or in the roundoff floor.
    pub order: Option<f64>,
    pub floor: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub config: RunConfig,
    pub rows: Vec<ConvergenceRow>,
}

/// Below this the error is roundoff and orders are not reported.
pub const ERROR_FLOOR: f64 = 1e-12;

pub fn convergence_study(cfg: &RunConfig) -> Result<ConvergenceTable> {
    if cfg.ladder.len() < 3 {
        return Err(Error::Config(
            "a convergence study needs at least three grid levels".into(),
        ));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in &cfg.ladder {
        let mut c = cfg.clone();
        c.n = vec![n; cfg.rank()];
        c.probes.clear();
        c.assert_linf = None;
        c.assert_probe_tol = None;
        let r = run_example(&c)?;
        let last = r
            .final_sample()
            .ok_or_else(|| Error::Config("run produced no samples".into()))?;
        let h = last.combined.h[0];
        let linf_u = last.components[0].linf;
        let (order, floor) = match rows.last() {
            None => (None, linf_u < ERROR_FLOOR),
            Some(prev) if linf_u < ERROR_FLOOR || prev.linf_u < ERROR_FLOOR => (None, true),
            Some(prev) => {
                let ratio = prev.h / h;
                let o = if (ratio - 2.0).abs() < 1e-12 {
                    crate::grid::convergence_order(prev.linf_u, linf_u)?
                } else {
                    (prev.linf_u / linf_u).ln() / ratio.ln()
                };
                (Some(o), false)
            }
        };
        rows.push(ConvergenceRow {
            n,
            h,
            linf_u,
            linf: last.combined.linf,
            l2: last.combined.l2,
            order,
            floor,
        });
    }
    Ok(ConvergenceTable {
        config: cfg.clone(),
        rows,
    })
}

/// Writes each axis generator of a run (and its step increment) as text matrices in `dir`.
/// Returns the paths written.
pub fn dump_operators(cfg: &RunConfig, dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(dir)?;
    let grid = examples::grid(cfg.example_id, &cfg.n)?;
    let info = examples::info(cfg.example_id)?;
    let mut jobs: Vec<(String, usize, WallCondition)> = Vec::new();
    match info.walls {
        Some(w) => {
            let conds = w.conditions(grid.rank());
            for (k, c) in conds.phi.iter().enumerate() {
                jobs.push((format!("phi_axis{k}"), k, *c));
            }
            for (j, cs) in conds.grad.iter().enumerate() {
                for (k, c) in cs.iter().enumerate() {
                    jobs.push((format!("grad{j}_axis{k}"), k, *c));
                }
            }
        }
        None => jobs.push(("u_axis0".into(), 0, WallCondition::Dirichlet)),
    }
    let mut written = vec![];
    for (name, k, cond) in jobs {
        let op = crate::walls::axis_operator(
            grid.axis(k),
            cfg.omega(),
            cond,
            cfg.boundary_treatment,
            cfg.closure_coefficient,
        )?;
        let prop = Propagator::from_matrix(&op.generator.h_matrix, cfg.tau, cfg.bisection_order)?;
        for (suffix, m) in [
            ("generator", &op.generator.h_matrix),
            ("increment", prop.increment()),
        ] {
            let path = dir.join(format!("{name}_{suffix}.txt"));
            let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
            cfd6::write_matrix(file, m)?;
            written.push(path);
        }
    }
    Ok(written)
}
