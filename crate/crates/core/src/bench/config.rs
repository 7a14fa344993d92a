use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::examples;
use crate::cfd6::ClosureCoefficient;
use crate::error::{Error, Result};
use crate::grid::L2Convention;
use crate::hopfcole::{check_kappa, GradientMode, PotentialSource};
use crate::pim::DEFAULT_BISECTION;
use crate::splitting::SplitScheme;
use crate::walls::BoundaryTreatment;

/// How the run reaches each sample time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum March {
    /// Raise the per-axis step propagators to the number of steps and apply once.
    #[default]
    Power,
    /// Apply the step propagator once per step.
    Step,
}

/// Restricts table rows to the plane `x_axis = value`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slice {
    pub axis: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example_id: u32,
    #[serde(default)]
    pub re: Option<f64>,
    #[serde(default)]
    pub omega: Option<f64>,
    /// Nodes per axis.
    pub n: Vec<usize>,
    pub tau: f64,
    pub t_final: f64,
    /// Times at which errors are measured; empty means just `t_final`.
    pub sample_times: Vec<f64>,
    pub epsilon: f64,
    pub kappa: f64,
    pub splitting: SplitScheme,
    pub bisection_order: u32,
    pub l2_convention: L2Convention,
    pub boundary_treatment: BoundaryTreatment,
    pub closure_coefficient: ClosureCoefficient,
    pub gradient_mode: GradientMode,
    pub potential: PotentialSource,
    pub march: March,
    pub probes: Vec<Vec<f64>>,
    pub slice: Option<Slice>,
    /// Keep every `stride`-th node per axis in the table.
    pub stride: usize,
    /// Nodes per axis for each level of a convergence study.
    pub ladder: Vec<usize>,
    /// Bound on the largest final-time velocity error.
    pub assert_linf: Option<f64>,
    /// Bound on every probe's velocity (or potential) error.
    pub assert_probe_tol: Option<f64>,
}

impl RunConfig {
    /// Settings of the published runs for `example_id`.
    pub fn defaults(example_id: u32) -> Result<Self> {
        let info = examples::info(example_id)?;
        let rank = info.rank;
        let mut cfg = RunConfig {
            example_id,
            re: Some(info.re),
            omega: None,
            n: vec![info.n; rank],
            tau: info.tau,
            t_final: *info.sample_times.last().unwrap_or(&0.0),
            sample_times: info.sample_times.to_vec(),
            epsilon: 2.0,
            kappa: 1.0,
            splitting: SplitScheme::Lie,
            bisection_order: DEFAULT_BISECTION,
            l2_convention: L2Convention::Weighted,
            boundary_treatment: info.treatment,
            closure_coefficient: ClosureCoefficient::Derived,
            gradient_mode: GradientMode::Evolved,
            potential: PotentialSource::Auto,
            march: March::Power,
            probes: info.probes.iter().map(|p| p.to_vec()).collect(),
            slice: info.slice,
            stride: 1,
            ladder: info.ladder.to_vec(),
            assert_linf: info.assert_linf,
            assert_probe_tol: info.assert_probe_tol,
        };
        if example_id == 5 {
            cfg.re = None;
            cfg.omega = Some(1.0);
        }
        Ok(cfg)
    }

    /// Parses a JSON object; absent keys take the example's defaults. Giving either `re` or
    /// `omega` replaces the default viscosity.
    pub fn from_json(text: &str) -> Result<Self> {
        let user: Value = serde_json::from_str(text)?;
        let Value::Object(user) = user else {
            return Err(Error::Config("config must be a JSON object".into()));
        };
        let id = user
            .get("example_id")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Config("example_id is required".into()))?;
        let mut base = match serde_json::to_value(RunConfig::defaults(id as u32)?)? {
            Value::Object(m) => m,
            _ => unreachable!("struct serializes to an object"),
        };
        if user.contains_key("re") || user.contains_key("omega") {
            base.insert("re".into(), Value::Null);
            base.insert("omega".into(), Value::Null);
        }
        for (k, v) in user {
            base.insert(k, v);
        }
        let cfg: RunConfig = serde_json::from_value(Value::Object(base))
            .map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn omega(&self) -> f64 {
        match (self.omega, self.re) {
            (Some(w), _) => w,
            (None, Some(re)) => 1.0 / re,
            (None, None) => f64::NAN,
        }
    }

    pub fn rank(&self) -> usize {
        self.n.len()
    }

    /// Sample times in increasing order (`[t_final]` when none are listed).
    pub fn samples(&self) -> Vec<f64> {
        let mut s = if self.sample_times.is_empty() {
            vec![self.t_final]
        } else {
            self.sample_times.clone()
        };
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }

    /// Whole number of steps to reach `t`.
    pub fn steps_to(&self, t: f64) -> Result<u64> {
        let k = (t / self.tau).round();
        if (k * self.tau - t).abs() > 1e-9 * t.max(self.tau) {
            return Err(Error::Config(format!(
                "sample time {t} is not a multiple of tau = {}",
                self.tau
            )));
        }
        Ok(k as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let info = examples::info(self.example_id)?;
        match (self.re, self.omega) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give exactly one of re and omega, not both".into(),
                ))
            }
            (None, None) => return Err(Error::Config("one of re and omega is required".into())),
            _ => {}
        }
        let w = self.omega();
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Config(format!(
                "viscosity must be positive, got omega = {w}"
            )));
        }
        if self.example_id == 5 && w != 1.0 {
            return Err(Error::Config("example 5 is defined for omega = 1".into()));
        }
        check_kappa(self.kappa).map_err(|e| Error::Config(e.to_string()))?;
        if self.n.len() != info.rank {
            return Err(Error::Config(format!(
                "example {} needs {} grid sizes",
                self.example_id, info.rank
            )));
        }
        if !(self.tau > 0.0 && self.t_final >= self.tau) {
            return Err(Error::Config(format!(
                "need t_final >= tau > 0, got tau = {}, t_final = {}",
                self.tau, self.t_final
            )));
        }
        if !(self.epsilon > 1.0) && self.example_id == 1 {
            return Err(Error::Config(
                "example 1 needs epsilon > 1 to keep the potential positive".into(),
            ));
        }
        for &t in &self.samples() {
            if !(0.0..=self.t_final * (1.0 + 1e-12)).contains(&t) {
                return Err(Error::Config(format!(
                    "sample time {t} outside [0, t_final]"
                )));
            }
            self.steps_to(t)?;
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if let Some(s) = self.slice {
            if s.axis >= info.rank {
                return Err(Error::Config(format!(
                    "slice axis {} on a rank-{} example",
                    s.axis, info.rank
                )));
            }
        }
        if let Some(p) = self.probes.iter().find(|p| p.len() != info.rank) {
            return Err(Error::Config(format!(
                "probe {p:?} has the wrong number of coordinates"
            )));
        }
        Ok(())
    }
}
