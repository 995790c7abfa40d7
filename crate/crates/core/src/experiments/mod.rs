//! Seeded, named experiments that turn the library's inequalities and
//! constructions into pass/fail reports, plus the `run-all` driver.
//!
//! Every check stores the triple (value, threshold, margin). Reports are pure
//! functions of their parameters and seed; only `runtime_seconds` varies
//! between runs.

mod background;
mod comparison;
mod loomis_whitney;
mod slicing;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::random::split_seed;
use crate::geometry::{Polytope, Vector};
use crate::volumetrics::{volume_exact, Flat};

pub use background::exp_background;
pub use comparison::{
    exp_counterexample, exp_curvature_gap, exp_planar_monotone, exp_volume_gap, CurvatureGapParams,
};
pub use loomis_whitney::{exp_loomis_whitney, exp_reverse_lw};
pub use slicing::exp_slicing;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub threshold: f64,
    /// Signed distance to failure; non-negative exactly when the check passes.
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(value: f64, threshold: f64) -> Self {
        let margin = threshold - value;
        Self {
            value,
            threshold,
            margin,
            pass: value.is_finite() && margin >= 0.0,
        }
    }

    pub fn at_least(value: f64, threshold: f64) -> Self {
        let margin = value - threshold;
        Self {
            value,
            threshold,
            margin,
            pass: value.is_finite() && margin >= 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub scalars: BTreeMap<String, f64>,
    /// Keyed `claim.aspect`; the part before the first dot names the claim.
    pub checks: BTreeMap<String, Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub runtime_seconds: f64,
}

impl ExperimentReport {
    pub(crate) fn new(name: &str, dims: &[usize], seed: u64) -> Self {
        Self {
            name: name.to_string(),
            dims: dims.to_vec(),
            seed,
            params: BTreeMap::new(),
            scalars: BTreeMap::new(),
            checks: BTreeMap::new(),
            error: None,
            runtime_seconds: 0.0,
        }
    }

    pub(crate) fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    pub(crate) fn scalar(&mut self, key: &str, value: f64) {
        self.scalars.insert(key.to_string(), value);
    }

    pub(crate) fn check(&mut self, key: &str, check: Check) {
        self.checks.insert(key.to_string(), check);
    }

    /// Records min, max and mean of a sample under `key.min` etc.
    pub(crate) fn distribution(&mut self, key: &str, values: &[f64]) {
        if values.is_empty() {
            return;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        self.scalar(&format!("{key}.min"), min);
        self.scalar(&format!("{key}.max"), max);
        self.scalar(&format!("{key}.mean"), mean);
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.values().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Runs `body` on a fresh report and stamps the wall time. Errors are
    /// recorded in the report instead of propagated.
    pub(crate) fn run(
        name: &str,
        dims: &[usize],
        seed: u64,
        body: impl FnOnce(&mut ExperimentReport) -> Result<()>,
    ) -> ExperimentReport {
        let start = Instant::now();
        let mut rep = Self::new(name, dims, seed);
        if let Err(e) = body(&mut rep) {
            rep.error = Some(e.to_string());
        }
        rep.runtime_seconds = start.elapsed().as_secs_f64();
        rep
    }
}

/// How a claim is reported in the summary when all of its checks pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimStatus {
    Verified,
    /// Only the ingredients of the argument are exercised; the final
    /// constant is not numerically testable.
    IngredientsVerified,
}

impl ClaimStatus {
    pub fn label(self) -> &'static str {
        match self {
            Self::Verified => "verified",
            Self::IngredientsVerified => "ingredients-verified",
        }
    }
}

/// Every claim the experiments cover, with its reporting status.
pub const CLAIMS: &[(&str, ClaimStatus)] = &[
    ("projection_body", ClaimStatus::Verified),
    ("mixed_volume", ClaimStatus::Verified),
    ("minkowski_inequality", ClaimStatus::Verified),
    ("petty_isotropy", ClaimStatus::Verified),
    ("minimal_mean_width", ClaimStatus::Verified),
    ("polar_identities", ClaimStatus::Verified),
    ("santalo", ClaimStatus::Verified),
    ("isotropic_position", ClaimStatus::Verified),
    ("hensley", ClaimStatus::Verified),
    ("loomis_whitney", ClaimStatus::Verified),
    ("reverse_loomis_whitney", ClaimStatus::Verified),
    ("planar_containment", ClaimStatus::Verified),
    ("volume_monotonicity", ClaimStatus::Verified),
    ("dominated_not_contained", ClaimStatus::Verified),
    ("curvature_volume_ratio", ClaimStatus::Verified),
    ("curvature_image", ClaimStatus::Verified),
    ("ball_cube_counterexample", ClaimStatus::Verified),
    ("volume_gap_lower", ClaimStatus::Verified),
    ("volume_gap_upper", ClaimStatus::Verified),
    ("intersection_body", ClaimStatus::Verified),
    ("busemann_convexity", ClaimStatus::Verified),
    ("fubini_claim", ClaimStatus::Verified),
    ("projection_formula", ClaimStatus::Verified),
    ("small_projections", ClaimStatus::Verified),
    ("slicing_chain", ClaimStatus::IngredientsVerified),
];

pub fn claim_of(check: &str) -> &str {
    check.split('.').next().unwrap_or(check)
}

pub fn claim_status(claim: &str) -> Option<ClaimStatus> {
    CLAIMS.iter().find(|(c, _)| *c == claim).map(|&(_, s)| s)
}

/// `p` scaled to volume one.
pub(crate) fn unit_volume(p: &Polytope) -> Result<Polytope> {
    let v = volume_exact(p);
    if !(v > 0.0) {
        return Err(GeomError::NotFullDimensional);
    }
    p.scaled(v.powf(-1.0 / p.dim() as f64))
}

/// Seed of trial `t` in dimension `n` of sub-experiment `tag`.
pub(crate) fn stream(seed: u64, tag: u64, n: usize, t: u64) -> u64 {
    split_seed(split_seed(seed, tag), ((n as u64) << 32) | t)
}

/// Linear subspace spanned by `k` Gaussian vectors.
pub(crate) fn random_subspace(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<Flat> {
    let vs: Vec<Vector> = (0..k)
        .map(|_| Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)))
        .collect();
    Flat::spanned(&vs, None)
}

pub(crate) fn check_range(what: &str, n: usize, lo: usize, hi: usize) -> Result<()> {
    if n < lo || n > hi {
        return Err(GeomError::InvalidInput(format!(
            "{what}: dimension {n} outside {lo}..={hi}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub background: Option<DimsTrials>,
    pub loomis_whitney: Option<DimsTrials>,
    pub reverse_lw: Option<DimsTrials>,
    pub curvature_gap: Option<CurvatureGapConfig>,
    pub counterexample: Option<CounterexampleConfig>,
    pub volume_gap: Option<VolumeGapConfig>,
    pub planar_monotone: Option<TrialsOnly>,
    pub slicing: Option<DimsTrials>,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsTrials {
    pub dims: Vec<usize>,
    pub trials: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialsOnly {
    pub trials: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureGapConfig {
    pub dims: Vec<usize>,
    pub m_ball: usize,
    #[serde(default)]
    pub sweep: Vec<usize>,
    #[serde(default = "default_sweep_dim")]
    pub sweep_dim: usize,
    #[serde(default = "default_sweep_seeds")]
    pub sweep_seeds: usize,
}

fn default_sweep_dim() -> usize {
    3
}

fn default_sweep_seeds() -> usize {
    3
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub dims: Vec<usize>,
    pub samples: usize,
    #[serde(default = "default_vol_tol")]
    pub vol_tol: f64,
}

fn default_vol_tol() -> f64 {
    2.5e-4
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeGapConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub grid_m: usize,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| GeomError::InvalidInput(format!("config: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Every configured experiment, in a fixed order.
    pub fn reports(&self) -> Vec<ExperimentReport> {
        let s = self.seed;
        let mut out = Vec::new();
        if let Some(c) = &self.background {
            out.push(exp_background(&c.dims, c.trials, s));
        }
        if let Some(c) = &self.loomis_whitney {
            out.extend(c.dims.iter().map(|&n| exp_loomis_whitney(n, c.trials, s)));
        }
        if let Some(c) = &self.reverse_lw {
            out.extend(c.dims.iter().map(|&n| exp_reverse_lw(n, c.trials, s)));
        }
        if let Some(c) = &self.curvature_gap {
            for &n in &c.dims {
                let sweep = if n == c.sweep_dim {
                    c.sweep.clone()
                } else {
                    Vec::new()
                };
                out.push(exp_curvature_gap(&CurvatureGapParams {
                    n,
                    m_ball: c.m_ball,
                    seed: s,
                    sweep,
                    sweep_seeds: c.sweep_seeds,
                }));
            }
        }
        if let Some(c) = &self.counterexample {
            out.push(exp_counterexample(&c.dims, c.samples, s, c.vol_tol));
        }
        if let Some(c) = &self.volume_gap {
            out.extend(
                c.dims
                    .iter()
                    .map(|&n| exp_volume_gap(n, c.trials, s, c.grid_m)),
            );
        }
        if let Some(c) = &self.planar_monotone {
            out.push(exp_planar_monotone(c.trials, s));
        }
        if let Some(c) = &self.slicing {
            out.extend(c.dims.iter().map(|&n| exp_slicing(n, c.trials, s)));
        }
        out
    }
}

/// File stem of a report: the name plus its dimensions when there is one.
pub fn report_stem(rep: &ExperimentReport) -> String {
    match rep.dims.as_slice() {
        [n] => format!("{}_n{n}", rep.name),
        _ => rep.name.clone(),
    }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    experiment: String,
    claim: &'a str,
    check: &'a str,
    value: f64,
    threshold: f64,
    margin: f64,
    pass: bool,
    status: &'a str,
}

/// One row per check of every report, without timing fields.
pub fn write_summary(reports: &[ExperimentReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| GeomError::InvalidInput(e.to_string()))?;
    for rep in reports {
        let experiment = report_stem(rep);
        if let Some(err) = &rep.error {
            w.serialize(SummaryRow {
                experiment: experiment.clone(),
                claim: "-",
                check: "completed",
                value: 0.0,
                threshold: 1.0,
                margin: -1.0,
                pass: false,
                status: err,
            })
            .map_err(|e| GeomError::InvalidInput(e.to_string()))?;
        }
        for (name, c) in &rep.checks {
            let claim = claim_of(name);
            let status = match (c.pass, claim_status(claim)) {
                (false, _) => "failed",
                (true, Some(s)) => s.label(),
                (true, None) => "unregistered",
            };
            w.serialize(SummaryRow {
                experiment: experiment.clone(),
                claim,
                check: name,
                value: c.value,
                threshold: c.threshold,
                margin: c.margin,
                pass: c.pass,
                status,
            })
            .map_err(|e| GeomError::InvalidInput(e.to_string()))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Runs every configured experiment, writing `<stem>.json` per report and
/// `summary.csv` into `out`.
pub fn run_all(config: &RunConfig, out: &Path) -> Result<Vec<ExperimentReport>> {
    fs::create_dir_all(out)?;
    let reports = config.reports();
    for rep in &reports {
        fs::write(
            out.join(format!("{}.json", report_stem(rep))),
            rep.to_json()?,
        )?;
    }
    write_summary(&reports, &out.join("summary.csv"))?;
    Ok(reports)
}
