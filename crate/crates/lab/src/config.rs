//! Experiment configuration documents.
//!
//! One JSON object per experiment. `kind`, `base_seed` and the fields of
//! that kind are accepted; anything else is a config error.
//!
//! | kind | required | optional (default) |
//! |---|---|---|
//! | `ea-occupancy` | `environment`, `iterations` | `x` (1), `burn_in` (max(10n, 1000)), `trace_stride` (100) |
//! | `mmas-hitting` | `environment`, `rho`, `tau_min` | `threshold` (1 - 3p - n tau_min), `max_iters` (10^7), `trace_stride` (100) |
//! | `mixing` | `environment` | `x` (1), `epsilons` ([0.1, 0.01, 0.001]), `t_max` (ceil(n ln 1000)), `mc_samples` (10^4) |
//! | `boost-grid` | `pairs` | `epsilons` ([0.1, 0.05, 0.01]) |
//! | `narm-bounds` | `utility_sets` | `x_max` (30), `mc_samples` (10^4) |
//! | `deterministic-search` | `n` | `winner` (drawn per replicate), `loser_rule` (first-listed), `horizon` (10^7) |
//!
//! Every kind also takes `replicates` (1), `output`, and `workers`.

use std::path::PathBuf;

use condorcet_core::heuristics::{default_burn_in, LoserRule, MmasParams};
use condorcet_core::input::EnvironmentDoc;
use condorcet_core::markov::mixing_time_bound;
use condorcet_core::{PlackettLuceModel, PreferenceMatrix, QueryPolicy};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EaOccupancy,
    MmasHitting,
    Mixing,
    BoostGrid,
    NarmBounds,
    DeterministicSearch,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::EaOccupancy => "ea-occupancy",
            Self::MmasHitting => "mmas-hitting",
            Self::Mixing => "mixing",
            Self::BoostGrid => "boost-grid",
            Self::NarmBounds => "narm-bounds",
            Self::DeterministicSearch => "deterministic-search",
        }
    }

    fn fields(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Self::EaOccupancy => (&["environment", "iterations"], &["x", "burn_in", "trace_stride"]),
            Self::MmasHitting => (
                &["environment", "rho", "tau_min"],
                &["threshold", "max_iters", "trace_stride"],
            ),
            Self::Mixing => (&["environment"], &["x", "epsilons", "t_max", "mc_samples"]),
            Self::BoostGrid => (&["pairs"], &["epsilons"]),
            Self::NarmBounds => (&["utility_sets"], &["x_max", "mc_samples"]),
            Self::DeterministicSearch => (&["n"], &["winner", "loser_rule", "horizon"]),
        }
    }
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub base_seed: u64,
    #[serde(default = "one")]
    pub replicates: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_stride: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_sets: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loser_rule: Option<LoserRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
}

/// A validated experiment, with every default filled in.
#[derive(Debug, Clone)]
pub enum Plan {
    EaOccupancy {
        matrix: PreferenceMatrix,
        policy: QueryPolicy,
        iterations: u64,
        burn_in: u64,
        trace_stride: u64,
    },
    MmasHitting {
        matrix: PreferenceMatrix,
        params: MmasParams,
        threshold: f64,
        max_iters: u64,
        trace_stride: u64,
    },
    Mixing {
        matrix: PreferenceMatrix,
        policy: QueryPolicy,
        epsilons: Vec<f64>,
        t_max: usize,
        mc_samples: u64,
    },
    BoostGrid {
        pairs: Vec<[f64; 2]>,
        epsilons: Vec<f64>,
    },
    NarmBounds {
        sets: Vec<PlackettLuceModel>,
        x_max: u64,
        mc_samples: u64,
    },
    DeterministicSearch {
        n: usize,
        winner: Option<usize>,
        loser_rule: LoserRule,
        horizon: u64,
    },
}

pub const DEFAULT_EPSILONS: [f64; 3] = [0.1, 0.01, 0.001];
pub const DEFAULT_BUDGET_EPSILONS: [f64; 3] = [0.1, 0.05, 0.01];
pub const DEFAULT_TRACE_STRIDE: u64 = 100;
pub const DEFAULT_MAX_ITERS: u64 = 10_000_000;
pub const DEFAULT_MC_SAMPLES: u64 = 10_000;
pub const DEFAULT_X_MAX: u64 = 30;

fn config_err(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl ExperimentConfig {
    /// A config of `kind` with seed 0 and every optional field unset.
    pub fn empty(kind: ExperimentKind) -> Self {
        Self {
            kind,
            base_seed: 0,
            replicates: 1,
            output: None,
            workers: None,
            environment: None,
            x: None,
            iterations: None,
            burn_in: None,
            trace_stride: None,
            rho: None,
            tau_min: None,
            threshold: None,
            max_iters: None,
            epsilons: None,
            t_max: None,
            mc_samples: None,
            pairs: None,
            utility_sets: None,
            x_max: None,
            n: None,
            winner: None,
            loser_rule: None,
            horizon: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text)
    }

    fn present(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut mark = |name: &'static str, set: bool| {
            if set {
                out.push(name);
            }
        };
        mark("environment", self.environment.is_some());
        mark("x", self.x.is_some());
        mark("iterations", self.iterations.is_some());
        mark("burn_in", self.burn_in.is_some());
        mark("trace_stride", self.trace_stride.is_some());
        mark("rho", self.rho.is_some());
        mark("tau_min", self.tau_min.is_some());
        mark("threshold", self.threshold.is_some());
        mark("max_iters", self.max_iters.is_some());
        mark("epsilons", self.epsilons.is_some());
        mark("t_max", self.t_max.is_some());
        mark("mc_samples", self.mc_samples.is_some());
        mark("pairs", self.pairs.is_some());
        mark("utility_sets", self.utility_sets.is_some());
        mark("x_max", self.x_max.is_some());
        mark("n", self.n.is_some());
        mark("winner", self.winner.is_some());
        mark("loser_rule", self.loser_rule.is_some());
        mark("horizon", self.horizon.is_some());
        out
    }

    /// Checks the document and resolves it into a [`Plan`].
    pub fn validate(&self) -> Result<Plan> {
        if self.replicates == 0 {
            return Err(config_err("replicates must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(config_err("workers must be at least 1"));
        }
        let (required, optional) = self.kind.fields();
        let present = self.present();
        for name in &present {
            if !required.contains(name) && !optional.contains(name) {
                return Err(config_err(format!("`{name}` is not used by kind {}", self.kind.name())));
            }
        }
        for name in required {
            if !present.contains(name) {
                return Err(config_err(format!("kind {} requires `{name}`", self.kind.name())));
            }
        }

        let policy = || QueryPolicy::new(self.x.unwrap_or(1)).map_err(|e| config_err(e.to_string()));
        let matrix = || -> Result<PreferenceMatrix> {
            let doc = self.environment.as_ref().expect("checked above");
            Ok(doc.resolve().map_err(|e| config_err(format!("environment: {e}")))?.matrix)
        };
        let epsilons = |default: &[f64]| -> Result<Vec<f64>> {
            let eps = self.epsilons.clone().unwrap_or_else(|| default.to_vec());
            if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                return Err(config_err("epsilons must be a non-empty list of values in (0, 1)"));
            }
            Ok(eps)
        };

        Ok(match self.kind {
            ExperimentKind::EaOccupancy => {
                let matrix = matrix()?;
                let iterations = self.iterations.expect("required");
                let burn_in = self.burn_in.unwrap_or_else(|| default_burn_in(matrix.n()));
                if iterations <= burn_in {
                    return Err(config_err(format!("iterations ({iterations}) must exceed burn_in ({burn_in})")));
                }
                Plan::EaOccupancy {
                    policy: policy()?,
                    iterations,
                    burn_in,
                    trace_stride: self.trace_stride.unwrap_or(DEFAULT_TRACE_STRIDE),
                    matrix,
                }
            }
            ExperimentKind::MmasHitting => {
                let matrix = matrix()?;
                let params = MmasParams::new(self.rho.expect("required"), self.tau_min.expect("required"))
                    .map_err(|e| config_err(e.to_string()))?;
                let threshold = match self.threshold {
                    Some(t) => t,
                    None => {
                        let (_, p) = matrix
                            .condorcet_gap()
                            .ok_or_else(|| config_err("environment has no Condorcet winner"))?;
                        1.0 - 3.0 * p - matrix.n() as f64 * params.tau_min()
                    }
                };
                if !(threshold > 0.0 && threshold <= 1.0) {
                    return Err(config_err(format!("threshold {threshold} outside (0, 1]")));
                }
                if matrix.condorcet_winner().is_none() {
                    return Err(config_err("environment has no Condorcet winner"));
                }
                Plan::MmasHitting {
                    matrix,
                    params,
                    threshold,
                    max_iters: self.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
                    trace_stride: self.trace_stride.unwrap_or(DEFAULT_TRACE_STRIDE),
                }
            }
            ExperimentKind::Mixing => {
                let matrix = matrix()?;
                let t_max = match self.t_max {
                    Some(t) => t,
                    None => mixing_time_bound(matrix.n(), 0.001)?.ceil() as usize,
                };
                let mc_samples = self.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
                if mc_samples == 0 {
                    return Err(config_err("mc_samples must be at least 1"));
                }
                Plan::Mixing {
                    policy: policy()?,
                    epsilons: epsilons(&DEFAULT_EPSILONS)?,
                    t_max,
                    mc_samples,
                    matrix,
                }
            }
            ExperimentKind::BoostGrid => {
                let pairs = self.pairs.clone().expect("required");
                if pairs.is_empty() {
                    return Err(config_err("pairs must not be empty"));
                }
                for [a, b] in &pairs {
                    if !(*a > *b && *b > 0.0 && a.is_finite()) {
                        return Err(config_err(format!("pair [{a}, {b}] needs u_i > u_j > 0")));
                    }
                }
                Plan::BoostGrid {
                    pairs,
                    epsilons: epsilons(&DEFAULT_BUDGET_EPSILONS)?,
                }
            }
            ExperimentKind::NarmBounds => {
                let sets = self
                    .utility_sets
                    .clone()
                    .expect("required")
                    .into_iter()
                    .map(|u| {
                        if u.len() < 2 {
                            return Err(config_err("each utility set needs at least two arms"));
                        }
                        PlackettLuceModel::new(u).map_err(|e| config_err(e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if sets.is_empty() {
                    return Err(config_err("utility_sets must not be empty"));
                }
                let x_max = self.x_max.unwrap_or(DEFAULT_X_MAX);
                if x_max == 0 || x_max > condorcet_core::boosting::EXACT_MAX_DRAWS {
                    return Err(config_err(format!(
                        "x_max must lie in 1..={}",
                        condorcet_core::boosting::EXACT_MAX_DRAWS
                    )));
                }
                if sets.iter().any(|s| s.n() > condorcet_core::boosting::EXACT_MAX_ARMS) {
                    return Err(config_err("utility set larger than the exact oracle accepts"));
                }
                Plan::NarmBounds {
                    sets,
                    x_max,
                    mc_samples: self.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES),
                }
            }
            ExperimentKind::DeterministicSearch => {
                let n = self.n.expect("required");
                if !(2..=condorcet_core::input::MAX_ARMS).contains(&n) {
                    return Err(config_err(format!("n = {n} outside 2..={}", condorcet_core::input::MAX_ARMS)));
                }
                if let Some(w) = self.winner {
                    if w >= n {
                        return Err(config_err(format!("winner {w} out of range for n = {n}")));
                    }
                }
                Plan::DeterministicSearch {
                    n,
                    winner: self.winner,
                    loser_rule: self.loser_rule.unwrap_or(LoserRule::FirstListed),
                    horizon: self.horizon.unwrap_or(DEFAULT_MAX_ITERS),
                }
            }
        })
    }

    /// The config with every default made explicit, for metadata echo.
    pub fn resolved(&self, plan: &Plan) -> Self {
        let mut c = self.clone();
        match plan {
            Plan::EaOccupancy {
                policy,
                burn_in,
                trace_stride,
                ..
            } => {
                c.x = Some(policy.x());
                c.burn_in = Some(*burn_in);
                c.trace_stride = Some(*trace_stride);
            }
            Plan::MmasHitting {
                threshold,
                max_iters,
                trace_stride,
                ..
            } => {
                c.threshold = Some(*threshold);
                c.max_iters = Some(*max_iters);
                c.trace_stride = Some(*trace_stride);
            }
            Plan::Mixing {
                policy,
                epsilons,
                t_max,
                mc_samples,
                ..
            } => {
                c.x = Some(policy.x());
                c.epsilons = Some(epsilons.clone());
                c.t_max = Some(*t_max);
                c.mc_samples = Some(*mc_samples);
            }
            Plan::BoostGrid { epsilons, .. } => c.epsilons = Some(epsilons.clone()),
            Plan::NarmBounds { x_max, mc_samples, .. } => {
                c.x_max = Some(*x_max);
                c.mc_samples = Some(*mc_samples);
            }
            Plan::DeterministicSearch { loser_rule, horizon, .. } => {
                c.loser_rule = Some(*loser_rule);
                c.horizon = Some(*horizon);
            }
        }
        c
    }
}
