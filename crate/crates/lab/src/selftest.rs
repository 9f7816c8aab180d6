//! Quick end-to-end run: small versions of every experiment kind and the
//! figure CSVs, followed by reduced checks.

use std::path::{Path, PathBuf};

use crate::checks::{self, Check, MatrixFamily, Scale};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::figures;
use crate::runner::run_experiment;

pub const SELFTEST_SEED: u64 = 20240917;

/// Small configs, one per experiment kind. Two workers so that the
/// parallel path is exercised.
pub fn selftest_configs(seed: u64) -> Vec<(&'static str, String)> {
    vec![
        (
            "ea_occupancy",
            format!(
                r#"{{"kind": "ea-occupancy", "base_seed": {seed}, "replicates": 4, "workers": 2,
                "environment": {{"uniform_gap": {{"n": 5, "winner": 0, "p": 0.3}}}},
                "iterations": 20000, "trace_stride": 1000}}"#
            ),
        ),
        (
            "mmas_hitting",
            format!(
                r#"{{"kind": "mmas-hitting", "base_seed": {seed}, "replicates": 4, "workers": 2,
                "environment": {{"uniform_gap": {{"n": 5, "winner": 0, "p": 0.1}}}},
                "rho": 0.05, "tau_min": 0.01, "trace_stride": 50}}"#
            ),
        ),
        (
            "mixing",
            format!(
                r#"{{"kind": "mixing", "base_seed": {seed}, "replicates": 2, "workers": 2,
                "environment": {{"utilities": [3.0, 2.0, 1.0, 0.5]}}, "t_max": 40, "mc_samples": 500}}"#
            ),
        ),
        (
            "boost_grid",
            format!(
                r#"{{"kind": "boost-grid", "base_seed": {seed}, "workers": 2,
                "pairs": [[2.0, 1.0], [3.0, 1.0], [1.2, 1.0]]}}"#
            ),
        ),
        (
            "narm_bounds",
            format!(
                r#"{{"kind": "narm-bounds", "base_seed": {seed}, "workers": 2,
                "utility_sets": [[6.0, 5.0, 4.0]], "x_max": 9, "mc_samples": 2000}}"#
            ),
        ),
        (
            "deterministic_search",
            format!(
                r#"{{"kind": "deterministic-search", "base_seed": {seed}, "replicates": 50, "workers": 2, "n": 20}}"#
            ),
        ),
    ]
}

/// Writes every selftest CSV under `dir` and returns the CSV paths.
/// Metadata files are written too but not returned: they hold wall times.
pub fn write_outputs(dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for (name, text) in selftest_configs(seed) {
        let config = ExperimentConfig::from_json(&text)?;
        let written = run_experiment(&config)?.write(&dir.join(format!("{name}.csv")))?;
        paths.extend(written.into_iter().filter(|p| p.extension().is_some_and(|e| e == "csv")));
    }
    paths.extend(figures::reproduce_figure_narm_bounds(dir, seed, 2000)?);
    paths.extend(figures::reproduce_appendix_figures(dir)?);
    Ok(paths)
}

/// Reduced-scale checks. The Condorcet boosting example is checked in its
/// `1 - 1/n` form and the closed form on Bradley-Terry matrices only.
pub fn quick_checks() -> Vec<Check> {
    vec![
        checks::gamma_equality(),
        checks::stationary_sandwich(200, MatrixFamily::General),
        checks::closed_form_vs_solver("closed-form-bradley-terry", 200, MatrixFamily::BradleyTerry),
        checks::ea_occupancy(Scale::Quick),
        checks::coupling_rate(Scale::Quick),
        checks::duel_budgets(200),
        checks::best_of_three(100),
        checks::stationary_ratio_boost(),
        checks::condorcet_boost_order(),
        checks::pheromone_floor(10_000),
        checks::drift_inequality(),
        checks::floor_race(Scale::Quick),
    ]
}

#[derive(Debug)]
pub struct SelftestReport {
    pub outputs: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_selftest(dir: &Path, seed: u64) -> Result<SelftestReport> {
    let outputs = write_outputs(dir, seed)?;
    let mut checks = quick_checks();
    checks.push(checks::determinism(&dir.join("determinism")));
    Ok(SelftestReport { outputs, checks })
}
