//! Seeded, replicate-parallel execution of experiment configs.
//!
//! Replicate `r` draws from `RngStream::new(base_seed, r)` and nothing else,
//! so output does not depend on the worker count. Rows are assembled in
//! replicate order after all workers finish.

use std::path::{Path, PathBuf};
use std::time::Instant;

use condorcet_core::boosting::{n_arm_best_counts_monte_carlo, n_arm_best_prob_bounds, n_arm_best_prob_exact, sufficient_duels_two_arms};
use condorcet_core::heuristics::{random_search, round_robin, run_ea, run_mmas, FixedWinnerOracle, RunTrace};
use condorcet_core::markov::{empirical_tv_curve, exact_tv_curve, stationary_distribution, total_variation, TransitionMatrix};
use condorcet_core::tail::majority_probability;
use condorcet_core::{PlackettLuceModel, RngStream};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Plan};
use crate::error::{LabError, Result};
use crate::schema::{
    to_csv_bytes, write_bytes, BoostGridRow, DeterministicRow, EaOccupancyRow, MixingRow, MixingSummaryRow,
    MmasHittingRow, NarmBoundsRow, NarmRunRow, TraceRow,
};

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Significance level of the empirical mixing confidence band.
pub const MIXING_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub version: String,
    pub kind: String,
    pub wall_time_seconds: f64,
    pub workers: usize,
    pub rows: usize,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// The main CSV.
    pub csv: Vec<u8>,
    /// Extra CSVs keyed by file-name suffix (`trace`, `summary`).
    pub companions: Vec<(String, Vec<u8>)>,
    pub metadata: RunMetadata,
}

impl ExperimentResult {
    /// Writes `<path>`, `<stem>.<suffix>.csv` for each companion and
    /// `<stem>.meta.json`. Returns the paths written.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let mut written = vec![path.to_path_buf()];
        write_bytes(path, &self.csv)?;
        for (suffix, bytes) in &self.companions {
            let p = sibling(path, &format!("{suffix}.csv"));
            write_bytes(&p, bytes)?;
            written.push(p);
        }
        let meta = sibling(path, "meta.json");
        let mut json = serde_json::to_vec_pretty(&self.metadata)?;
        json.push(b'\n');
        write_bytes(&meta, &json)?;
        written.push(meta);
        Ok(written)
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Default output location for a config without `output`.
pub fn default_output(config: &ExperimentConfig) -> PathBuf {
    PathBuf::from("out").join(format!("{}.csv", config.kind.name()))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let plan = config.validate()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| LabError::Pool(e.to_string()))?;
    let workers = pool.current_num_threads();
    let seed = config.base_seed;
    let replicates = config.replicates;

    let (csv, companions, rows) = pool.install(|| execute(&plan, seed, replicates))?;
    Ok(ExperimentResult {
        csv,
        companions,
        metadata: RunMetadata {
            version: VERSION.into(),
            kind: config.kind.name().into(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            workers,
            rows,
            config: config.resolved(&plan),
        },
    })
}

type Output = (Vec<u8>, Vec<(String, Vec<u8>)>, usize);

fn per_replicate<T: Send>(replicates: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..replicates).into_par_iter().map(f).collect()
}

fn trace_rows(replicate: u64, seed: u64, trace: &RunTrace) -> Vec<TraceRow> {
    trace
        .records()
        .iter()
        .map(|r| TraceRow {
            replicate,
            seed,
            iteration: r.iteration,
            incumbent: r.incumbent,
            winner: r.winner,
            sampled_i: r.sampled.0,
            sampled_j: r.sampled.1,
            pheromones: r
                .pheromones
                .as_ref()
                .map(|v| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";"))
                .unwrap_or_default(),
        })
        .collect()
}

fn execute(plan: &Plan, seed: u64, replicates: u64) -> Result<Output> {
    match plan {
        Plan::EaOccupancy {
            matrix,
            policy,
            iterations,
            burn_in,
            trace_stride,
        } => {
            let p = TransitionMatrix::from_preferences(matrix, *policy)?;
            let pi = stationary_distribution(&p)?.pi;
            let runs = per_replicate(replicates, |r| {
                let mut rng = RngStream::new(seed, r);
                let run = run_ea(matrix, *policy, *iterations, *burn_in, &mut rng, *trace_stride)?;
                let tv = total_variation(&run.occupancy, &pi);
                let rows: Vec<EaOccupancyRow> = (0..matrix.n())
                    .map(|arm| EaOccupancyRow {
                        replicate: r,
                        seed,
                        n: matrix.n(),
                        x: policy.x(),
                        iterations: *iterations,
                        burn_in: *burn_in,
                        arm,
                        occupancy: run.occupancy[arm],
                        stationary: pi[arm],
                        tv_distance: tv,
                        first_hit: run.first_hit,
                    })
                    .collect();
                Ok((rows, trace_rows(r, seed, &run.trace)))
            })?;
            let (rows, traces): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
            let rows: Vec<_> = rows.into_iter().flatten().collect();
            let traces: Vec<_> = traces.into_iter().flatten().collect();
            let mut companions = Vec::new();
            if *trace_stride > 0 {
                companions.push(("trace".to_string(), to_csv_bytes(&traces)?));
            }
            Ok((to_csv_bytes(&rows)?, companions, rows.len()))
        }
        Plan::MmasHitting {
            matrix,
            params,
            threshold,
            max_iters,
            trace_stride,
        } => {
            let (winner, p) = matrix.condorcet_gap().expect("validated");
            let runs = per_replicate(replicates, |r| {
                let mut rng = RngStream::new(seed, r);
                let run = run_mmas(matrix, params, &mut rng, *threshold, *max_iters, *trace_stride)?;
                let row = MmasHittingRow {
                    replicate: r,
                    seed,
                    n: matrix.n(),
                    rho: params.rho(),
                    tau_min: params.tau_min(),
                    threshold: *threshold,
                    hitting_time: run.hitting_time,
                    iterations: run.iterations,
                    final_tau_winner: run.final_tau.get(winner),
                    kernel: params.hitting_time_kernel(p),
                };
                Ok((row, trace_rows(r, seed, &run.trace)))
            })?;
            let (rows, traces): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
            let traces: Vec<_> = traces.into_iter().flatten().collect();
            let mut companions = Vec::new();
            if *trace_stride > 0 {
                companions.push(("trace".to_string(), to_csv_bytes(&traces)?));
            }
            Ok((to_csv_bytes(&rows)?, companions, rows.len()))
        }
        Plan::Mixing {
            matrix,
            policy,
            epsilons,
            t_max,
            mc_samples,
        } => {
            let p = TransitionMatrix::from_preferences(matrix, *policy)?;
            let pi = stationary_distribution(&p)?.pi;
            let exact = exact_tv_curve(&p, *t_max, epsilons)?;
            let curves = per_replicate(replicates, |r| {
                Ok(empirical_tv_curve(
                    matrix,
                    *policy,
                    &pi,
                    *t_max,
                    *mc_samples as usize,
                    MIXING_ALPHA,
                    &RngStream::new(seed, r),
                )?)
            })?;
            let mut rows = Vec::new();
            for (r, curve) in curves.iter().enumerate() {
                for t in 0..=*t_max {
                    rows.push(MixingRow {
                        replicate: r as u64,
                        seed,
                        t,
                        delta_exact: exact.delta[t],
                        delta_hat: curve.delta_hat[t],
                        delta_upper: curve.delta_upper[t],
                    });
                }
            }
            let summary: Vec<MixingSummaryRow> = exact
                .estimates
                .iter()
                .map(|e| MixingSummaryRow {
                    n: matrix.n(),
                    x: policy.x(),
                    epsilon: e.epsilon,
                    tau_eps_exact: e.tau,
                    tau_eps_bound: e.bound,
                    // Worst case over replicates.
                    tau_eps_empirical_upper: curves
                        .iter()
                        .map(|c| c.delta_upper.iter().position(|&d| d <= e.epsilon))
                        .try_fold(0usize, |acc, t| t.map(|t| acc.max(t))),
                })
                .collect();
            Ok((
                to_csv_bytes(&rows)?,
                vec![("summary".to_string(), to_csv_bytes(&summary)?)],
                rows.len(),
            ))
        }
        Plan::BoostGrid { pairs, epsilons } => {
            let mut rows = Vec::new();
            for r in 0..replicates {
                for &[u_i, u_j] in pairs {
                    for &eps in epsilons {
                        let b = sufficient_duels_two_arms(u_i, u_j, eps)?;
                        rows.push(BoostGridRow {
                            replicate: r,
                            seed,
                            u_i,
                            u_j,
                            eps,
                            bound: b.bound,
                            x_recommended: b.recommended_x,
                            precondition: b.precondition_holds,
                            exact_success_prob: majority_probability(b.recommended_x, u_i / (u_i + u_j)),
                        });
                    }
                }
            }
            Ok((to_csv_bytes(&rows)?, Vec::new(), rows.len()))
        }
        Plan::NarmBounds { sets, x_max, mc_samples } => {
            let mut rows = Vec::new();
            for r in 0..replicates {
                let grid = narm_grid(sets, *x_max, *mc_samples, &RngStream::new(seed, r))?;
                rows.extend(grid.into_iter().map(|g| NarmRunRow {
                    replicate: r,
                    seed,
                    u_vector_id: g.u_vector_id,
                    arm: g.arm,
                    x: g.x,
                    lower: g.lower,
                    upper: g.upper,
                    exact: g.exact,
                    monte_carlo: g.monte_carlo,
                    mc_stderr: g.mc_stderr,
                    flags: g.flags,
                }));
            }
            Ok((to_csv_bytes(&rows)?, Vec::new(), rows.len()))
        }
        Plan::DeterministicSearch {
            n,
            winner,
            loser_rule,
            horizon,
        } => {
            let rows = per_replicate(replicates, |r| {
                let mut rng = RngStream::new(seed, r);
                let w = winner.unwrap_or_else(|| rng.random_range(0..*n));
                let rr = round_robin(&mut FixedWinnerOracle::new(w, *loser_rule), *n);
                let rs = random_search(&mut FixedWinnerOracle::new(w, *loser_rule), *n, &mut rng, *horizon, 0)?;
                Ok(DeterministicRow {
                    replicate: r,
                    seed,
                    n: *n,
                    winner: w,
                    round_robin_winner: rr.winner,
                    round_robin_queries: rr.queries,
                    random_search_hold: rs.first_hold,
                })
            })?;
            Ok((to_csv_bytes(&rows)?, Vec::new(), rows.len()))
        }
    }
}

/// Identifier of a utility vector in CSV output, e.g. `6-5-4-3-2`.
pub fn utility_id(u: &PlackettLuceModel) -> String {
    u.utilities().iter().map(f64::to_string).collect::<Vec<_>>().join("-")
}

/// Bounds, exact value and Monte Carlo estimate for every arm of every set
/// at `x = 1..=x_max`. Grid point `k` (sets outer, `x` inner) samples from
/// `stream.child(k)`, so the result does not depend on scheduling.
pub fn narm_grid(
    sets: &[PlackettLuceModel],
    x_max: u64,
    mc_samples: u64,
    stream: &RngStream,
) -> Result<Vec<NarmBoundsRow>> {
    let points: Vec<(usize, u64)> = (0..sets.len()).flat_map(|s| (1..=x_max).map(move |x| (s, x))).collect();
    let blocks = points
        .par_iter()
        .enumerate()
        .map(|(k, &(s, x))| -> Result<Vec<NarmBoundsRow>> {
            let u = &sets[s];
            let counts = if mc_samples > 0 {
                n_arm_best_counts_monte_carlo(u, x, mc_samples, &mut stream.child(k as u64))
            } else {
                vec![0; u.n()]
            };
            let id = utility_id(u);
            (0..u.n())
                .map(|arm| {
                    let b = n_arm_best_prob_bounds(u, arm, x)?;
                    let (mc, se) = if mc_samples > 0 {
                        let p = counts[arm] as f64 / mc_samples as f64;
                        (p, (p * (1.0 - p) / mc_samples as f64).sqrt())
                    } else {
                        (f64::NAN, f64::NAN)
                    };
                    Ok(NarmBoundsRow {
                        u_vector_id: id.clone(),
                        arm,
                        x,
                        lower: b.lower,
                        upper: b.upper,
                        exact: n_arm_best_prob_exact(u, arm, x)?,
                        monte_carlo: mc,
                        mc_stderr: se,
                        flags: b.flags_label(),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(blocks.into_iter().flatten().collect())
}
