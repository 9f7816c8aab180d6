//! MMAS-ib for Condorcet winner search.
//!
//! A pheromone vector over the arms is both the sampling distribution and
//! the algorithm's state. Each iteration draws two arms independently from
//! it, lets them duel once, evaporates every entry by `(1 - rho)`, rewards
//! the winner with `+rho`, clamps non-winners at `tau_min` and renormalises.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trace::{RunTrace, TraceRecord};
use crate::error::{Error, Result};
use crate::preference::{categorical, PreferenceMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmasParams {
    rho: f64,
    tau_min: f64,
}

impl MmasParams {
    /// Both parameters must lie in `(0, 1/2)`.
    pub fn new(rho: f64, tau_min: f64) -> Result<Self> {
        for (name, value) in [("rho", rho), ("tau_min", tau_min)] {
            if !(value > 0.0 && value < 0.5) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    reason: "must lie in (0, 1/2)",
                });
            }
        }
        Ok(Self { rho, tau_min })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tau_min(&self) -> f64 {
        self.tau_min
    }

    /// The regime of the hitting-time analysis: `tau_min <= 1/(10n)` and
    /// `rho < 1/n`.
    pub fn check_drift_regime(&self, n: usize) -> Result<()> {
        let k = n as f64;
        if self.tau_min > 1.0 / (10.0 * k) {
            return Err(Error::Precondition(format!("tau_min = {} exceeds 1/(10n)", self.tau_min)));
        }
        if self.rho >= 1.0 / k {
            return Err(Error::Precondition(format!("rho = {} is not below 1/n", self.rho)));
        }
        Ok(())
    }

    /// Lower bound on every normalised pheromone, `tau_min / (1 + 2 tau_min rho n)`.
    pub fn pheromone_floor(&self, n: usize) -> f64 {
        self.tau_min / (1.0 + self.max_normalizer_excess(n))
    }

    /// `2 tau_min rho n`: the largest amount by which one update can push
    /// the total above one.
    pub fn max_normalizer_excess(&self, n: usize) -> f64 {
        2.0 * self.tau_min * self.rho * n as f64
    }

    /// Hitting-time kernel `1/(tau_min rho) + ln(1/p)/rho`.
    pub fn hitting_time_kernel(&self, p: f64) -> f64 {
        1.0 / (self.tau_min * self.rho) + (1.0 / p).ln() / self.rho
    }
}

/// A normalised pheromone vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PheromoneVector(Vec<f64>);

impl PheromoneVector {
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, arm: usize) -> f64 {
        self.0[arm]
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        categorical(self.0.iter().copied().enumerate(), self.0.iter().sum(), rng)
    }
}

/// Divides every entry by the total.
pub fn normalize(raw: Vec<f64>) -> Result<PheromoneVector> {
    if raw.is_empty() {
        return Err(Error::Dimension("empty pheromone vector".into()));
    }
    if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::NonPositiveEntry { index, value });
    }
    let total: f64 = raw.iter().sum();
    Ok(PheromoneVector(raw.into_iter().map(|v| v / total).collect()))
}

/// Unnormalised update: `max(tau_i (1-rho), tau_min)` for non-winners,
/// `tau_i (1-rho) + rho` for the winner.
pub fn mmas_update(tau: &PheromoneVector, winner: usize, params: &MmasParams) -> Vec<f64> {
    let keep = 1.0 - params.rho;
    tau.0
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if i == winner {
                t * keep + params.rho
            } else {
                (t * keep).max(params.tau_min)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmasStep {
    pub tau: PheromoneVector,
    pub winner: usize,
    pub pair: (usize, usize),
}

/// One iteration. The two draws may coincide, in which case that arm wins.
pub fn mmas_step<R: Rng + ?Sized>(
    tau: &PheromoneVector,
    m: &PreferenceMatrix,
    params: &MmasParams,
    rng: &mut R,
) -> MmasStep {
    let i = tau.sample(rng);
    let j = tau.sample(rng);
    let winner = if i == j { i } else { m.duel_unchecked(i, j, rng) };
    let tau = normalize(mmas_update(tau, winner, params)).expect("update keeps entries positive");
    MmasStep {
        tau,
        winner,
        pair: (i, j),
    }
}

/// Exact `E[tau'_arm]` after one step, by enumerating every ordered pair of
/// draws and both duel outcomes.
pub fn expected_next_pheromone(tau: &PheromoneVector, m: &PreferenceMatrix, params: &MmasParams, arm: usize) -> f64 {
    let n = tau.n();
    let after: Vec<f64> = (0..n)
        .map(|w| normalize(mmas_update(tau, w, params)).expect("positive").get(arm))
        .collect();
    let mut expectation = 0.0;
    for i in 0..n {
        for j in 0..n {
            let pair = tau.get(i) * tau.get(j);
            if i == j {
                expectation += pair * after[i];
            } else {
                expectation += pair * (m.get(i, j) * after[i] + m.get(j, i) * after[j]);
            }
        }
    }
    expectation
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmasRun {
    /// First iteration with `tau[winner] >= threshold`; `None` if the
    /// horizon was exhausted first.
    pub hitting_time: Option<u64>,
    pub iterations: u64,
    pub final_tau: PheromoneVector,
    pub trace: RunTrace,
}

/// Runs from uniform pheromones until the Condorcet winner's pheromone
/// reaches `threshold` or `max_iters` iterations have passed.
pub fn run_mmas<R: Rng + ?Sized>(
    m: &PreferenceMatrix,
    params: &MmasParams,
    rng: &mut R,
    threshold: f64,
    max_iters: u64,
    trace_stride: u64,
) -> Result<MmasRun> {
    let target = m.condorcet_winner().ok_or(Error::NoCondorcetWinner)?;
    let mut tau = PheromoneVector::uniform(m.n());
    let mut trace = RunTrace::new(trace_stride);
    let mut t = 0;
    loop {
        if tau.get(target) >= threshold {
            return Ok(MmasRun {
                hitting_time: Some(t),
                iterations: t,
                final_tau: tau,
                trace,
            });
        }
        if t == max_iters {
            return Ok(MmasRun {
                hitting_time: None,
                iterations: t,
                final_tau: tau,
                trace,
            });
        }
        let step = mmas_step(&tau, m, params, rng);
        t += 1;
        if trace.wants(t) {
            trace.push(TraceRecord {
                iteration: t,
                incumbent: None,
                pheromones: Some(step.tau.values().to_vec()),
                winner: step.winner,
                sampled: step.pair,
            });
        }
        tau = step.tau;
    }
}

/// Races the `tracked` arm's first selection against its pheromone hitting
/// the floor: `Some(true)` if an update clamps it at `tau_min` before it is
/// ever drawn, `Some(false)` if it is drawn first, `None` if neither happens
/// within `max_iters`.
pub fn run_mmas_floor_race<R: Rng + ?Sized>(
    m: &PreferenceMatrix,
    params: &MmasParams,
    tracked: usize,
    rng: &mut R,
    max_iters: u64,
) -> Option<bool> {
    let mut tau = PheromoneVector::uniform(m.n());
    for _ in 0..max_iters {
        let i = tau.sample(rng);
        let j = tau.sample(rng);
        if i == tracked || j == tracked {
            return Some(false);
        }
        if tau.get(tracked) * (1.0 - params.rho) <= params.tau_min {
            return Some(true);
        }
        let winner = if i == j { i } else { m.duel_unchecked(i, j, rng) };
        tau = normalize(mmas_update(&tau, winner, params)).expect("positive");
    }
    None
}
