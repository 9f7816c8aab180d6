//! The (1+1) EA for Condorcet winner search: each iteration draws a uniform
//! challenger and keeps the winner of the (possibly best-of-x) query against
//! the incumbent.

use rand::Rng;
use serde::Serialize;

use super::trace::{RunTrace, TraceRecord};
use crate::error::{Error, Result};
use crate::preference::{PreferenceMatrix, QueryPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EaState {
    pub incumbent: usize,
    pub iteration: u64,
    pub query_count: u64,
    pub duel_count: u64,
}

impl EaState {
    pub fn new(incumbent: usize) -> Self {
        Self {
            incumbent,
            iteration: 0,
            query_count: 0,
            duel_count: 0,
        }
    }

    /// Uniformly random initial incumbent.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::new(rng.random_range(0..n))
    }
}

/// The challenger is drawn from all `n` arms, the incumbent included; a
/// self-challenge keeps the incumbent (`M(i,i) = 1`) and still counts as a
/// query of `x` duels.
pub fn ea_step<R: Rng + ?Sized>(state: EaState, m: &PreferenceMatrix, policy: QueryPolicy, rng: &mut R) -> EaState {
    let (incumbent, _) = step_with_challenger(m, state.incumbent, policy, rng);
    EaState {
        incumbent,
        iteration: state.iteration + 1,
        query_count: state.query_count + 1,
        duel_count: state.duel_count + policy.x(),
    }
}

fn step_with_challenger<R: Rng + ?Sized>(
    m: &PreferenceMatrix,
    incumbent: usize,
    policy: QueryPolicy,
    rng: &mut R,
) -> (usize, usize) {
    let challenger = rng.random_range(0..m.n());
    if challenger == incumbent {
        return (incumbent, challenger);
    }
    (m.best_of_x_unchecked(incumbent, challenger, policy, rng), challenger)
}

/// Next incumbent only, for simulations that do not need the counters.
pub(crate) fn transition<R: Rng + ?Sized>(m: &PreferenceMatrix, incumbent: usize, policy: QueryPolicy, rng: &mut R) -> usize {
    step_with_challenger(m, incumbent, policy, rng).0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EaRun {
    /// Fraction of post-burn-in iterations spent at each arm.
    pub occupancy: Vec<f64>,
    pub final_state: EaState,
    /// First iteration (>= 1) at which the Condorcet winner was the
    /// incumbent, if the matrix has one and it was reached.
    pub first_hit: Option<u64>,
    pub trace: RunTrace,
}

/// Default burn-in for occupancy estimates, `max(10 n, 1000)`.
pub fn default_burn_in(n: usize) -> u64 {
    (10 * n as u64).max(1000)
}

/// Runs `iterations` steps from a uniform random start and records the
/// occupancy of iterations `burn_in + 1 ..= iterations`.
pub fn run_ea<R: Rng + ?Sized>(
    m: &PreferenceMatrix,
    policy: QueryPolicy,
    iterations: u64,
    burn_in: u64,
    rng: &mut R,
    trace_stride: u64,
) -> Result<EaRun> {
    if iterations <= burn_in {
        return Err(Error::Precondition(format!(
            "iterations ({iterations}) must exceed burn-in ({burn_in})"
        )));
    }
    let n = m.n();
    let target = m.condorcet_winner();
    let mut state = EaState::random(n, rng);
    let mut counts = vec![0u64; n];
    let mut first_hit = None;
    let mut trace = RunTrace::new(trace_stride);
    for t in 1..=iterations {
        let previous = state.incumbent;
        let (incumbent, challenger) = step_with_challenger(m, state.incumbent, policy, rng);
        state = EaState {
            incumbent,
            iteration: t,
            query_count: state.query_count + 1,
            duel_count: state.duel_count + policy.x(),
        };
        if first_hit.is_none() && Some(incumbent) == target {
            first_hit = Some(t);
        }
        if t > burn_in {
            counts[incumbent] += 1;
        }
        if trace.wants(t) {
            trace.push(TraceRecord {
                iteration: t,
                incumbent: Some(incumbent),
                pheromones: None,
                winner: incumbent,
                sampled: (previous, challenger),
            });
        }
    }
    let kept = (iterations - burn_in) as f64;
    Ok(EaRun {
        occupancy: counts.iter().map(|&c| c as f64 / kept).collect(),
        final_state: state,
        first_hit,
        trace,
    })
}

/// Iterations until `target` first becomes the incumbent, starting from
/// `start` (0 if it already is).
pub fn hitting_time<R: Rng + ?Sized>(
    m: &PreferenceMatrix,
    policy: QueryPolicy,
    start: usize,
    target: usize,
    rng: &mut R,
    horizon: u64,
) -> Result<u64> {
    let mut incumbent = start;
    for t in 0..=horizon {
        if incumbent == target {
            return Ok(t);
        }
        incumbent = transition(m, incumbent, policy, rng);
    }
    Err(Error::HorizonExceeded { horizon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn two(p: f64) -> PreferenceMatrix {
        PreferenceMatrix::new(&[vec![1.0, p], vec![1.0 - p, 1.0]]).unwrap()
    }

    #[test]
    fn dominant_incumbent_stays() {
        let m = two(1.0 - 1e-15);
        let mut rng = RngStream::new(4, 0);
        let mut state = EaState::new(0);
        for _ in 0..10_000 {
            state = ea_step(state, &m, QueryPolicy::single(), &mut rng);
            assert_eq!(state.incumbent, 0);
        }
        assert_eq!(state.iteration, 10_000);
    }

    #[test]
    fn duel_accounting() {
        let m = two(0.7);
        let policy = QueryPolicy::new(5).unwrap();
        let mut rng = RngStream::new(4, 1);
        let mut state = EaState::new(1);
        for _ in 0..37 {
            state = ea_step(state, &m, policy, &mut rng);
        }
        assert_eq!(state.query_count, 37);
        assert_eq!(state.duel_count, 37 * 5);
    }

    #[test]
    fn point_mass_occupancy() {
        let m = two(0.6);
        let mut rng = RngStream::new(8, 0);
        let run = run_ea(&m, QueryPolicy::single(), 11, 10, &mut rng, 0).unwrap();
        assert_eq!(run.occupancy.iter().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(run.occupancy.iter().sum::<f64>(), 1.0);
        assert!(run_ea(&m, QueryPolicy::single(), 10, 10, &mut rng, 0).is_err());
    }

    #[test]
    fn two_arm_occupancy_matches_stationary() {
        let m = two(2.0 / 3.0);
        let mut rng = RngStream::new(21, 0);
        let run = run_ea(&m, QueryPolicy::single(), 1_000_000, 1_000, &mut rng, 0).unwrap();
        assert!((run.occupancy[0] - 2.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn trace_respects_stride() {
        let m = two(0.6);
        let mut rng = RngStream::new(8, 1);
        let run = run_ea(&m, QueryPolicy::single(), 1000, 0, &mut rng, 100).unwrap();
        let its: Vec<u64> = run.trace.records().iter().map(|r| r.iteration).collect();
        assert_eq!(its, (1..=10).map(|k| k * 100).collect::<Vec<_>>());
    }

    #[test]
    fn hitting_from_target_is_zero() {
        let m = two(0.6);
        let mut rng = RngStream::new(8, 2);
        assert_eq!(hitting_time(&m, QueryPolicy::single(), 0, 0, &mut rng, 5).unwrap(), 0);
    }
}
