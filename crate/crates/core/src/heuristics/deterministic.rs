//! Winner search with reliable queries: the winner always wins any query it
//! takes part in.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::trace::{RunTrace, TraceRecord};
use crate::error::{Error, Result};

/// A deterministic comparison oracle.
pub trait WinnerOracle {
    /// Returns the winner among `arms`.
    fn query(&mut self, arms: &[usize]) -> usize;

    /// The ground-truth winner, used only for bookkeeping by the drivers.
    fn winner(&self) -> usize;
}

/// How the oracle answers a query that does not contain the winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoserRule {
    FirstListed,
    LastListed,
    LowestIndex,
    HighestIndex,
}

#[derive(Debug, Clone)]
pub struct FixedWinnerOracle {
    winner: usize,
    rule: LoserRule,
    queries: u64,
}

impl FixedWinnerOracle {
    pub fn new(winner: usize, rule: LoserRule) -> Self {
        Self {
            winner,
            rule,
            queries: 0,
        }
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }
}

impl WinnerOracle for FixedWinnerOracle {
    fn query(&mut self, arms: &[usize]) -> usize {
        self.queries += 1;
        if arms.contains(&self.winner) {
            return self.winner;
        }
        match self.rule {
            LoserRule::FirstListed => arms[0],
            LoserRule::LastListed => arms[arms.len() - 1],
            LoserRule::LowestIndex => *arms.iter().min().expect("non-empty query"),
            LoserRule::HighestIndex => *arms.iter().max().expect("non-empty query"),
        }
    }

    fn winner(&self) -> usize {
        self.winner
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRobinOutcome {
    pub winner: usize,
    pub queries: u64,
}

/// Compares every arm in turn against the current winner.
pub fn round_robin<O: WinnerOracle>(oracle: &mut O, n: usize) -> RoundRobinOutcome {
    let mut best = 0;
    let mut queries = 0;
    for challenger in 1..n {
        best = oracle.query(&[best, challenger]);
        queries += 1;
    }
    RoundRobinOutcome { winner: best, queries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSearchRun {
    /// 1-based iteration in which the winner was first drawn as challenger.
    pub first_hold: u64,
    pub trace: RunTrace,
}

/// Random Search: start from arm 0 and query the incumbent against a
/// uniformly drawn arm each iteration. Once the winner is drawn it is held
/// forever, so the run stops there.
pub fn random_search<O: WinnerOracle, R: Rng + ?Sized>(
    oracle: &mut O,
    n: usize,
    rng: &mut R,
    horizon: u64,
    trace_stride: u64,
) -> Result<RandomSearchRun> {
    let target = oracle.winner();
    let mut trace = RunTrace::new(trace_stride);
    let mut incumbent = 0;
    for t in 1..=horizon {
        let challenger = rng.random_range(0..n);
        incumbent = if challenger == incumbent {
            incumbent
        } else {
            oracle.query(&[incumbent, challenger])
        };
        if trace.wants(t) {
            trace.push(TraceRecord {
                iteration: t,
                incumbent: Some(incumbent),
                pheromones: None,
                winner: incumbent,
                sampled: (incumbent, challenger),
            });
        }
        if challenger == target {
            debug_assert_eq!(incumbent, target);
            return Ok(RandomSearchRun { first_hold: t, trace });
        }
    }
    Err(Error::HorizonExceeded { horizon })
}
