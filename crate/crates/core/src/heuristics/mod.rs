//! Search heuristics for winner identification: Round-Robin and Random
//! Search under deterministic queries, the (1+1) EA and MMAS-ib under
//! stochastic duels.

pub mod deterministic;
pub mod ea;
pub mod mmas;
pub mod trace;

pub use deterministic::{random_search, round_robin, FixedWinnerOracle, LoserRule, RandomSearchRun, RoundRobinOutcome, WinnerOracle};
pub use ea::{default_burn_in, ea_step, hitting_time, run_ea, EaRun, EaState};
pub use mmas::{expected_next_pheromone, mmas_step, mmas_update, normalize, run_mmas, run_mmas_floor_race, MmasParams, MmasRun, MmasStep, PheromoneVector};
pub use trace::{RunTrace, TraceRecord};
