//! Preference environments, search heuristics and exact analysis for
//! Condorcet winner search with stochastic duels.
//!
//! - [`preference`]: preference matrices, Plackett-Luce utilities, duel
//!   sampling and best-of-x boosting.
//! - [`heuristics`]: Round-Robin, Random Search, the (1+1) EA and MMAS-ib.
//! - [`markov`]: transition kernels, stationary distributions, closed-form
//!   bounds, mixing times and the coupling.
//! - [`boosting`]: duel budgets, majority-win bounds and n-arm best-arm
//!   probabilities under Plackett-Luce.
//!
//! Arms are indexed from 0 throughout.

pub mod boosting;
pub mod error;
pub mod heuristics;
pub mod input;
pub mod markov;
pub mod preference;
pub mod rng;
pub mod tail;

pub use error::{Error, Result};
pub use preference::{PlackettLuceModel, PreferenceMatrix, QueryPolicy};
pub use rng::RngStream;
