//! CSV row types. Every file has a header row, comma separators, `.` decimals
//! and LF line endings; empty cells mean "not available".

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{LabError, Result};

/// A row type with a fixed header. The header must list the serialized
/// fields in declaration order.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

macro_rules! csv_row {
    ($(#[$meta:meta])* $name:ident { $($field:ident : $ty:ty),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize)]
        pub struct $name {
            $(pub $field: $ty),+
        }

        impl CsvRow for $name {
            const HEADER: &'static [&'static str] = &[$(stringify!($field)),+];
        }
    };
}

csv_row!(
    /// `ea-occupancy`: one row per (replicate, arm).
    EaOccupancyRow {
        replicate: u64,
        seed: u64,
        n: usize,
        x: u64,
        iterations: u64,
        burn_in: u64,
        arm: usize,
        occupancy: f64,
        stationary: f64,
        tv_distance: f64,
        first_hit: Option<u64>,
    }
);

csv_row!(
    /// `mmas-hitting`: one row per replicate. `hitting_time` is empty when
    /// the run hit `max_iters` first.
    MmasHittingRow {
        replicate: u64,
        seed: u64,
        n: usize,
        rho: f64,
        tau_min: f64,
        threshold: f64,
        hitting_time: Option<u64>,
        iterations: u64,
        final_tau_winner: f64,
        kernel: f64,
    }
);

csv_row!(
    /// Sampled trajectory points of `ea-occupancy` and `mmas-hitting` runs.
    /// `pheromones` is a `;`-joined vector, empty for EA runs.
    TraceRow {
        replicate: u64,
        seed: u64,
        iteration: u64,
        incumbent: Option<usize>,
        winner: usize,
        sampled_i: usize,
        sampled_j: usize,
        pheromones: String,
    }
);

csv_row!(
    /// `mixing` (also the `tv-decay` figure input): exact and empirical
    /// worst-case TV distance per step.
    MixingRow {
        replicate: u64,
        seed: u64,
        t: usize,
        delta_exact: f64,
        delta_hat: f64,
        delta_upper: f64,
    }
);

csv_row!(
    /// `mixing` summary: exact mixing time against the coupling bound.
    MixingSummaryRow {
        n: usize,
        x: u64,
        epsilon: f64,
        tau_eps_exact: Option<usize>,
        tau_eps_bound: f64,
        tau_eps_empirical_upper: Option<usize>,
    }
);

csv_row!(
    /// Two-arm duel budgets (the `budget` subcommand).
    BudgetRow {
        u_i: f64,
        u_j: f64,
        eps: f64,
        bound: f64,
        x_recommended: u64,
        exact_success_prob: f64,
    }
);

csv_row!(
    /// `boost-grid`: budgets with the run columns and the precondition flag.
    BoostGridRow {
        replicate: u64,
        seed: u64,
        u_i: f64,
        u_j: f64,
        eps: f64,
        bound: f64,
        x_recommended: u64,
        precondition: bool,
        exact_success_prob: f64,
    }
);

csv_row!(
    /// n-arm best-arm probability grid (the `narm-bounds` figure input).
    NarmBoundsRow {
        u_vector_id: String,
        arm: usize,
        x: u64,
        lower: f64,
        upper: f64,
        exact: f64,
        monte_carlo: f64,
        mc_stderr: f64,
        flags: String,
    }
);

csv_row!(
    /// `narm-bounds` experiment rows: the figure schema with run columns.
    NarmRunRow {
        replicate: u64,
        seed: u64,
        u_vector_id: String,
        arm: usize,
        x: u64,
        lower: f64,
        upper: f64,
        exact: f64,
        monte_carlo: f64,
        mc_stderr: f64,
        flags: String,
    }
);

csv_row!(
    /// `deterministic-search`: one row per replicate.
    DeterministicRow {
        replicate: u64,
        seed: u64,
        n: usize,
        winner: usize,
        round_robin_winner: usize,
        round_robin_queries: u64,
        random_search_hold: u64,
    }
);

csv_row!(
    /// Two-arm majority lower bound against `x` (`two-arm-lower` figure).
    TwoArmLowerRow {
        u_i: f64,
        u_j: f64,
        x: u64,
        lower_bound: f64,
        exact: f64,
        precondition: bool,
    }
);

csv_row!(
    /// Win-count curves (`at-most` and `at-least` figures): bound and exact
    /// probability that arm `i` wins at most / at least `t` of `x` draws.
    /// `lower_bound` is empty where the bound is undefined.
    WinCountRow {
        u_i: f64,
        u_j: f64,
        t: u64,
        x: u64,
        lower_bound: Option<f64>,
        exact: f64,
        precondition: bool,
    }
);

csv_row!(
    /// Stationary and mixing analysis of one chain (`stationary` subcommand).
    StationaryRow {
        n: usize,
        x: u64,
        p_l: f64,
        p_u: f64,
        gamma: f64,
        pi_star_exact: f64,
        pi_star_lower: f64,
        pi_star_upper: f64,
        epsilon: f64,
        tau_eps_exact: Option<usize>,
        tau_eps_bound: f64,
    }
);

impl From<condorcet_core::markov::StationaryAnalysis> for StationaryRow {
    fn from(a: condorcet_core::markov::StationaryAnalysis) -> Self {
        Self {
            n: a.n,
            x: a.x,
            p_l: a.p_l,
            p_u: a.p_u,
            gamma: a.gamma,
            pi_star_exact: a.pi_star_exact,
            pi_star_lower: a.pi_star_lower,
            pi_star_upper: a.pi_star_upper,
            epsilon: a.epsilon,
            tau_eps_exact: a.tau_eps_exact,
            tau_eps_bound: a.tau_eps_bound,
        }
    }
}

/// Serializes rows, header first, even when `rows` is empty.
pub fn to_csv_bytes<T: CsvRow>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(T::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| LabError::Pool(e.to_string()))
}

pub fn write_csv<T: CsvRow>(path: &Path, rows: &[T]) -> Result<()> {
    write_bytes(path, &to_csv_bytes(rows)?)
}

pub fn write_csv_to<T: CsvRow, W: Write>(mut out: W, rows: &[T]) -> Result<()> {
    out.write_all(&to_csv_bytes(rows)?)
        .map_err(|e| LabError::io("<stdout>", e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_has_header() {
        let bytes = to_csv_bytes::<BudgetRow>(&[]).unwrap();
        assert_eq!(bytes, b"u_i,u_j,eps,bound,x_recommended,exact_success_prob\n");
    }

    #[test]
    fn optional_cells_are_empty() {
        let row = MmasHittingRow {
            replicate: 0,
            seed: 1,
            n: 2,
            rho: 0.1,
            tau_min: 0.01,
            threshold: 0.5,
            hitting_time: None,
            iterations: 10,
            final_tau_winner: 0.25,
            kernel: 1.5,
        };
        let text = String::from_utf8(to_csv_bytes(&[row]).unwrap()).unwrap();
        assert_eq!(text.lines().nth(1), Some("0,1,2,0.1,0.01,0.5,,10,0.25,1.5"));
    }
}
