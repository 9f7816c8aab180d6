//! Figure data: the n-arm best-arm probability grid and three two-arm
//! curves (majority lower bound, at-most-t wins, at-least-t wins). The
//! utility inputs are documented choices.

use std::path::{Path, PathBuf};

use condorcet_core::boosting::{
    at_least_wins_exact, at_least_wins_lower_bound, at_most_wins_exact, at_most_wins_lower_bound,
    majority_precondition,
};
use condorcet_core::tail::majority_probability;
use condorcet_core::{PlackettLuceModel, RngStream};

use crate::error::Result;
use crate::runner::narm_grid;
use crate::schema::{write_csv, NarmBoundsRow, TwoArmLowerRow, WinCountRow};

pub const NARM_SETS: [&[f64]; 2] = [&[6.0, 5.0, 4.0, 3.0, 2.0], &[16.0, 1.0, 1.0, 1.0, 1.0]];
pub const NARM_X_MAX: u64 = 30;
pub const PAIRS: [(f64, f64); 3] = [(2.0, 1.0), (3.0, 1.0), (10.0, 1.0)];
pub const TWO_ARM_X_MAX: u64 = 10;
pub const AT_MOST_T: [u64; 3] = [2, 4, 6];
pub const AT_LEAST_T: [u64; 3] = [1, 2, 3];

pub fn default_narm_sets() -> Vec<PlackettLuceModel> {
    NARM_SETS
        .iter()
        .map(|u| PlackettLuceModel::new(u.to_vec()).expect("positive defaults"))
        .collect()
}

pub fn narm_bounds_rows(seed: u64, mc_samples: u64) -> Result<Vec<NarmBoundsRow>> {
    narm_grid(&default_narm_sets(), NARM_X_MAX, mc_samples, &RngStream::new(seed, 0))
}

/// `1 - exp(-x (u_j - u_i)^2 / (2 (u_i + u_j)^2))` against the exact strict
/// majority probability. The flag records whether `x` is odd and the win
/// probability exceeds `(x+1)/(2x)`.
pub fn two_arm_lower_rows() -> Vec<TwoArmLowerRow> {
    let mut rows = Vec::new();
    for (u_i, u_j) in PAIRS {
        let p = u_i / (u_i + u_j);
        for x in 1..=TWO_ARM_X_MAX {
            let exponent = x as f64 * (u_j - u_i).powi(2) / (2.0 * (u_i + u_j).powi(2));
            rows.push(TwoArmLowerRow {
                u_i,
                u_j,
                x,
                lower_bound: -(-exponent).exp_m1(),
                exact: majority_probability(x, p),
                precondition: x % 2 == 1 && majority_precondition(p, x),
            });
        }
    }
    rows
}

fn pair_model(u_i: f64, u_j: f64) -> PlackettLuceModel {
    PlackettLuceModel::new(vec![u_i, u_j]).expect("positive defaults")
}

/// Markov bound on the stronger arm winning at most `t` draws. The flag
/// marks the non-vacuous region `x q < t`.
pub fn at_most_rows() -> Result<Vec<WinCountRow>> {
    let mut rows = Vec::new();
    for (u_i, u_j) in PAIRS {
        let u = pair_model(u_i, u_j);
        let q = u_i / (u_i + u_j);
        for t in AT_MOST_T {
            for x in 1..=TWO_ARM_X_MAX {
                rows.push(WinCountRow {
                    u_i,
                    u_j,
                    t,
                    x,
                    lower_bound: Some(at_most_wins_lower_bound(&u, 0, x, t)?),
                    exact: at_most_wins_exact(&u, 0, x, t)?,
                    precondition: (x as f64) * q < t as f64,
                });
            }
        }
    }
    Ok(rows)
}

/// Hoeffding bound on the stronger arm winning at least `t` draws, defined
/// for `t < x q`; empty elsewhere.
pub fn at_least_rows() -> Result<Vec<WinCountRow>> {
    let mut rows = Vec::new();
    for (u_i, u_j) in PAIRS {
        let u = pair_model(u_i, u_j);
        for t in AT_LEAST_T {
            for x in 1..=TWO_ARM_X_MAX {
                let bound = at_least_wins_lower_bound(&u, 0, x, t).ok();
                rows.push(WinCountRow {
                    u_i,
                    u_j,
                    t,
                    x,
                    lower_bound: bound,
                    exact: at_least_wins_exact(&u, 0, x, t)?,
                    precondition: bound.is_some(),
                });
            }
        }
    }
    Ok(rows)
}

pub const NARM_FILE: &str = "narm_bounds.csv";
pub const TWO_ARM_FILE: &str = "two_arm_lower.csv";
pub const AT_MOST_FILE: &str = "at_most.csv";
pub const AT_LEAST_FILE: &str = "at_least.csv";

pub fn reproduce_figure_narm_bounds(out_dir: &Path, seed: u64, mc_samples: u64) -> Result<Vec<PathBuf>> {
    let path = out_dir.join(NARM_FILE);
    write_csv(&path, &narm_bounds_rows(seed, mc_samples)?)?;
    Ok(vec![path])
}

pub fn reproduce_appendix_figures(out_dir: &Path) -> Result<Vec<PathBuf>> {
    let paths = [TWO_ARM_FILE, AT_MOST_FILE, AT_LEAST_FILE].map(|f| out_dir.join(f));
    write_csv(&paths[0], &two_arm_lower_rows())?;
    write_csv(&paths[1], &at_most_rows()?)?;
    write_csv(&paths[2], &at_least_rows()?)?;
    Ok(paths.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_arm_curves_non_decreasing() {
        let rows = two_arm_lower_rows();
        for pair in rows.windows(2) {
            if pair[0].u_i == pair[1].u_i {
                assert!(pair[1].lower_bound >= pair[0].lower_bound);
            }
        }
        for r in rows.iter().filter(|r| r.precondition) {
            assert!(r.exact >= r.lower_bound);
        }
    }

    #[test]
    fn win_count_curves_monotone() {
        let most = at_most_rows().unwrap();
        for pair in most.windows(2) {
            if (pair[0].u_i, pair[0].t) == (pair[1].u_i, pair[1].t) {
                assert!(pair[1].lower_bound.unwrap() < pair[0].lower_bound.unwrap());
            }
        }
        let least = at_least_rows().unwrap();
        for pair in least.windows(2) {
            if (pair[0].u_i, pair[0].t) == (pair[1].u_i, pair[1].t) {
                if let (Some(a), Some(b)) = (pair[0].lower_bound, pair[1].lower_bound) {
                    assert!(b > a);
                }
            }
        }
        for r in most.iter().chain(&least) {
            if let Some(b) = r.lower_bound {
                assert!(r.exact >= b - 1e-12, "{r:?}");
            }
        }
    }

    #[test]
    fn larger_top_gap_dominates() {
        let rows = narm_bounds_rows(1, 0).unwrap();
        let exact = |id: &str, x: u64| {
            rows.iter()
                .find(|r| r.u_vector_id == id && r.arm == 0 && r.x == x)
                .unwrap()
                .exact
        };
        for x in 1..=NARM_X_MAX {
            assert!(exact("16-1-1-1-1", x) > exact("6-5-4-3-2", x), "x={x}");
        }
        assert_eq!(rows.len(), 2 * 5 * 30);
    }
}
