//! Numerical checks of the analytical claims, each returning a pass/fail
//! verdict with a one-line detail. The acceptance target runs them at full
//! scale; `selftest` runs reduced versions.

use std::time::{Duration, Instant};

use condorcet_core::boosting::{
    best_of_three_ratio, boost_budget_condorcet, duels_for_stationary_ratio, n_arm_best_counts_monte_carlo,
    n_arm_best_prob_bounds, n_arm_best_prob_exact, sufficient_duels_two_arms, CondorcetBudget,
};
use condorcet_core::heuristics::{
    default_burn_in, expected_next_pheromone, mmas_update, normalize, random_search, round_robin, run_ea, run_mmas,
    run_mmas_floor_race, FixedWinnerOracle, LoserRule, MmasParams, PheromoneVector,
};
use condorcet_core::markov::{
    coupled_step, exact_tv_curve, gamma_to_p, mixing_time_bound, stationary_bounds, stationary_condorcet_closed_form,
    stationary_distribution, total_variation, TransitionMatrix,
};
use condorcet_core::tail::majority_probability;
use condorcet_core::{PlackettLuceModel, PreferenceMatrix, QueryPolicy, RngStream};
use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::Result;
use crate::schema::NarmBoundsRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn timed(id: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; runtime {:.2}s over the {:.0}s limit", elapsed.as_secs_f64(), limit.as_secs_f64()));
        }
    }
    Check {
        id,
        passed,
        detail,
        elapsed,
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn winner_mass(m: &PreferenceMatrix, x: u64) -> Result<f64> {
    let p = TransitionMatrix::from_preferences(m, QueryPolicy::new(x)?)?;
    let w = m.condorcet_winner().unwrap_or(0);
    Ok(stationary_distribution(&p)?.pi[w])
}

pub fn gamma_equality() -> Check {
    timed("gamma-equality", secs(1), || {
        let mut worst = 0.0f64;
        for n in 2..=50 {
            for g in 1..=9 {
                let gamma = g as f64 / 10.0;
                let gap = gamma_to_p(gamma, n)?;
                let m = PreferenceMatrix::uniform_gap(n, 0, gap.p)?;
                let p = TransitionMatrix::from_preferences(&m, QueryPolicy::single())?;
                let pi = stationary_distribution(&p)?.pi[0];
                worst = worst.max((pi - (1.0 - gamma)).abs());
            }
        }
        Ok((worst <= 1e-10, format!("max |pi - (1 - gamma)| = {worst:.3e} over 441 chains")))
    })
}

/// How the random Condorcet matrices are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFamily {
    /// Winner losses uniform in (0.02, 0.48); every other pair uniform in
    /// (0.01, 0.99). Generally not reversible.
    General,
    /// Plackett-Luce matrices with the winner's losses in the same range.
    BradleyTerry,
}

/// `count` matrices with `n` uniform in 2..=50 and a uniformly placed winner.
pub fn random_condorcet_matrices(count: usize, family: MatrixFamily, seed: u64) -> Vec<PreferenceMatrix> {
    let mut rng = RngStream::new(seed, 0);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=50usize);
            let w = rng.random_range(0..n);
            let loss: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.48)).collect();
            match family {
                MatrixFamily::General => {
                    let rest: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.01..0.99)).collect();
                    PreferenceMatrix::from_upper(n, |i, j| {
                        if i == w {
                            1.0 - loss[j]
                        } else if j == w {
                            loss[i]
                        } else {
                            rest[i * n + j]
                        }
                    })
                    .expect("entries in (0,1)")
                }
                MatrixFamily::BradleyTerry => {
                    // u_w = 1 and u_i = l/(1-l) give M(i, w) = l.
                    let u: Vec<f64> = (0..n).map(|i| if i == w { 1.0 } else { loss[i] / (1.0 - loss[i]) }).collect();
                    PlackettLuceModel::new(u).expect("positive").to_matrix()
                }
            }
        })
        .collect()
}

pub const RANDOM_MATRIX_SEED: u64 = 0x5EED_0042;

/// With two arms the bounds coincide with the exact value, which the solver
/// reproduces only to the last bit.
pub const SANDWICH_ROUNDOFF: f64 = 1e-12;

pub fn stationary_sandwich(count: usize, family: MatrixFamily) -> Check {
    timed("stationary-sandwich", secs(10), || {
        let mut violations = 0;
        let mut tightest = f64::INFINITY;
        for m in random_condorcet_matrices(count, family, RANDOM_MATRIX_SEED) {
            let (w, p_l) = m.condorcet_gap().expect("has a winner");
            let p_u = (0..m.n()).filter(|&i| i != w).map(|i| m.get(i, w)).fold(1.0, f64::min);
            let b = stationary_bounds(p_l, p_u, m.n())?;
            let pi = winner_mass(&m, 1)?;
            if pi < b.lower - SANDWICH_ROUNDOFF || pi > b.upper + SANDWICH_ROUNDOFF {
                violations += 1;
            }
            tightest = tightest.min((pi - b.lower).min(b.upper - pi));
        }
        Ok((
            violations == 0,
            format!("{violations} of {count} outside [lower, upper]; smallest slack {tightest:.3e}"),
        ))
    })
}

pub fn closed_form_vs_solver(id: &'static str, count: usize, family: MatrixFamily) -> Check {
    timed(id, None, || {
        let mut worst = 0.0f64;
        let mut over = 0;
        for m in random_condorcet_matrices(count, family, RANDOM_MATRIX_SEED) {
            let err = (stationary_condorcet_closed_form(&m)? - winner_mass(&m, 1)?).abs();
            if err > 1e-10 {
                over += 1;
            }
            worst = worst.max(err);
        }
        Ok((
            over == 0,
            format!("{over} of {count} differ by more than 1e-10; max difference {worst:.3e}"),
        ))
    })
}

pub fn ea_occupancy(scale: Scale) -> Check {
    let iterations = scale.pick(1_000_000, 100_000);
    let tol = scale.pick(0.02, 0.05);
    timed("ea-occupancy", secs(30), move || {
        let results = [2usize, 5, 10]
            .par_iter()
            .map(|&n| -> Result<f64> {
                let mut rng = RngStream::new(0xEA, n as u64);
                let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..5.0)).collect();
                let m = PlackettLuceModel::new(u)?.to_matrix();
                let p = TransitionMatrix::from_preferences(&m, QueryPolicy::single())?;
                let pi = stationary_distribution(&p)?.pi;
                let run = run_ea(&m, QueryPolicy::single(), iterations, default_burn_in(n), &mut rng, 0)?;
                Ok(total_variation(&run.occupancy, &pi))
            })
            .collect::<Result<Vec<_>>>()?;
        let worst = results.iter().copied().fold(0.0, f64::max);
        Ok((
            worst <= tol,
            format!("TV for n = 2, 5, 10: {results:.4?} (limit {tol}, {iterations} iterations)"),
        ))
    })
}

pub fn mixing_bound() -> Check {
    timed("mixing-bound", None, || {
        let epsilons = [0.1, 0.01, 0.001];
        let mut chains: Vec<(String, PreferenceMatrix, u64)> = Vec::new();
        let mut rng = RngStream::new(0x313, 0);
        for n in [2usize, 3, 5, 10, 20, 50] {
            for p in [0.1, 0.3, 0.45] {
                chains.push((format!("gap n={n} p={p}"), PreferenceMatrix::uniform_gap(n, 0, p)?, 1));
            }
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
            let pl = PlackettLuceModel::new(u)?.to_matrix();
            chains.push((format!("pl n={n}"), pl.clone(), 1));
            chains.push((format!("pl n={n} x=3"), pl, 3));
            let upper: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.01..0.99)).collect();
            chains.push((
                format!("arbitrary n={n}"),
                PreferenceMatrix::from_upper(n, |i, j| upper[i * n + j])?,
                1,
            ));
        }
        let mut failures = Vec::new();
        let mut worst_ratio = 0.0f64;
        for (label, m, x) in &chains {
            let p = TransitionMatrix::from_preferences(m, QueryPolicy::new(*x)?)?;
            let horizon = mixing_time_bound(m.n(), 0.001)?.ceil() as usize + 1;
            let report = exact_tv_curve(&p, horizon, &epsilons)?;
            for e in &report.estimates {
                match e.tau {
                    Some(t) if t as f64 <= e.bound => worst_ratio = worst_ratio.max(t as f64 / e.bound),
                    _ => failures.push(format!("{label} eps={}", e.epsilon)),
                }
            }
        }
        let two = PreferenceMatrix::new(&[vec![1.0, 2.0 / 3.0], vec![1.0 / 3.0, 1.0]])?;
        let tau_two = exact_tv_curve(&TransitionMatrix::from_preferences(&two, QueryPolicy::single())?, 30, &[0.01])?
            .estimates[0]
            .tau;
        let passed = failures.is_empty() && tau_two == Some(7);
        Ok((
            passed,
            format!(
                "{} chains x 3 eps, violations {:?}, max tau/bound {worst_ratio:.3}; n=2 m=2/3 tau(0.01) = {tau_two:?}",
                chains.len(),
                failures
            ),
        ))
    })
}

pub fn coupling_rate(scale: Scale) -> Check {
    let trials = scale.pick(100_000u64, 20_000);
    timed("coupling-rate", None, move || {
        let mut parts = Vec::new();
        let mut passed = true;
        for n in [5usize, 10, 20] {
            let mut rng = RngStream::new(0xC0, n as u64);
            let upper: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.01..0.99)).collect();
            let m = PreferenceMatrix::from_upper(n, |i, j| upper[i * n + j])?;
            let mut met = 0u64;
            for _ in 0..trials {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n)) % n;
                let (x, y) = coupled_step(&m, a, b, &mut rng);
                if x == y {
                    met += 1;
                }
            }
            let p = 1.0 / n as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let freq = met as f64 / trials as f64;
            passed &= freq >= p - 3.0 * sigma;
            parts.push(format!("n={n}: {freq:.4} vs 1/n - 3sigma = {:.4}", p - 3.0 * sigma));
        }
        Ok((passed, parts.join(", ")))
    })
}

/// Chi-square goodness of fit of first-hold times against `Geo(1/n)` on
/// support `1, 2, ...`. Bins are single values while the expected count is at
/// least 5, plus one tail bin.
pub fn geometric_chi_square(samples: &[u64], n: usize) -> (f64, f64, usize) {
    let total = samples.len() as f64;
    let q = 1.0 - 1.0 / n as f64;
    let mut edges = Vec::new();
    let mut t = 1u64;
    loop {
        let expected = total * q.powi(t as i32 - 1) / n as f64;
        let tail = total * q.powi(t as i32);
        if expected < 5.0 || tail < 5.0 {
            break;
        }
        edges.push(t);
        t += 1;
    }
    let k = edges.len();
    let mut observed = vec![0u64; k + 1];
    for &s in samples {
        let idx = (s as usize).saturating_sub(1).min(k);
        observed[idx] += 1;
    }
    let mut stat = 0.0;
    for (idx, &o) in observed.iter().enumerate() {
        let expected = if idx < k {
            total * q.powi(idx as i32) / n as f64
        } else {
            total * q.powi(k as i32)
        };
        stat += (o as f64 - expected).powi(2) / expected;
    }
    let df = k;
    let critical = ChiSquared::new(df as f64).expect("df >= 1").inverse_cdf(0.99);
    (stat, critical, df)
}

pub fn deterministic_setting(scale: Scale) -> Check {
    let replicates = scale.pick(100_000u64, 10_000);
    timed("deterministic-setting", None, move || {
        let mut rr_bad = 0;
        let mut rr_runs = 0;
        for n in 2..=200usize {
            for w in 0..n {
                for rule in [
                    LoserRule::FirstListed,
                    LoserRule::LastListed,
                    LoserRule::LowestIndex,
                    LoserRule::HighestIndex,
                ] {
                    let mut oracle = FixedWinnerOracle::new(w, rule);
                    let out = round_robin(&mut oracle, n);
                    rr_runs += 1;
                    if out.queries != n as u64 - 1 || out.winner != w || oracle.queries() != n as u64 - 1 {
                        rr_bad += 1;
                    }
                }
            }
        }
        let mut parts = vec![format!("round-robin {rr_bad} of {rr_runs} runs off n-1")];
        let mut passed = rr_bad == 0;
        for n in [2usize, 10, 50] {
            let holds = (0..replicates)
                .into_par_iter()
                .map(|r| {
                    let mut rng = RngStream::new(0xD5 + n as u64, r);
                    let w = rng.random_range(0..n);
                    random_search(&mut FixedWinnerOracle::new(w, LoserRule::FirstListed), n, &mut rng, 1 << 40, 0)
                        .map(|run| run.first_hold)
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let (stat, critical, df) = geometric_chi_square(&holds, n);
            passed &= stat <= critical;
            parts.push(format!("Geo(1/{n}) chi2 = {stat:.2} (df {df}, critical {critical:.2})"));
        }
        Ok((passed, parts.join("; ")))
    })
}

pub fn duel_budgets(count: usize) -> Check {
    timed("duel-budgets", secs(5), move || {
        let mut rng = RngStream::new(0xB0, 0);
        let mut worst_margin = f64::INFINITY;
        let mut failures = 0;
        let mut accepted = 0;
        while accepted < count {
            let u_j = rng.random_range(0.1..10.0);
            let u_i = u_j * (1.0 + rng.random_range(0.05..10.0));
            let eps = rng.random_range(0.001..0.5);
            let b = sufficient_duels_two_arms(u_i, u_j, eps)?;
            if !b.precondition_holds {
                continue;
            }
            accepted += 1;
            let prob = majority_probability(b.recommended_x, u_i / (u_i + u_j));
            let margin = prob - (1.0 - eps);
            if margin < 0.0 {
                failures += 1;
            }
            worst_margin = worst_margin.min(margin);
        }
        Ok((
            failures == 0,
            format!("{failures} of {count} below 1 - eps; smallest margin {worst_margin:.3e}"),
        ))
    })
}

/// Ratio of the stronger arm's majority probability to the weaker arm's
/// over the eight outcomes of three duels.
fn best_of_three_enumeration(u1: f64, u2: f64) -> f64 {
    let p = u1 / (u1 + u2);
    let (mut win, mut lose) = (0.0, 0.0);
    for outcome in 0..8u32 {
        let wins = outcome.count_ones();
        let prob = p.powi(wins as i32) * (1.0 - p).powi(3 - wins as i32);
        if wins >= 2 {
            win += prob;
        } else {
            lose += prob;
        }
    }
    win / lose
}

pub fn best_of_three(count: usize) -> Check {
    timed("best-of-three", None, move || {
        let mut rng = RngStream::new(0xB3, 0);
        let (mut enum_err, mut chain_err) = (0.0f64, 0.0f64);
        for _ in 0..count {
            let u2 = rng.random_range(0.1..10.0);
            let u1 = u2 * (1.0 + rng.random_range(0.01..5.0));
            let formula = best_of_three_ratio(u1, u2)?;
            enum_err = enum_err.max((formula - best_of_three_enumeration(u1, u2)).abs() / formula);
            let m = PlackettLuceModel::new(vec![u1, u2])?.to_matrix();
            let pi = stationary_distribution(&TransitionMatrix::from_preferences(&m, QueryPolicy::new(3)?)?)?.pi;
            chain_err = chain_err.max((formula - pi[0] / pi[1]).abs() / formula.max(1.0));
        }
        Ok((
            enum_err <= 1e-12 && chain_err <= 1e-10,
            format!("{count} pairs: max relative gap to enumeration {enum_err:.2e}, to x=3 chain {chain_err:.2e}"),
        ))
    })
}

pub fn stationary_ratio_boost() -> Check {
    timed("stationary-ratio-boost", None, || {
        let mut failures = Vec::new();
        let mut points = 0;
        for (u1, u2) in [(1.5, 1.0), (2.0, 1.0), (3.0, 1.0), (5.0, 4.0), (10.0, 1.0)] {
            for gamma in [1.5, 2.0, 3.0, 5.0, 10.0, 100.0] {
                points += 1;
                let b = duels_for_stationary_ratio(u1, u2, gamma)?;
                let m = PlackettLuceModel::new(vec![u1, u2])?.to_matrix();
                let p = TransitionMatrix::from_preferences(&m, QueryPolicy::new(b.recommended_x)?)?;
                let pi = stationary_distribution(&p)?.pi;
                let ratio = pi[0] / pi[1];
                if ratio <= gamma {
                    failures.push(format!("({u1},{u2},{gamma}) x={} ratio={ratio:.4}", b.recommended_x));
                }
            }
        }
        Ok((failures.is_empty(), format!("{points} grid points, failures {failures:?}")))
    })
}

/// Returns `(x, pi_star)` for the desk-scale Condorcet boosting example.
pub fn condorcet_boost_example() -> Result<(u64, f64)> {
    let n = 5;
    let b = boost_budget_condorcet(0.1, n, CondorcetBudget::LogN)?;
    let m = PreferenceMatrix::uniform_gap(n, 0, 0.4)?;
    Ok((b.recommended_x, winner_mass(&m, b.recommended_x)?))
}

/// The acceptance threshold 0.99.
pub fn condorcet_boost_strict() -> Check {
    timed("condorcet-boost-0.99", None, || {
        let (x, pi) = condorcet_boost_example()?;
        Ok((
            pi >= 0.99,
            format!(
                "n=5 delta=0.1 x={x}: pi* = {pi:.6}, margin vs 0.99 = {:+.6}, margin vs 1 - 1/n = {:+.6}",
                pi - 0.99,
                pi - 0.8
            ),
        ))
    })
}

/// The `1 - c/n` form with `c = 1`.
pub fn condorcet_boost_order() -> Check {
    timed("condorcet-boost-order", None, || {
        let (x, pi) = condorcet_boost_example()?;
        Ok((pi >= 0.8, format!("n=5 x={x}: pi* = {pi:.6} >= 1 - 1/n")))
    })
}

pub const NARM_CHECK_UTILITIES: [f64; 5] = [6.0, 5.0, 4.0, 3.0, 2.0];

/// Exact oracle vs Monte Carlo for arm 0 of the prefixes of
/// [`NARM_CHECK_UTILITIES`] with `|S|` in 2..=5 and `x` in 1..=15, plus the
/// bound sandwich where both flags are clear. The grid rows are returned for
/// CSV output.
pub fn narm_agreement(samples: u64, seed: u64) -> (Check, Vec<NarmBoundsRow>) {
    let mut rows = Vec::new();
    let check = timed("narm-oracle-and-bounds", None, || {
        let points: Vec<(usize, u64)> = (2..=5).flat_map(|s| (1..=15u64).map(move |x| (s, x))).collect();
        let stream = RngStream::new(seed, 0);
        let results = points
            .par_iter()
            .enumerate()
            .map(|(k, &(s, x))| -> Result<(NarmBoundsRow, f64)> {
                let u = PlackettLuceModel::new(NARM_CHECK_UTILITIES[..s].to_vec())?;
                let exact = n_arm_best_prob_exact(&u, 0, x)?;
                let counts = n_arm_best_counts_monte_carlo(&u, x, samples, &mut stream.child(k as u64));
                let mc = counts[0] as f64 / samples as f64;
                let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
                let z = if sigma > 0.0 { (mc - exact).abs() / sigma } else if mc == exact { 0.0 } else { f64::INFINITY };
                let b = n_arm_best_prob_bounds(&u, 0, x)?;
                Ok((
                    NarmBoundsRow {
                        u_vector_id: crate::runner::utility_id(&u),
                        arm: 0,
                        x,
                        lower: b.lower,
                        upper: b.upper,
                        exact,
                        monte_carlo: mc,
                        mc_stderr: (mc * (1.0 - mc) / samples as f64).sqrt(),
                        flags: b.flags_label(),
                    },
                    z,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let max_z = results.iter().map(|r| r.1).fold(0.0, f64::max);
        let mc_fail = results.iter().filter(|r| r.1 > 3.0).count();
        rows = results.into_iter().map(|r| r.0).collect();
        let clear: Vec<&NarmBoundsRow> = rows.iter().filter(|r| r.flags == "none").collect();
        let sandwich_fail: Vec<String> = clear
            .iter()
            .filter(|r| !(r.lower <= r.exact && r.exact <= r.upper))
            .map(|r| {
                let side = if r.exact > r.upper { "above upper" } else { "below lower" };
                format!("{}@x={} {side}", r.u_vector_id, r.x)
            })
            .collect();
        Ok((
            mc_fail == 0 && sandwich_fail.is_empty(),
            format!(
                "{} points at {samples} samples: {mc_fail} beyond 3 sigma (max z {max_z:.2}); sandwich on {} flag-clear points, violations {:?}",
                rows.len(),
                clear.len(),
                sandwich_fail
            ),
        ))
    });
    (check, rows)
}

/// Pheromone vectors satisfying the update precondition: entries at least
/// `tau_min/(1+rho)`, summing to one.
pub fn pheromone_floor(count: usize) -> Check {
    timed("pheromone-floor", None, move || {
        let mut rng = RngStream::new(0x71, 0);
        let (mut sum_bad, mut floor_bad, mut accepted) = (0, 0, 0);
        let mut max_excess_ratio = 0.0f64;
        while accepted < count {
            let n = rng.random_range(2..=50usize);
            let rho = rng.random_range(1e-4..0.5);
            let tau_min = rng.random_range(1e-5..0.5);
            let base = tau_min / (1.0 + rho);
            if base * n as f64 >= 1.0 {
                continue;
            }
            accepted += 1;
            let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(3)).collect();
            let total: f64 = w.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            let slack = 1.0 - base * n as f64;
            let tau = normalize(w.iter().map(|v| base + slack * v / total).collect())?;
            let params = MmasParams::new(rho, tau_min)?;
            let raw = mmas_update(&tau, rng.random_range(0..n), &params);
            let sum: f64 = raw.iter().sum();
            let limit = 1.0 + params.max_normalizer_excess(n);
            if sum > limit + 1e-12 {
                sum_bad += 1;
            }
            if sum > 1.0 {
                max_excess_ratio = max_excess_ratio.max((sum - 1.0) / params.max_normalizer_excess(n));
            }
            if normalize(raw)?.min() < params.pheromone_floor(n) * (1.0 - 1e-12) {
                floor_bad += 1;
            }
        }
        Ok((
            sum_bad == 0 && floor_bad == 0,
            format!(
                "{count} tuples: {sum_bad} sums over 1 + 2 tau_min rho n, {floor_bad} below the floor; max excess/bound {max_excess_ratio:.3}"
            ),
        ))
    })
}

/// Pheromone vectors with the winner at `tau`: the rest either equal, or
/// half of them at `tau_min` and the remainder equal.
fn drift_vectors(n: usize, winner: usize, tau: f64, tau_min: f64) -> Vec<PheromoneVector> {
    let mut out = Vec::new();
    let rest = 1.0 - tau;
    let mut equal = vec![rest / (n - 1) as f64; n];
    equal[winner] = tau;
    out.push(normalize(equal).expect("positive"));
    let low = (n - 1) / 2;
    let high = n - 1 - low;
    let remaining = rest - low as f64 * tau_min;
    if low > 0 && remaining > tau_min * high as f64 {
        let mut skewed = vec![0.0; n];
        let mut k = 0;
        for (i, v) in skewed.iter_mut().enumerate() {
            if i == winner {
                *v = tau;
            } else {
                *v = if k < low { tau_min } else { remaining / high as f64 };
                k += 1;
            }
        }
        out.push(normalize(skewed).expect("positive"));
    }
    out
}

pub fn drift_inequality() -> Check {
    timed("mmas-drift", None, || {
        let (mut cases, mut failures) = (0, Vec::new());
        let mut min_slack = f64::INFINITY;
        for n in [3usize, 5, 10, 20] {
            for tau_min_scale in [1.0, 0.1] {
                let tau_min = tau_min_scale / (10.0 * n as f64);
                for rho_scale in [0.5, 0.1] {
                    let params = MmasParams::new(rho_scale / n as f64, tau_min)?;
                    for p in [0.01, 0.05, 0.1, 0.2, 0.25] {
                        let m = PreferenceMatrix::uniform_gap(n, 0, p)?;
                        let s = 2.0 * tau_min * n as f64;
                        let (lo, hi) = (tau_min / 2.0, 1.0 / 6.0);
                        for k in 1..=12 {
                            let tau = lo * (hi / lo).powf(k as f64 / 13.0);
                            for vector in drift_vectors(n, 0, tau, tau_min) {
                                let t = vector.get(0);
                                let drift = expected_next_pheromone(&vector, &m, &params, 0) - t;
                                let x_t = 1.0 - 2.0 * p - s - t;
                                let required = t * params.rho() * x_t / 2.0;
                                cases += 1;
                                min_slack = min_slack.min(drift - required);
                                if drift < required - 1e-15 {
                                    failures.push(format!("n={n} tau_min={tau_min} rho={} p={p} tau={t:.4}", params.rho()));
                                }
                            }
                        }
                    }
                }
            }
        }
        let shown: Vec<_> = failures.iter().take(3).collect();
        Ok((
            failures.is_empty(),
            format!("{cases} grid cases, {} violations {shown:?}; min slack {min_slack:.3e}", failures.len()),
        ))
    })
}

fn median(mut v: Vec<u64>) -> f64 {
    v.sort_unstable();
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2] as f64
    } else {
        (v[k / 2 - 1] + v[k / 2]) as f64 / 2.0
    }
}

/// Criteria whose stated claim does not hold for the implemented
/// quantities; each FAIL is expected and explained in the README.
pub const KNOWN_UNATTAINABLE: [&str; 3] = ["closed-form-general", "condorcet-boost-0.99", "narm-oracle-and-bounds"];

pub const HITTING_CONSTANT: f64 = 20.0;

pub fn mmas_hitting(scale: Scale) -> Check {
    let replicates = scale.pick(100u64, 20);
    timed("mmas-hitting-time", secs(120), move || {
        let n = 10;
        let tau_min = 0.001;
        let mut parts = Vec::new();
        let mut passed = true;
        for p in [0.05, 0.1, 0.25] {
            let m = PreferenceMatrix::uniform_gap(n, 0, p)?;
            let threshold = 1.0 - 3.0 * p - n as f64 * tau_min;
            let mut medians = Vec::new();
            for rho in [0.01, 0.005] {
                let params = MmasParams::new(rho, tau_min)?;
                params.check_drift_regime(n)?;
                let kernel = params.hitting_time_kernel(p);
                let cap = (100.0 * kernel) as u64;
                let times = (0..replicates)
                    .into_par_iter()
                    .map(|r| -> Result<Option<u64>> {
                        let mut rng = RngStream::new(0x73 + (rho * 1e4) as u64, r);
                        Ok(run_mmas(&m, &params, &mut rng, threshold, cap, 0)?.hitting_time)
                    })
                    .collect::<Result<Vec<_>>>()?;
                // Censored runs count as the cap, which can only raise the median.
                let times: Vec<u64> = times.into_iter().map(|t| t.unwrap_or(cap)).collect();
                let med = median(times);
                let limit = HITTING_CONSTANT * kernel;
                if rho == 0.01 {
                    passed &= med <= limit;
                    parts.push(format!("p={p}: median {med} <= {limit:.0}"));
                }
                medians.push(med);
            }
            let ratio = medians[1] / medians[0];
            passed &= (1.5..=3.0).contains(&ratio);
            parts.push(format!("halved-rho ratio {ratio:.2}"));
        }
        Ok((passed, parts.join(", ")))
    })
}

pub const FLOOR_RACE_TAU_MIN: f64 = 0.01;

/// Frequency with which arm `tracked` reaches `tau_min` before it is drawn.
pub fn floor_race_frequency(tau_min: f64, replicates: u64, seed: u64) -> Result<f64> {
    let n = 10;
    let params = MmasParams::new(0.1, tau_min)?;
    let m = PreferenceMatrix::uniform_gap(n, 0, 0.25)?;
    let hits = (0..replicates)
        .into_par_iter()
        .filter(|&r| run_mmas_floor_race(&m, &params, 3, &mut RngStream::new(seed, r), 1_000_000) == Some(true))
        .count();
    Ok(hits as f64 / replicates as f64)
}

pub fn floor_race(scale: Scale) -> Check {
    let replicates = scale.pick(10_000u64, 2_000);
    timed("floor-race", None, move || {
        let target = (-2.0f64).exp();
        let sigma = (target * (1.0 - target) / replicates as f64).sqrt();
        let freq = floor_race_frequency(FLOOR_RACE_TAU_MIN, replicates, 0x72)?;
        Ok((
            freq >= target - 3.0 * sigma,
            format!(
                "n=10 rho=0.1 tau_min={FLOOR_RACE_TAU_MIN}: frequency {freq:.4} vs exp(-2) - 3 sigma = {:.4}",
                target - 3.0 * sigma
            ),
        ))
    })
}

/// Writes the selftest CSVs twice under `dir` and compares them byte for byte.
pub fn determinism(dir: &std::path::Path) -> Check {
    timed("determinism", None, || {
        let seed = crate::selftest::SELFTEST_SEED;
        let a = crate::selftest::write_outputs(&dir.join("a"), seed)?;
        let b = crate::selftest::write_outputs(&dir.join("b"), seed)?;
        let mut differing = Vec::new();
        for (pa, pb) in a.iter().zip(&b) {
            let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| crate::error::LabError::io(p, e));
            if read(pa)? != read(pb)? {
                differing.push(pa.file_name().unwrap_or_default().to_string_lossy().into_owned());
            }
        }
        let _ = std::fs::remove_dir_all(dir);
        Ok((
            differing.is_empty() && a.len() == b.len(),
            format!("{} CSV files compared, differing {differing:?}", a.len()),
        ))
    })
}
