//! Boosting a duel by repetition under the Plackett-Luce model.
//!
//! Two-arm results: how many duels make the stronger arm win the majority
//! with a target probability, Hoeffding-style bounds on the majority outcome,
//! and the effect of best-of-x queries on the stationary ratio of the
//! two-arm EA chain. n-arm results: bounds and an exact oracle for the
//! probability that one arm collects strictly the most wins in `x` set-winner
//! draws.

use rand::Rng;
use serde::Serialize;

use crate::error::{check_open_unit, Error, Result};
use crate::preference::{categorical, PlackettLuceModel};
use crate::tail::{binomial_lower_tail, binomial_pmf, binomial_upper_tail, majority_probability};

/// A real-valued duel budget and the odd number of duels to actually play.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuelBudget {
    pub bound: f64,
    /// Smallest odd integer `>= bound` (at least 1).
    pub recommended_x: u64,
    /// Whether the winning probability exceeds `(x+1)/(2x)` at
    /// `recommended_x`, the condition under which the bound is proven.
    pub precondition_holds: bool,
}

impl DuelBudget {
    fn new(bound: f64, win_probability: f64) -> Self {
        let recommended_x = smallest_odd_at_least(bound);
        Self {
            bound,
            recommended_x,
            precondition_holds: majority_precondition(win_probability, recommended_x),
        }
    }
}

pub fn smallest_odd_at_least(bound: f64) -> u64 {
    if !(bound > 1.0) {
        return 1;
    }
    let c = bound.ceil() as u64;
    if c % 2 == 1 {
        c
    } else {
        c + 1
    }
}

/// `p > (x+1)/(2x)`.
pub fn majority_precondition(p: f64, x: u64) -> bool {
    let x = x as f64;
    p > (x + 1.0) / (2.0 * x)
}

fn check_order(u_i: f64, u_j: f64) -> Result<()> {
    if u_i > u_j && u_j > 0.0 && u_i.is_finite() {
        Ok(())
    } else {
        Err(Error::UtilityOrder { u_i, u_j })
    }
}

/// `(u_i + u_j)^2 / (u_i - u_j)^2`.
fn gap_factor(u_i: f64, u_j: f64) -> f64 {
    let r = (u_i + u_j) / (u_i - u_j);
    r * r
}

/// Duels needed for the stronger arm to win the majority with probability at
/// least `1 - epsilon`: `2 (u_i+u_j)^2/(u_j-u_i)^2 ln(1/epsilon)`.
pub fn sufficient_duels_two_arms(u_i: f64, u_j: f64, epsilon: f64) -> Result<DuelBudget> {
    check_order(u_i, u_j)?;
    check_open_unit("epsilon", epsilon)?;
    let bound = 2.0 * gap_factor(u_i, u_j) * (1.0 / epsilon).ln();
    Ok(DuelBudget::new(bound, u_i / (u_i + u_j)))
}

/// The same budget in terms of a loss probability `p`:
/// `2 (1/(1-2p))^2 ln(1/epsilon)`.
pub fn sufficient_duels_gap(p: f64, epsilon: f64) -> Result<DuelBudget> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            reason: "must lie in (0, 1/2)",
        });
    }
    check_open_unit("epsilon", epsilon)?;
    let r = 1.0 / (1.0 - 2.0 * p);
    Ok(DuelBudget::new(2.0 * r * r * (1.0 / epsilon).ln(), 1.0 - p))
}

fn check_majority_inputs(u_i: f64, u_j: f64, x: u64) -> Result<f64> {
    check_order(u_i, u_j)?;
    if x % 2 == 0 {
        return Err(Error::EvenX(x));
    }
    let p = u_i / (u_i + u_j);
    if !majority_precondition(p, x) {
        return Err(Error::Precondition(format!(
            "win probability {p} does not exceed (x+1)/(2x) for x = {x}"
        )));
    }
    Ok(p)
}

fn hoeffding_exponent(u_i: f64, u_j: f64, x: u64) -> f64 {
    x as f64 * (u_j - u_i).powi(2) / (2.0 * (u_i + u_j).powi(2))
}

/// Lower bound on the stronger arm winning at least `(x+1)/2` of `x` duels,
/// `1 - exp(-x (u_j-u_i)^2 / (2 (u_i+u_j)^2))`.
pub fn win_majority_lower_bound(u_i: f64, u_j: f64, x: u64) -> Result<f64> {
    check_majority_inputs(u_i, u_j, x)?;
    Ok(-(-hoeffding_exponent(u_i, u_j, x)).exp_m1())
}

/// Upper bound on the weaker arm winning the majority, the complement of
/// [`win_majority_lower_bound`].
pub fn losing_majority_upper_bound(u_i: f64, u_j: f64, x: u64) -> Result<f64> {
    check_majority_inputs(u_i, u_j, x)?;
    Ok((-hoeffding_exponent(u_i, u_j, x)).exp())
}

/// Duels per query so that the boosted two-arm chain has `pi_1/pi_2 > gamma`:
/// `2 (u_1+u_2)^2/(u_1-u_2)^2 ln(gamma + 1)`.
pub fn duels_for_stationary_ratio(u_1: f64, u_2: f64, gamma: f64) -> Result<DuelBudget> {
    check_order(u_1, u_2)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
            reason: "must be positive",
        });
    }
    let bound = 2.0 * gap_factor(u_1, u_2) * gamma.ln_1p();
    Ok(DuelBudget::new(bound, u_1 / (u_1 + u_2)))
}

/// Exact `pi_1/pi_2` of the two-arm EA chain under best-of-x queries. By
/// detailed balance this is `q / (1 - q)` with `q` the majority probability.
pub fn exact_two_arm_stationary_ratio(u_1: f64, u_2: f64, x: u64) -> Result<f64> {
    if x % 2 == 0 {
        return Err(Error::EvenX(x));
    }
    let p_weak = u_2 / (u_1 + u_2);
    let lose = majority_probability(x, p_weak);
    Ok((1.0 - lose) / lose)
}

/// `pi_1/pi_2` under best-of-3 queries,
/// `(3 u_1^2 u_2 + u_1^3) / (3 u_1 u_2^2 + u_2^3)`.
pub fn best_of_three_ratio(u_1: f64, u_2: f64) -> Result<f64> {
    check_order(u_1, u_2)?;
    Ok((3.0 * u_1 * u_1 * u_2 + u_1.powi(3)) / (3.0 * u_1 * u_2 * u_2 + u_2.powi(3)))
}

/// How the Condorcet boosting budget is parameterised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CondorcetBudget {
    /// `x = (1/2)(1/delta)^2 ln(n/epsilon)`, the `epsilon` standing in for
    /// the vanishing term of the asymptotic statement.
    TargetError { epsilon: f64 },
    /// `x = (1/delta)^2 ln(n)`.
    LogN,
}

/// Duels per query for a winner with margin `delta` over 1/2 against every
/// other arm.
pub fn boost_budget_condorcet(delta: f64, n: usize, variant: CondorcetBudget) -> Result<DuelBudget> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            reason: "must lie in (0, 1/2)",
        });
    }
    if n < 2 {
        return Err(Error::Dimension(format!("{n} arms")));
    }
    let inv2 = (1.0 / delta).powi(2);
    let bound = match variant {
        CondorcetBudget::TargetError { epsilon } => {
            check_open_unit("epsilon", epsilon)?;
            0.5 * inv2 * (n as f64 / epsilon).ln()
        }
        CondorcetBudget::LogN => inv2 * (n as f64).ln(),
    };
    Ok(DuelBudget::new(bound, 0.5 + delta))
}

/// Bernoulli KL divergence `a ln(a/b) + (1-a) ln((1-a)/(1-b))`, with
/// `0 ln 0 = 0`.
pub fn bernoulli_kl(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::OutOfRange {
            name: "a",
            value: a,
            reason: "must lie in [0, 1]",
        });
    }
    check_open_unit("b", b)?;
    let term = |p: f64, q: f64| if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    Ok(term(a, b) + term(1.0 - a, 1.0 - b))
}

/// Condition markers attached to an evaluated bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BoundFlags {
    /// Sum terms whose KL argument fell outside `[0,1]`; skipped.
    pub kl_out_of_domain: u32,
    /// Terms whose `1/sqrt(8 k (1 - k/m))` prefactor has `k = 0`; skipped.
    pub degenerate_prefactor: u32,
    /// The summation range was empty.
    pub empty_sum: bool,
    /// The raw value left `[0,1]` and was clamped.
    pub clamped: bool,
    /// The raw value was positive but below 1e-300 and is reported as 0.
    pub underflow: bool,
}

impl BoundFlags {
    /// No term was skipped and no clamping happened.
    pub fn is_clear(&self) -> bool {
        self.kl_out_of_domain == 0 && self.degenerate_prefactor == 0 && !self.clamped
    }

    fn encode(&self, prefix: &str, out: &mut Vec<String>) {
        if self.kl_out_of_domain > 0 {
            out.push(format!("{prefix}_kl_domain={}", self.kl_out_of_domain));
        }
        if self.degenerate_prefactor > 0 {
            out.push(format!("{prefix}_degenerate={}", self.degenerate_prefactor));
        }
        if self.empty_sum {
            out.push(format!("{prefix}_empty_sum"));
        }
        if self.clamped {
            out.push(format!("{prefix}_clamped"));
        }
        if self.underflow {
            out.push(format!("{prefix}_underflow"));
        }
    }

    fn finish(&mut self, raw: f64) -> f64 {
        let mut v = raw;
        if !(0.0..=1.0).contains(&v) {
            self.clamped = true;
            v = v.clamp(0.0, 1.0);
        }
        if v > 0.0 && v < 1e-300 {
            self.underflow = true;
            v = 0.0;
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub lower_flags: BoundFlags,
    pub upper_flags: BoundFlags,
}

impl BoundPair {
    /// Semicolon-separated flag list, `none` when empty.
    pub fn flags_label(&self) -> String {
        let mut parts = Vec::new();
        self.lower_flags.encode("lower", &mut parts);
        self.upper_flags.encode("upper", &mut parts);
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(";")
        }
    }

    pub fn both_clear(&self) -> bool {
        self.lower_flags.is_clear() && self.upper_flags.is_clear()
    }
}

/// Evaluates the upper and lower bound expressions for `Pr[arm i has the
/// most wins in x set-winner draws]` term by term:
///
/// ```text
/// upper = sum_{d=floor(x/|S|)+1}^{floor(x/2)} Bin(x,q)(d) prod_{j != i} exp(-(x-d) KL((d-1)/(x-d) || q)) r_j^(x-2d+1)
///       + exp(-x KL((x-floor(x/2)-1)/x || 1-q))
/// lower = sum_d Bin(x,q)(d) prod_{j != i} [8(d-1)(1-(d-1)/(x-d))]^(-1/2) exp(-(x-d) KL(...)) r_j^(x-d)
///       + [8 k (1 - k/x)]^(-1/2) exp(-x KL(k/x || 1-q)),   k = x - floor(x/2) - 1
/// ```
///
/// with `q = u_i / sum u`, `r_j = (sum u - u_i - u_j)/(sum u - u_j)`. Terms
/// whose KL argument leaves `[0,1]` or whose prefactor divides by zero are
/// skipped and counted in the flags.
pub fn n_arm_best_prob_bounds(u: &PlackettLuceModel, i: usize, x: u64) -> Result<BoundPair> {
    let s = u.n();
    if s < 2 {
        return Err(Error::EmptySubset(s));
    }
    if i >= s {
        return Err(Error::ArmOutOfRange { arm: i, n: s });
    }
    if x == 0 {
        return Err(Error::Precondition("x must be at least 1".into()));
    }
    let utilities = u.utilities();
    let total: f64 = utilities.iter().sum();
    let q = utilities[i] / total;
    let rest = 1.0 - q;
    let xf = x as f64;

    let mut lower_flags = BoundFlags::default();
    let mut upper_flags = BoundFlags::default();
    let d_lo = x / s as u64 + 1;
    let d_hi = x / 2;
    if d_lo > d_hi {
        lower_flags.empty_sum = true;
        upper_flags.empty_sum = true;
    }

    let mut upper_sum = 0.0;
    let mut lower_sum = 0.0;
    for d in d_lo..=d_hi {
        let df = d as f64;
        let base = binomial_pmf(x, d, q);
        let a = (df - 1.0) / (xf - df);
        let Ok(kl) = bernoulli_kl(a, q) else {
            lower_flags.kl_out_of_domain += 1;
            upper_flags.kl_out_of_domain += 1;
            continue;
        };
        let decay = (-(xf - df) * kl).exp();
        let ratios = (0..s).filter(|&j| j != i).map(|j| {
            let uj = utilities[j];
            (total - utilities[i] - uj).max(0.0) / (total - uj)
        });

        let upper_prod: f64 = ratios.clone().map(|r| decay * r.powf(xf - 2.0 * df + 1.0)).product();
        upper_sum += base * upper_prod;

        let prefactor_arg = 8.0 * (df - 1.0) * (1.0 - a);
        if prefactor_arg <= 0.0 {
            lower_flags.degenerate_prefactor += 1;
            continue;
        }
        let pre = 1.0 / prefactor_arg.sqrt();
        let lower_prod: f64 = ratios.map(|r| pre * decay * r.powf(xf - df)).product();
        lower_sum += base * lower_prod;
    }

    let k = (x - x / 2 - 1) as f64;
    let tail_exp = match bernoulli_kl(k / xf, rest) {
        Ok(kl) => Some((-xf * kl).exp()),
        Err(_) => {
            lower_flags.kl_out_of_domain += 1;
            upper_flags.kl_out_of_domain += 1;
            None
        }
    };
    if let Some(e) = tail_exp {
        upper_sum += e;
        let arg = 8.0 * k * (1.0 - k / xf);
        if arg > 0.0 {
            lower_sum += e / arg.sqrt();
        } else {
            lower_flags.degenerate_prefactor += 1;
        }
    }

    Ok(BoundPair {
        lower: lower_flags.finish(lower_sum),
        upper: upper_flags.finish(upper_sum),
        lower_flags,
        upper_flags,
    })
}

/// Largest instance accepted by [`n_arm_best_prob_exact`].
pub const EXACT_MAX_ARMS: usize = 16;
pub const EXACT_MAX_DRAWS: u64 = 400;

/// Exact probability that arm `i` collects strictly more wins than every
/// other arm in `x` independent set-winner draws over all arms of `u`.
///
/// Conditions on arm `i`'s win count `d`; the remaining `x - d` draws are
/// multinomial over the competitors, and the probability that all of them
/// stay below `d` is computed by a DP that peels off one competitor at a time
/// with a conditional binomial split.
pub fn n_arm_best_prob_exact(u: &PlackettLuceModel, i: usize, x: u64) -> Result<f64> {
    let s = u.n();
    if s < 2 {
        return Err(Error::EmptySubset(s));
    }
    if i >= s {
        return Err(Error::ArmOutOfRange { arm: i, n: s });
    }
    if s > EXACT_MAX_ARMS || x > EXACT_MAX_DRAWS {
        return Err(Error::ResourceLimit(format!(
            "{s} arms / {x} draws exceeds {EXACT_MAX_ARMS} arms / {EXACT_MAX_DRAWS} draws"
        )));
    }
    let utilities = u.utilities();
    let total: f64 = utilities.iter().sum();
    let q = utilities[i] / total;
    let competitors: Vec<f64> = (0..s).filter(|&j| j != i).map(|j| utilities[j]).collect();

    let mut prob = 0.0;
    for d in 1..=x {
        let p_d = binomial_pmf(x, d, q);
        if p_d == 0.0 {
            continue;
        }
        prob += p_d * all_below(&competitors, x - d, d);
    }
    Ok(prob.min(1.0))
}

/// `Pr[every competitor gets < cap of m draws]`, draws multinomial with
/// weights proportional to `weights`.
fn all_below(weights: &[f64], m: u64, cap: u64) -> f64 {
    let m = m as usize;
    // h[r] = Pr[the competitors not yet peeled all stay below cap | r draws among them].
    let last = weights.len() - 1;
    let mut h: Vec<f64> = (0..=m).map(|r| if (r as u64) < cap { 1.0 } else { 0.0 }).collect();
    let mut remaining_weight = weights[last];
    for k in (0..last).rev() {
        remaining_weight += weights[k];
        let share = weights[k] / remaining_weight;
        let next: Vec<f64> = (0..=m)
            .map(|r| {
                let top = (cap as usize).min(r + 1);
                (0..top)
                    .map(|c| binomial_pmf(r as u64, c as u64, share) * h[r - c])
                    .sum()
            })
            .collect();
        h = next;
    }
    h[m]
}

/// Monte Carlo estimate of the per-arm strict-best probabilities: counts of
/// samples in which each arm had strictly the most wins among `x` draws.
pub fn n_arm_best_counts_monte_carlo<R: Rng + ?Sized>(
    u: &PlackettLuceModel,
    x: u64,
    samples: u64,
    rng: &mut R,
) -> Vec<u64> {
    let s = u.n();
    let utilities = u.utilities();
    let total: f64 = utilities.iter().sum();
    let mut best = vec![0u64; s];
    let mut wins = vec![0u64; s];
    for _ in 0..samples {
        wins.iter_mut().for_each(|w| *w = 0);
        for _ in 0..x {
            wins[categorical(utilities.iter().copied().enumerate(), total, rng)] += 1;
        }
        let top = *wins.iter().max().expect("non-empty");
        let mut leaders = wins.iter().enumerate().filter(|(_, &w)| w == top);
        let (leader, _) = leaders.next().expect("non-empty");
        if leaders.next().is_none() {
            best[leader] += 1;
        }
    }
    best
}

/// Markov lower bound on arm `i` winning at most `t` of `x` draws,
/// `1 - x q / t`; negative (vacuous) once `x q >= t`.
pub fn at_most_wins_lower_bound(u: &PlackettLuceModel, i: usize, x: u64, t: u64) -> Result<f64> {
    let q = share(u, i)?;
    if t == 0 {
        return Err(Error::Precondition("t must be positive".into()));
    }
    Ok(1.0 - x as f64 * q / t as f64)
}

/// Hoeffding lower bound on arm `i` winning at least `t` of `x` draws,
/// `1 - exp(-2 (x q - t)^2 / x)`, valid for `t < x q`.
pub fn at_least_wins_lower_bound(u: &PlackettLuceModel, i: usize, x: u64, t: u64) -> Result<f64> {
    let q = share(u, i)?;
    let xf = x as f64;
    let gap = xf * q - t as f64;
    if x == 0 || gap <= 0.0 {
        return Err(Error::Precondition(format!("need t < x q (t = {t}, x q = {})", xf * q)));
    }
    Ok(-(-2.0 * gap * gap / xf).exp_m1())
}

/// Exact `Pr[arm i wins at most t of x draws]`.
pub fn at_most_wins_exact(u: &PlackettLuceModel, i: usize, x: u64, t: u64) -> Result<f64> {
    let q = share(u, i)?;
    Ok(binomial_lower_tail(x, t, q))
}

/// Exact `Pr[arm i wins at least t of x draws]`.
pub fn at_least_wins_exact(u: &PlackettLuceModel, i: usize, x: u64, t: u64) -> Result<f64> {
    let q = share(u, i)?;
    Ok(binomial_upper_tail(x, t, q))
}

fn share(u: &PlackettLuceModel, i: usize) -> Result<f64> {
    if i >= u.n() {
        return Err(Error::ArmOutOfRange { arm: i, n: u.n() });
    }
    Ok(u.utilities()[i] / u.utilities().iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn pl(u: &[f64]) -> PlackettLuceModel {
        PlackettLuceModel::new(u.to_vec()).unwrap()
    }

    #[test]
    fn two_arm_budget_examples() {
        let b = sufficient_duels_two_arms(3.0, 1.0, 0.05).unwrap();
        assert!((b.bound - 23.965_858_188_431_927).abs() < 1e-9);
        assert_eq!(b.recommended_x, 25);
        assert!(b.precondition_holds);
        assert!(majority_probability(25, 0.75) >= 0.95);

        let b = sufficient_duels_two_arms(3.0, 1.0, 1.0 - 1e-9).unwrap();
        assert!(b.bound < 1e-7);
        assert_eq!(b.recommended_x, 1);

        assert!(matches!(sufficient_duels_two_arms(1.0, 3.0, 0.1), Err(Error::UtilityOrder { .. })));
        assert!(sufficient_duels_two_arms(3.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn gap_budget_examples() {
        let b = sufficient_duels_gap(0.25, 0.1).unwrap();
        assert!((b.bound - 18.420_680_743_952_367).abs() < 1e-9);
        assert_eq!(b.recommended_x, 19);
        let b = sufficient_duels_gap(1e-6, 0.1).unwrap();
        assert!((b.bound - 4.605_17).abs() < 1e-3);
        assert_eq!(b.recommended_x, 5);
        for &(p, eps) in &[(0.1, 0.2), (0.3, 0.01), (0.45, 0.5)] {
            let a = sufficient_duels_gap(p, eps).unwrap();
            let b = sufficient_duels_two_arms(1.0 - p, p, eps).unwrap();
            assert!((a.bound - b.bound).abs() < 1e-9 * a.bound);
        }
        assert!(sufficient_duels_gap(0.5, 0.1).is_err());
    }

    #[test]
    fn majority_bound_examples() {
        let lo = win_majority_lower_bound(3.0, 1.0, 11).unwrap();
        assert!((lo - (1.0 - (-1.375f64).exp())).abs() < 1e-15);
        assert!((lo - 0.7472).abs() < 1e-4);
        assert!(majority_probability(11, 0.75) >= lo);
        assert!((majority_probability(11, 0.75) - 0.9657).abs() < 1e-4);

        let hi = losing_majority_upper_bound(3.0, 1.0, 11).unwrap();
        assert!((hi - 0.2528).abs() < 1e-4);
        assert!(majority_probability(11, 0.25) <= hi);
        assert!((majority_probability(11, 0.25) - 0.0343).abs() < 1e-4);
        assert!((lo + hi - 1.0).abs() < 1e-15);

        assert!(1.0 - win_majority_lower_bound(3.0, 1.0, 10_001).unwrap() < 1e-100);
        assert_eq!(win_majority_lower_bound(3.0, 1.0, 4), Err(Error::EvenX(4)));
        // 0.55 <= (1+1)/2 = 1 at x = 1.
        assert!(matches!(win_majority_lower_bound(1.1, 0.9, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn stationary_ratio_budget() {
        let b = duels_for_stationary_ratio(3.0, 1.0, 3.0).unwrap();
        assert!((b.bound - 11.090_354_888_959_125).abs() < 1e-9);
        assert_eq!(b.recommended_x, 13);
        let ratio = exact_two_arm_stationary_ratio(3.0, 1.0, 13).unwrap();
        let q = majority_probability(13, 0.75);
        assert!((ratio - q / (1.0 - q)).abs() < 1e-9);
        assert!(ratio > 3.0);
        assert!((ratio - 40.17).abs() < 0.01, "{ratio}");

        // gamma = u_1/u_2 reproduces the ln((u_1+u_2)/u_2) form.
        let (u1, u2) = (5.0, 2.0);
        let b = duels_for_stationary_ratio(u1, u2, u1 / u2).unwrap();
        let direct = 2.0 * (u1 + u2) * (u1 + u2) / ((u2 - u1) * (u2 - u1)) * ((u1 + u2) / u2).ln();
        assert!((b.bound - direct).abs() < 1e-12);
    }

    #[test]
    fn best_of_three() {
        assert!((best_of_three_ratio(2.0, 1.0).unwrap() - 20.0 / 7.0).abs() < 1e-15);
        assert!((best_of_three_ratio(1.0 + 1e-12, 1.0).unwrap() - 1.0).abs() < 1e-10);
        assert!(best_of_three_ratio(1.0, 1.0).is_err());
        let exact = exact_two_arm_stationary_ratio(2.0, 1.0, 3).unwrap();
        assert!((exact - 20.0 / 7.0).abs() < 1e-13);
    }

    #[test]
    fn condorcet_budget_examples() {
        let b = boost_budget_condorcet(0.1, 10, CondorcetBudget::LogN).unwrap();
        assert!((b.bound - 230.258_509_299_404_6).abs() < 1e-9);
        assert_eq!(b.recommended_x, 231);
        let b = boost_budget_condorcet(0.1, 10, CondorcetBudget::TargetError { epsilon: 0.1 }).unwrap();
        assert!((b.bound - 230.258_509_299_404_6).abs() < 1e-9);
        assert_eq!(b.recommended_x, 231);
        assert!(boost_budget_condorcet(0.5, 10, CondorcetBudget::LogN).is_err());
    }

    #[test]
    fn kl_examples() {
        assert_eq!(bernoulli_kl(0.3, 0.3).unwrap(), 0.0);
        assert!((bernoulli_kl(0.5, 0.25).unwrap() - 0.143_841_036_225_890_1).abs() < 1e-15);
        assert!((bernoulli_kl(1.0, 0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(bernoulli_kl(0.5, 1.0).is_err());
        assert!(bernoulli_kl(1.5, 0.5).is_err());
    }

    #[test]
    fn exact_n_arm_examples() {
        assert!((n_arm_best_prob_exact(&pl(&[1.0, 1.0]), 0, 3).unwrap() - 0.5).abs() < 1e-15);
        assert!((n_arm_best_prob_exact(&pl(&[2.0, 1.0, 1.0]), 0, 3).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            n_arm_best_prob_exact(&pl(&[1.0, 1.0]), 0, 1000),
            Err(Error::ResourceLimit(_))
        ));
    }

    // Brute-force enumeration of every draw sequence; independent of the DP.
    fn enumerate_best(u: &[f64], i: usize, x: u32) -> f64 {
        let s = u.len();
        let total: f64 = u.iter().sum();
        let mut prob = 0.0;
        for code in 0..(s as u64).pow(x) {
            let mut c = code;
            let mut wins = vec![0; s];
            let mut p = 1.0;
            for _ in 0..x {
                let a = (c % s as u64) as usize;
                c /= s as u64;
                wins[a] += 1;
                p *= u[a] / total;
            }
            if (0..s).all(|j| j == i || wins[j] < wins[i]) {
                prob += p;
            }
        }
        prob
    }

    #[test]
    fn exact_n_arm_matches_enumeration() {
        for u in [vec![6.0, 5.0, 4.0, 3.0], vec![16.0, 1.0, 1.0], vec![1.0, 2.0, 3.0, 4.0, 5.0]] {
            for x in 1..=6 {
                for i in 0..u.len() {
                    let dp = n_arm_best_prob_exact(&pl(&u), i, x).unwrap();
                    let brute = enumerate_best(&u, i, x as u32);
                    assert!((dp - brute).abs() < 1e-13, "u={u:?} i={i} x={x}: {dp} vs {brute}");
                }
            }
        }
    }

    #[test]
    fn exact_n_arm_two_arms_is_majority() {
        for x in [1u64, 3, 9, 15] {
            let dp = n_arm_best_prob_exact(&pl(&[3.0, 2.0]), 0, x).unwrap();
            assert!((dp - majority_probability(x, 0.6)).abs() < 1e-13);
        }
    }

    #[test]
    fn monte_carlo_counts_agree() {
        let u = pl(&[6.0, 5.0, 4.0, 3.0, 2.0]);
        let mut rng = RngStream::new(31, 0);
        let n = 200_000;
        let counts = n_arm_best_counts_monte_carlo(&u, 9, n, &mut rng);
        for (i, &c) in counts.iter().enumerate() {
            let p = n_arm_best_prob_exact(&u, i, 9).unwrap();
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((c as f64 / n as f64 - p).abs() <= 3.0 * se, "arm {i}");
        }
    }

    #[test]
    fn bounds_edge_cases() {
        // x = 1: empty sum, only the tail term, whose lower prefactor is degenerate.
        let b = n_arm_best_prob_bounds(&pl(&[6.0, 5.0, 4.0]), 0, 1).unwrap();
        assert!(b.upper_flags.empty_sum && b.lower_flags.empty_sum);
        let kl = bernoulli_kl(0.0, 9.0 / 15.0).unwrap();
        assert!((b.upper - (-kl).exp()).abs() < 1e-15);
        assert_eq!(b.lower_flags.degenerate_prefactor, 1);
        assert_eq!(b.lower, 0.0);

        // Two arms: floor(x/2)+1 > floor(x/2), so only the tail term remains.
        let b = n_arm_best_prob_bounds(&pl(&[3.0, 1.0]), 0, 9).unwrap();
        let k = 9.0 - 4.0 - 1.0;
        let tail = (-9.0 * bernoulli_kl(k / 9.0, 0.25).unwrap()).exp();
        assert!((b.upper - tail).abs() < 1e-15);
        assert!(b.both_clear());
        assert_eq!(b.flags_label(), "lower_empty_sum;upper_empty_sum");

        let b = n_arm_best_prob_bounds(&pl(&[6.0, 5.0, 4.0, 3.0, 2.0]), 0, 30).unwrap();
        assert_eq!(b.flags_label(), "none");
    }

    #[test]
    fn bounds_stay_in_unit_interval() {
        for u in [vec![6.0, 5.0, 4.0, 3.0, 2.0], vec![16.0, 1.0, 1.0, 1.0, 1.0]] {
            for i in 0..5 {
                for x in 1..=30 {
                    let b = n_arm_best_prob_bounds(&pl(&u), i, x).unwrap();
                    assert!((0.0..=1.0).contains(&b.lower) && (0.0..=1.0).contains(&b.upper));
                }
            }
        }
    }

    #[test]
    fn win_count_curves() {
        let u = pl(&[3.0, 1.0]);
        let hi = at_most_wins_lower_bound(&u, 0, 2, 3).unwrap();
        assert!((hi - 0.5).abs() < 1e-15);
        assert!(at_most_wins_exact(&u, 0, 2, 3).unwrap() >= hi);
        let lo = at_least_wins_lower_bound(&u, 0, 8, 2).unwrap();
        assert!(at_least_wins_exact(&u, 0, 8, 2).unwrap() >= lo);
        assert!(at_least_wins_lower_bound(&u, 0, 2, 2).is_err());
    }
}
