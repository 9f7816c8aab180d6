//! Exact binomial probabilities, summed in log space.

use statrs::function::factorial::ln_binomial;

/// `ln Pr[Bin(trials, p) = k]`.
pub fn ln_binomial_pmf(trials: u64, k: u64, p: f64) -> f64 {
    if k > trials {
        return f64::NEG_INFINITY;
    }
    let ln_p = if k == 0 { 0.0 } else { k as f64 * p.ln() };
    let ln_q = if k == trials {
        0.0
    } else {
        (trials - k) as f64 * (-p).ln_1p()
    };
    ln_binomial(trials, k) + ln_p + ln_q
}

pub fn binomial_pmf(trials: u64, k: u64, p: f64) -> f64 {
    ln_binomial_pmf(trials, k, p).exp()
}

/// `Pr[Bin(trials, p) >= k]`. The side of the distribution not containing
/// the mean is summed directly and the other side by complement, so small
/// tails keep full relative precision.
pub fn binomial_upper_tail(trials: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > trials {
        return 0.0;
    }
    if (k as f64) <= trials as f64 * p {
        return 1.0 - log_sum_pmf(trials, 0..=k - 1, p);
    }
    log_sum_pmf(trials, k..=trials, p).min(1.0)
}

/// `Pr[Bin(trials, p) <= k]`.
pub fn binomial_lower_tail(trials: u64, k: u64, p: f64) -> f64 {
    if k >= trials {
        return 1.0;
    }
    if (k as f64) >= trials as f64 * p {
        return 1.0 - log_sum_pmf(trials, k + 1..=trials, p);
    }
    log_sum_pmf(trials, 0..=k, p).min(1.0)
}

fn log_sum_pmf(trials: u64, range: std::ops::RangeInclusive<u64>, p: f64) -> f64 {
    log_sum_exp(range.map(|y| ln_binomial_pmf(trials, y, p))).exp()
}

/// Probability that the side winning each duel with probability `p` takes a
/// strict majority of `trials` (odd) duels.
pub fn majority_probability(trials: u64, p: f64) -> f64 {
    // Exact by symmetry; the summed tail can land an ulp off and turn a tie
    // into a win.
    if p == 0.5 && trials % 2 == 1 {
        return 0.5;
    }
    binomial_upper_tail(trials, trials / 2 + 1, p)
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    #[test]
    fn fair_duels_stay_fair() {
        for x in (1..200).step_by(2) {
            assert_eq!(super::majority_probability(x, 0.5), 0.5);
        }
    }

    use super::*;

    // Direct product-form summation, independent of the log-space path.
    fn naive_upper(trials: u64, k: u64, p: f64) -> f64 {
        let mut total = 0.0;
        for y in k..=trials {
            let mut c = 1.0;
            for m in 0..y {
                c *= (trials - m) as f64 / (m + 1) as f64;
            }
            total += c * p.powi(y as i32) * (1.0 - p).powi((trials - y) as i32);
        }
        total
    }

    #[test]
    fn matches_naive_sum() {
        for &(n, k, p) in &[(3, 2, 2.0 / 3.0), (25, 13, 0.75), (11, 6, 0.25), (40, 17, 0.4)] {
            assert!((binomial_upper_tail(n, k, p) - naive_upper(n, k, p)).abs() < 1e-13);
        }
    }

    #[test]
    fn best_of_three_is_twenty_over_twenty_seven() {
        assert!((majority_probability(3, 2.0 / 3.0) - 20.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_probabilities() {
        assert_eq!(binomial_upper_tail(5, 3, 0.0), 0.0);
        assert!((binomial_upper_tail(5, 3, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(binomial_upper_tail(5, 0, 0.3), 1.0);
        assert_eq!(binomial_lower_tail(5, 5, 0.3), 1.0);
    }

    #[test]
    fn large_trial_counts_stay_finite() {
        let q = majority_probability(10_001, 0.51);
        assert!(q.is_finite() && q > 0.97 && q <= 1.0);
        assert!((majority_probability(10_001, 0.5) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn tails_complement() {
        let (n, k, p) = (17, 8, 0.37);
        assert!((binomial_lower_tail(n, k - 1, p) + binomial_upper_tail(n, k, p) - 1.0).abs() < 1e-13);
    }
}
