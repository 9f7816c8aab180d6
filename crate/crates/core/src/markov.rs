//! Exact analysis of the Markov chain induced by the (1+1) EA on a
//! preference matrix: transition kernel, stationary distribution, closed-form
//! bounds on the Condorcet winner's stationary mass, total-variation decay and
//! the shared-challenger coupling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{check_open_unit, Error, Result};
use crate::heuristics::ea;
use crate::preference::{PreferenceMatrix, QueryPolicy};
use crate::rng::RngStream;

/// Dense TV curves are computed only up to this many states.
pub const MAX_DENSE_STATES: usize = 2000;

/// Row-stochastic transition matrix of the incumbent chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    /// `P[i][j] = M_x(j,i)/n` for `i != j`, `P[i][i] = sum_j M_x(i,j)/n`, where
    /// `M_x` is the best-of-x matrix (the diagonal term counts the
    /// self-challenge through `M(i,i) = 1`).
    pub fn from_preferences(m: &PreferenceMatrix, policy: QueryPolicy) -> Result<Self> {
        let mx = m.boosted(policy.x())?;
        let n = mx.n();
        let inv = 1.0 / n as f64;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            let mut stay = 0.0;
            for j in 0..n {
                stay += mx.get(i, j);
                if i != j {
                    entries[i * n + j] = inv * mx.get(j, i);
                }
            }
            entries[i * n + i] = inv * stay;
        }
        Ok(Self { n, entries })
    }

    /// A general stochastic matrix; rows must be non-negative and sum to one
    /// within 1e-12.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("transition matrix must be square and non-empty".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            let sum: f64 = r.iter().sum();
            if r.iter().any(|&v| !(v >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Precondition(format!("row {i} is not a probability vector")));
            }
        }
        Ok(Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `dist * P`.
    pub fn step(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &w) in dist.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.row(i)) {
                *o += w * p;
            }
        }
        out
    }

    fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
    /// `max_j |(pi P)_j - pi_j|`.
    pub residual: f64,
}

/// Solves `pi P = pi`, `sum pi = 1` by a dense LU solve of `(P^T - I) pi = 0`
/// with the last equation replaced by the normalisation row.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<StationaryDistribution> {
    let n = p.n();
    let mut a = p.to_dmatrix().transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let solution = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let pi: Vec<f64> = solution.iter().copied().collect();
    let residual = max_abs_diff(&p.step(&pi), &pi);
    Ok(StationaryDistribution { pi, residual })
}

/// Power iteration from the uniform distribution; a cross-check for the
/// direct solve.
pub fn stationary_by_power_iteration(p: &TransitionMatrix, tol: f64, max_iters: usize) -> StationaryDistribution {
    let n = p.n();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..max_iters {
        let next = p.step(&pi);
        let change = max_abs_diff(&next, &pi);
        pi = next;
        if change < tol {
            break;
        }
    }
    let residual = max_abs_diff(&p.step(&pi), &pi);
    StationaryDistribution { pi, residual }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `pi_{i*} = 1 / (1 + sum_{i != i*} M(i,i*)/M(i*,i))`.
///
/// This is the stationary mass of the winner whenever the chain satisfies
/// detailed balance, which for this kernel means the matrix is
/// Bradley-Terry consistent (e.g. built from Plackett-Luce utilities) or the
/// non-winner entries do not matter (uniform gap). For other matrices it is
/// only an approximation.
pub fn stationary_condorcet_closed_form(m: &PreferenceMatrix) -> Result<f64> {
    let w = m.condorcet_winner().ok_or(Error::NoCondorcetWinner)?;
    let ratio_sum: f64 = (0..m.n()).filter(|&i| i != w).map(|i| m.get(i, w) / m.get(w, i)).sum();
    Ok(1.0 / (1.0 + ratio_sum))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryBounds {
    pub lower: f64,
    pub upper: f64,
}

fn winner_mass(p: f64, n: usize) -> f64 {
    (1.0 - p) / (1.0 - p + (n as f64 - 1.0) * p)
}

/// Sandwich on the winner's stationary mass when every duel against the
/// winner is lost with probability in `[p_u, p_l]`.
pub fn stationary_bounds(p_l: f64, p_u: f64, n: usize) -> Result<StationaryBounds> {
    if n < 2 {
        return Err(Error::Dimension(format!("{n} arms")));
    }
    if !(p_u > 0.0 && p_u <= p_l && p_l < 0.5) {
        return Err(Error::Precondition(format!(
            "need 0 < p_u <= p_l < 1/2 (got p_l = {p_l}, p_u = {p_u})"
        )));
    }
    Ok(StationaryBounds {
        lower: winner_mass(p_l, n),
        upper: winner_mass(p_u, n),
    })
}

/// Result of converting a target error `gamma` into a uniform loss
/// probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaGap {
    pub p: f64,
    /// False when `1 - p <= 1/2`, i.e. the resulting matrix would not have a
    /// strict Condorcet winner.
    pub strict_condorcet: bool,
}

/// `p = gamma / (gamma + (1 - gamma)(n - 1))`: with `M(i*,i) = 1 - p` for all
/// `i`, the winner's stationary mass is exactly `1 - gamma`.
pub fn gamma_to_p(gamma: f64, n: usize) -> Result<GammaGap> {
    check_open_unit("gamma", gamma)?;
    if n < 2 {
        return Err(Error::Dimension(format!("{n} arms")));
    }
    let p = gamma / (gamma + (1.0 - gamma) * (n as f64 - 1.0));
    Ok(GammaGap {
        p,
        strict_condorcet: p < 0.5,
    })
}

/// Inverse of [`gamma_to_p`]: `gamma = p(n-1) / (1 + p(n-2))`.
pub fn p_to_gamma(p: f64, n: usize) -> Result<f64> {
    check_open_unit("p", p)?;
    if n < 2 {
        return Err(Error::Dimension(format!("{n} arms")));
    }
    let k = n as f64;
    Ok(p * (k - 1.0) / (1.0 + p * (k - 2.0)))
}

/// Coupling bound on the mixing time, `n ln(1/eps)`.
pub fn mixing_time_bound(n: usize, epsilon: f64) -> Result<f64> {
    check_open_unit("epsilon", epsilon)?;
    Ok(n as f64 * (1.0 / epsilon).ln())
}

/// Total-variation distance, half the L1 distance.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingEstimate {
    pub epsilon: f64,
    /// First `t` with worst-case distance at most `epsilon`; `None` if not
    /// reached within the computed horizon.
    pub tau: Option<usize>,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingReport {
    pub n: usize,
    /// `delta[t] = max_x delta_per_state[x][t]`, for `t = 0..=t_max`.
    pub delta: Vec<f64>,
    pub delta_per_state: Vec<Vec<f64>>,
    pub estimates: Vec<MixingEstimate>,
}

impl MixingReport {
    pub fn tau(&self, epsilon: f64) -> Option<usize> {
        first_below(&self.delta, epsilon)
    }
}

fn first_below(curve: &[f64], epsilon: f64) -> Option<usize> {
    curve.iter().position(|&d| d <= epsilon)
}

/// Exact worst-case TV curve by propagating every point-mass start through
/// `t_max` steps. `tau` is evaluated per start state and maximised, following
/// `tau(eps) = max_x min{t : delta_x(t) <= eps}`.
pub fn exact_tv_curve(p: &TransitionMatrix, t_max: usize, epsilons: &[f64]) -> Result<MixingReport> {
    let n = p.n();
    if n > MAX_DENSE_STATES {
        return Err(Error::ResourceLimit(format!(
            "{n} states exceeds the dense limit of {MAX_DENSE_STATES}"
        )));
    }
    let pi = stationary_distribution(p)?.pi;
    let kernel = p.to_dmatrix();
    let mut dist = DMatrix::<f64>::identity(n, n);
    let mut per_state = vec![Vec::with_capacity(t_max + 1); n];
    for t in 0..=t_max {
        if t > 0 {
            dist = &dist * &kernel;
        }
        for (x, curve) in per_state.iter_mut().enumerate() {
            let row: Vec<f64> = dist.row(x).iter().copied().collect();
            curve.push(total_variation(&row, &pi));
        }
    }
    let delta: Vec<f64> = (0..=t_max)
        .map(|t| per_state.iter().map(|c| c[t]).fold(0.0, f64::max))
        .collect();
    let estimates = epsilons
        .iter()
        .map(|&epsilon| {
            let tau = per_state
                .iter()
                .map(|c| first_below(c, epsilon))
                .try_fold(0usize, |acc, t| t.map(|t| acc.max(t)));
            Ok(MixingEstimate {
                epsilon,
                tau,
                bound: mixing_time_bound(n, epsilon)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MixingReport {
        n,
        delta,
        delta_per_state: per_state,
        estimates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMixingReport {
    /// Worst-case empirical TV distance per `t`.
    pub delta_hat: Vec<f64>,
    /// Simultaneous confidence radius added to each per-state estimate.
    pub radius: f64,
    /// `delta_hat[t] + radius`, clamped to 1.
    pub delta_upper: Vec<f64>,
    pub replicates: usize,
}

/// Monte Carlo TV curve of the EA chain against a reference distribution.
///
/// Each start state runs `replicates` independent chains. The radius uses the
/// L1 concentration bound `Pr[|p_hat - p|_1 >= l] <= 2^n exp(-N l^2 / 2)`,
/// union-bounded over start states and time steps at level `alpha`.
pub fn empirical_tv_curve(
    m: &PreferenceMatrix,
    policy: QueryPolicy,
    reference: &[f64],
    t_max: usize,
    replicates: usize,
    alpha: f64,
    stream: &RngStream,
) -> Result<EmpiricalMixingReport> {
    check_open_unit("alpha", alpha)?;
    let n = m.n();
    if reference.len() != n || replicates == 0 {
        return Err(Error::Precondition("reference length must equal n and replicates > 0".into()));
    }
    let mut delta_hat = vec![0.0f64; t_max + 1];
    for start in 0..n {
        let mut rng = stream.child(start as u64);
        let mut counts = vec![vec![0u64; n]; t_max + 1];
        for _ in 0..replicates {
            let mut state = start;
            counts[0][state] += 1;
            for row in counts.iter_mut().skip(1) {
                state = ea::transition(m, state, policy, &mut rng);
                row[state] += 1;
            }
        }
        for (t, row) in counts.iter().enumerate() {
            let freq: Vec<f64> = row.iter().map(|&c| c as f64 / replicates as f64).collect();
            delta_hat[t] = delta_hat[t].max(total_variation(&freq, reference));
        }
    }
    let events = (n * (t_max + 1)) as f64;
    let l1 = (2.0 * (n as f64 * std::f64::consts::LN_2 + (events / alpha).ln()) / replicates as f64).sqrt();
    let radius = 0.5 * l1;
    let delta_upper = delta_hat.iter().map(|d| (d + radius).min(1.0)).collect();
    Ok(EmpiricalMixingReport {
        delta_hat,
        radius,
        delta_upper,
        replicates,
    })
}

/// One step of the shared-challenger coupling: both copies face the same
/// uniformly drawn challenger with independent duel outcomes, and copies that
/// have met move together.
pub fn coupled_step<R: Rng + ?Sized>(m: &PreferenceMatrix, x: usize, y: usize, rng: &mut R) -> (usize, usize) {
    let n = m.n();
    let k = rng.random_range(0..n);
    let x_next = if rng.random::<f64>() < m.get(k, x) { k } else { x };
    if x == y {
        return (x_next, x_next);
    }
    let y_next = if rng.random::<f64>() < m.get(k, y) { k } else { y };
    (x_next, y_next)
}

/// Exact one-step meeting probability of the coupling from distinct states
/// `i != j`: `(M(i,j) + M(j,i))/n + (1/n) sum_{k != i,j} M(k,i) M(k,j)`.
pub fn coupling_meet_probability(m: &PreferenceMatrix, i: usize, j: usize) -> f64 {
    let n = m.n();
    let others: f64 = (0..n)
        .filter(|&k| k != i && k != j)
        .map(|k| m.get(k, i) * m.get(k, j))
        .sum();
    (m.get(i, j) + m.get(j, i) + others) / n as f64
}

/// Steps until the two coupled copies first coincide.
pub fn coupling_coalescence<R: Rng + ?Sized>(
    m: &PreferenceMatrix,
    x0: usize,
    y0: usize,
    rng: &mut R,
    max_steps: u64,
) -> Result<u64> {
    let n = m.n();
    for arm in [x0, y0] {
        if arm >= n {
            return Err(Error::ArmOutOfRange { arm, n });
        }
    }
    let (mut x, mut y) = (x0, y0);
    for t in 0..=max_steps {
        if x == y {
            return Ok(t);
        }
        (x, y) = coupled_step(m, x, y, rng);
    }
    Err(Error::HorizonExceeded { horizon: max_steps })
}

/// Kernel of the expected optimisation time bound,
/// `tau_eps * ln(1/pi_opt) / pi_opt`; the hidden constant is not included.
pub fn expected_opt_time_kernel(tau_eps: f64, pi_opt: f64) -> Result<f64> {
    if !(tau_eps > 0.0 && tau_eps.is_finite()) {
        return Err(Error::OutOfRange {
            name: "tau_eps",
            value: tau_eps,
            reason: "must be positive",
        });
    }
    check_open_unit("pi_opt", pi_opt)?;
    Ok(tau_eps * (1.0 / pi_opt).ln() / pi_opt)
}

/// One row of the stationary/mixing analysis CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryAnalysis {
    pub n: usize,
    pub x: u64,
    pub p_l: f64,
    pub p_u: f64,
    pub gamma: f64,
    pub pi_star_exact: f64,
    pub pi_star_lower: f64,
    pub pi_star_upper: f64,
    pub epsilon: f64,
    pub tau_eps_exact: Option<usize>,
    pub tau_eps_bound: f64,
}

/// The `epsilon` column sits before the two mixing columns it qualifies.
pub const STATIONARY_ANALYSIS_HEADER: [&str; 11] = [
    "n",
    "x",
    "p_l",
    "p_u",
    "gamma",
    "pi_star_exact",
    "pi_star_lower",
    "pi_star_upper",
    "epsilon",
    "tau_eps_exact",
    "tau_eps_bound",
];

/// Stationary and mixing summary of the best-of-x chain, one entry per
/// requested epsilon. `p_l`/`p_u` are the largest/smallest loss
/// probabilities of the winner in the boosted matrix.
pub fn analyze_chain(
    m: &PreferenceMatrix,
    policy: QueryPolicy,
    epsilons: &[f64],
) -> Result<Vec<StationaryAnalysis>> {
    let n = m.n();
    let mx = m.boosted(policy.x())?;
    let w = mx.condorcet_winner().ok_or(Error::NoCondorcetWinner)?;
    let losses: Vec<f64> = (0..n).filter(|&i| i != w).map(|i| mx.get(i, w)).collect();
    let p_l = losses.iter().copied().fold(0.0, f64::max);
    let p_u = losses.iter().copied().fold(1.0, f64::min);
    let p = TransitionMatrix::from_preferences(m, policy)?;
    let pi = stationary_distribution(&p)?.pi;
    let (lower, upper, gamma) = if p_u > 0.0 {
        let b = stationary_bounds(p_l, p_u, n)?;
        (b.lower, b.upper, p_to_gamma(p_l, n)?)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let horizon = epsilons
        .iter()
        .map(|&e| mixing_time_bound(n, e).map(|b| b.ceil() as usize))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0)
        + 1;
    let report = exact_tv_curve(&p, horizon, epsilons)?;
    Ok(report
        .estimates
        .iter()
        .map(|e| StationaryAnalysis {
            n,
            x: policy.x(),
            p_l,
            p_u,
            gamma,
            pi_star_exact: pi[w],
            pi_star_lower: lower,
            pi_star_upper: upper,
            epsilon: e.epsilon,
            tau_eps_exact: e.tau,
            tau_eps_bound: e.bound,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::PlackettLuceModel;

    fn two(p: f64) -> PreferenceMatrix {
        PreferenceMatrix::new(&[vec![1.0, p], vec![1.0 - p, 1.0]]).unwrap()
    }

    #[test]
    fn two_state_kernel() {
        let p = TransitionMatrix::from_preferences(&two(2.0 / 3.0), QueryPolicy::single()).unwrap();
        let expected = [[5.0 / 6.0, 1.0 / 6.0], [1.0 / 3.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.get(i, j) - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_kernel() {
        let n = 5;
        let m = PlackettLuceModel::new(vec![1.0; n]).unwrap().to_matrix();
        let p = TransitionMatrix::from_preferences(&m, QueryPolicy::single()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { (n + 1) as f64 / (2 * n) as f64 } else { 1.0 / (2 * n) as f64 };
                assert!((p.get(i, j) - want).abs() < 1e-15);
            }
        }
        let pi = stationary_distribution(&p).unwrap().pi;
        assert!(pi.iter().all(|v| (v - 0.2).abs() < 1e-14));
    }

    #[test]
    fn boosted_kernel_uses_majority_probability() {
        let p = TransitionMatrix::from_preferences(&two(2.0 / 3.0), QueryPolicy::new(3).unwrap()).unwrap();
        assert!((p.get(1, 0) - 0.5 * 20.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn two_state_stationary() {
        let p = TransitionMatrix::from_preferences(&two(2.0 / 3.0), QueryPolicy::single()).unwrap();
        let s = stationary_distribution(&p).unwrap();
        assert!((s.pi[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!(s.residual < 1e-15);
        let power = stationary_by_power_iteration(&p, 1e-15, 10_000);
        assert!((power.pi[0] - s.pi[0]).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        assert!((stationary_condorcet_closed_form(&two(2.0 / 3.0)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let m = PreferenceMatrix::uniform_gap(3, 0, 0.25).unwrap();
        let cf = stationary_condorcet_closed_form(&m).unwrap();
        assert!((cf - 0.6).abs() < 1e-15);
        let p = TransitionMatrix::from_preferences(&m, QueryPolicy::single()).unwrap();
        assert!((stationary_distribution(&p).unwrap().pi[0] - 0.6).abs() < 1e-12);
        let m = PreferenceMatrix::uniform_gap(10, 0, 1e-9).unwrap();
        assert!(1.0 - stationary_condorcet_closed_form(&m).unwrap() < 1e-8);
        assert_eq!(
            stationary_condorcet_closed_form(&two(0.5)),
            Err(Error::NoCondorcetWinner)
        );
    }

    #[test]
    fn bounds_examples() {
        let b = stationary_bounds(0.25, 0.25, 3).unwrap();
        assert!((b.lower - 0.6).abs() < 1e-15 && (b.upper - 0.6).abs() < 1e-15);
        let b = stationary_bounds(0.4, 0.1, 5).unwrap();
        assert!((b.lower - 0.6 / 2.2).abs() < 1e-15);
        assert!((b.upper - 0.9 / 1.3).abs() < 1e-15);
        assert!(stationary_bounds(0.1, 0.4, 5).is_err());
        assert!(stationary_bounds(0.5, 0.1, 5).is_err());
        assert!(stationary_bounds(0.2, 0.0, 5).is_err());
    }

    #[test]
    fn gamma_conversion() {
        let g = gamma_to_p(0.5, 3).unwrap();
        assert!((g.p - 1.0 / 3.0).abs() < 1e-15 && g.strict_condorcet);
        let edge = gamma_to_p(0.5, 2).unwrap();
        assert_eq!(edge.p, 0.5);
        assert!(!edge.strict_condorcet);
        for &gamma in &[0.05, 0.3, 0.77, 0.95] {
            for n in [2, 7, 50] {
                let back = p_to_gamma(gamma_to_p(gamma, n).unwrap().p, n).unwrap();
                assert!((back - gamma).abs() < 1e-12);
            }
        }
        assert!(gamma_to_p(1.0, 3).is_err());
        assert!(gamma_to_p(0.5, 1).is_err());
    }

    #[test]
    fn mixing_bound_values() {
        assert!((mixing_time_bound(10, 0.01).unwrap() - 46.051_701_859_880_914).abs() < 1e-12);
        assert!((mixing_time_bound(2, 0.01).unwrap() - 9.210_340_371_976_184).abs() < 1e-12);
        assert!(mixing_time_bound(10, 1.0 - 1e-12).unwrap() < 1e-10);
        assert!(mixing_time_bound(10, 0.0).is_err());
    }

    #[test]
    fn two_state_tv_curve() {
        // Second eigenvalue 1/2: delta_0(t) = (1/3) 2^-t, delta_1(t) = (2/3) 2^-t.
        let p = TransitionMatrix::from_preferences(&two(2.0 / 3.0), QueryPolicy::single()).unwrap();
        let report = exact_tv_curve(&p, 12, &[0.01]).unwrap();
        for t in 0..=12 {
            let h = 0.5f64.powi(t as i32);
            assert!((report.delta_per_state[0][t] - h / 3.0).abs() < 1e-14);
            assert!((report.delta_per_state[1][t] - 2.0 * h / 3.0).abs() < 1e-14);
        }
        assert_eq!(report.estimates[0].tau, Some(7));
        assert_eq!(report.tau(0.01), Some(7));
        assert!(7.0 <= report.estimates[0].bound);
    }

    #[test]
    fn uniform_chain_contracts_in_one_step() {
        let m = PlackettLuceModel::new(vec![1.0; 6]).unwrap().to_matrix();
        let p = TransitionMatrix::from_preferences(&m, QueryPolicy::single()).unwrap();
        let report = exact_tv_curve(&p, 3, &[]).unwrap();
        assert!(report.delta[1] <= 0.5);
        assert!(report.delta.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn coupling_basics() {
        let m = PlackettLuceModel::new(vec![3.0, 2.0, 1.0]).unwrap().to_matrix();
        let mut rng = RngStream::new(11, 0);
        assert_eq!(coupling_coalescence(&m, 1, 1, &mut rng, 10).unwrap(), 0);
        assert!(coupling_meet_probability(&m, 0, 2) >= 1.0 / 3.0);
        // Once met, the copies stay together.
        for _ in 0..100 {
            let (a, b) = coupled_step(&m, 2, 2, &mut rng);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn opt_time_kernel_values() {
        let k = expected_opt_time_kernel(9.21, 2.0 / 3.0).unwrap();
        assert!((k - 9.21 * 1.5f64.ln() * 1.5).abs() < 1e-12);
        assert!((k - 5.602).abs() < 1e-3);
        assert!(expected_opt_time_kernel(9.21, 1.0 - 1e-12).unwrap() < 1e-10);
        assert!(expected_opt_time_kernel(0.0, 0.5).is_err());
    }

    #[test]
    fn analysis_rows() {
        let m = PreferenceMatrix::uniform_gap(3, 0, 0.25).unwrap();
        let rows = analyze_chain(&m, QueryPolicy::single(), &[0.1, 0.01]).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].pi_star_exact - 0.6).abs() < 1e-12);
        assert!((rows[0].gamma - 0.4).abs() < 1e-12);
        assert!(rows.iter().all(|r| r.tau_eps_exact.unwrap() as f64 <= r.tau_eps_bound));
    }
}
