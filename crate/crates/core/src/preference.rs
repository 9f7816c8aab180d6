//! Preference environments: pairwise win-probability matrices, the
//! Plackett-Luce utility model, duel sampling and best-of-x boosting.
//!
//! Arms are indexed from 0. A [`PreferenceMatrix`] stores `m[i][j]`, the
//! probability that arm `i` beats arm `j` in a single duel. The diagonal is
//! fixed to 1 so that a self-comparison keeps the incumbent, which is what
//! makes the rows of the (1+1) EA transition kernel sum to one.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tail::{binomial_upper_tail, majority_probability};

/// Absolute tolerance used when checking `m[i][j] + m[j][i] = 1`.
pub const SKEW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferenceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PreferenceMatrix {
    /// Validates a square matrix of win probabilities. Pairs need only sum
    /// to one within [`SKEW_TOLERANCE`]; the stored lower triangle is the
    /// exact complement of the upper one, so every view of a pair agrees on
    /// which side is favoured.
    pub fn new(raw: &[Vec<f64>]) -> Result<Self> {
        let n = raw.len();
        if n < 2 {
            return Err(Error::Dimension(format!("{n} rows")));
        }
        if let Some((row, r)) = raw.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!("row {row} has {} columns, expected {n}", r.len())));
        }
        for (i, row) in raw.iter().enumerate() {
            if row[i] != 1.0 {
                return Err(Error::DiagonalViolation { i, value: row[i] });
            }
        }
        for (i, row) in raw.iter().enumerate() {
            for (j, &value) in row.iter().enumerate() {
                if i != j && !(value > 0.0 && value < 1.0) {
                    return Err(Error::RangeViolation { i, j, value });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let sum = raw[i][j] + raw[j][i];
                if (sum - 1.0).abs() > SKEW_TOLERANCE {
                    return Err(Error::SkewViolation { i, j, sum });
                }
            }
        }
        let mut entries: Vec<f64> = raw.iter().flatten().copied().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                entries[j * n + i] = 1.0 - entries[i * n + j];
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from the strict upper triangle, filling the lower
    /// triangle by complement so skew-symmetry holds exactly.
    pub fn from_upper(n: usize, upper: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut raw = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = upper(i, j);
                raw[i][j] = v;
                raw[j][i] = 1.0 - v;
            }
        }
        Self::new(&raw)
    }

    /// The Plackett-Luce induced matrix, `m[i][j] = u_i / (u_i + u_j)`.
    pub fn from_plackett_luce(model: &PlackettLuceModel) -> Self {
        let u = model.utilities();
        let n = u.len();
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let p = u[i] / (u[i] + u[j]);
                entries[i * n + j] = p;
                // u_j/(u_i+u_j) computed directly keeps the pair exact to rounding.
                entries[j * n + i] = u[j] / (u[i] + u[j]);
            }
        }
        Self { n, entries }
    }

    /// Uniform-gap matrix: `winner` beats every other arm with probability
    /// `1 - p`, all other pairs are fair coins.
    pub fn uniform_gap(n: usize, winner: usize, p: f64) -> Result<Self> {
        if winner >= n {
            return Err(Error::ArmOutOfRange { arm: winner, n });
        }
        let mut raw = vec![vec![0.5; n]; n];
        for (i, row) in raw.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for i in (0..n).filter(|&i| i != winner) {
            raw[winner][i] = 1.0 - p;
            raw[i][winner] = p;
        }
        Self::new(&raw)
    }

    /// Construction without the open-interval check, for derived matrices
    /// (boosting) whose entries may round to exactly 0 or 1.
    fn from_entries_unchecked(n: usize, entries: Vec<f64>) -> Self {
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// The unique arm beating every other arm with probability above 1/2.
    pub fn condorcet_winner(&self) -> Option<usize> {
        (0..self.n).find(|&i| (0..self.n).all(|j| j == i || self.get(i, j) > 0.5))
    }

    /// Largest single-duel loss probability of the Condorcet winner, i.e. the
    /// smallest `p` with `m[i*][i] >= 1 - p` for all `i`.
    pub fn condorcet_gap(&self) -> Option<(usize, f64)> {
        let w = self.condorcet_winner()?;
        let p = (0..self.n)
            .filter(|&i| i != w)
            .map(|i| self.get(i, w))
            .fold(0.0, f64::max);
        Some((w, p))
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for arm in [i, j] {
            if arm >= self.n {
                return Err(Error::ArmOutOfRange { arm, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SameArm(i));
        }
        Ok(())
    }

    /// One stochastic duel: returns `i` with probability `m[i][j]`.
    pub fn sample_duel<R: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut R) -> Result<usize> {
        self.check_pair(i, j)?;
        Ok(self.duel_unchecked(i, j, rng))
    }

    #[inline]
    pub(crate) fn duel_unchecked<R: Rng + ?Sized>(&self, i: usize, j: usize, rng: &mut R) -> usize {
        if rng.random::<f64>() < self.get(i, j) {
            i
        } else {
            j
        }
    }

    /// Plays `policy.x()` independent duels and returns the majority winner.
    pub fn best_of_x_winner<R: Rng + ?Sized>(
        &self,
        i: usize,
        j: usize,
        policy: QueryPolicy,
        rng: &mut R,
    ) -> Result<usize> {
        self.check_pair(i, j)?;
        Ok(self.best_of_x_unchecked(i, j, policy, rng))
    }

    pub(crate) fn best_of_x_unchecked<R: Rng + ?Sized>(
        &self,
        i: usize,
        j: usize,
        policy: QueryPolicy,
        rng: &mut R,
    ) -> usize {
        let x = policy.x();
        let p = self.get(i, j);
        let wins = (0..x).filter(|_| rng.random::<f64>() < p).count() as u64;
        if wins > x / 2 {
            i
        } else {
            j
        }
    }

    /// The matrix of majority-of-`x` win probabilities,
    /// `M_x[i][j] = Pr[Bin(x, m[i][j]) >= (x+1)/2]`.
    pub fn boosted(&self, x: u64) -> Result<Self> {
        let policy = QueryPolicy::new(x)?;
        if policy.is_single() {
            return Ok(self.clone());
        }
        let n = self.n;
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let p = self.get(i, j);
                // Evaluate the tail on the side below 1/2 (no cancellation) and
                // complement, so the pair sums to one exactly.
                let (weak, strong) = if p <= 0.5 { (i, j) } else { (j, i) };
                let q = majority_probability(x, self.get(weak, strong));
                entries[weak * n + strong] = q;
                entries[strong * n + weak] = 1.0 - q;
            }
        }
        Ok(Self::from_entries_unchecked(n, entries))
    }
}

/// Positive utilities of a Plackett-Luce choice model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PlackettLuceModel {
    u: Vec<f64>,
}

impl TryFrom<Vec<f64>> for PlackettLuceModel {
    type Error = Error;

    fn try_from(u: Vec<f64>) -> Result<Self> {
        Self::new(u)
    }
}

impl From<PlackettLuceModel> for Vec<f64> {
    fn from(m: PlackettLuceModel) -> Self {
        m.u
    }
}

impl PlackettLuceModel {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Dimension("empty utility vector".into()));
        }
        if let Some((index, &value)) = u.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidUtility { index, value });
        }
        let total: f64 = u.iter().sum();
        if !total.is_finite() {
            return Err(Error::Dimension(format!("utility total overflows ({total})")));
        }
        Ok(Self { u })
    }

    pub fn utilities(&self) -> &[f64] {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// `Pr[i wins | subset] = u_i / sum_{j in subset} u_j`.
    pub fn set_win_probability(&self, i: usize, subset: &[usize]) -> f64 {
        let total: f64 = subset.iter().map(|&j| self.u[j]).sum();
        self.u[i] / total
    }

    /// Draws the winner of one comparison among `subset`.
    pub fn sample_set_winner<R: Rng + ?Sized>(&self, subset: &[usize], rng: &mut R) -> Result<usize> {
        if subset.len() < 2 {
            return Err(Error::EmptySubset(subset.len()));
        }
        if let Some(&arm) = subset.iter().find(|&&a| a >= self.n()) {
            return Err(Error::ArmOutOfRange { arm, n: self.n() });
        }
        let total: f64 = subset.iter().map(|&j| self.u[j]).sum();
        Ok(categorical(subset.iter().map(|&j| (j, self.u[j])), total, rng))
    }

    pub fn to_matrix(&self) -> PreferenceMatrix {
        PreferenceMatrix::from_plackett_luce(self)
    }
}

/// Draws from `(item, weight)` pairs with the given total weight; the last
/// item absorbs floating-point slack.
pub(crate) fn categorical<R: Rng + ?Sized>(
    items: impl Iterator<Item = (usize, f64)>,
    total: f64,
    rng: &mut R,
) -> usize {
    let mut target = rng.random::<f64>() * total;
    let mut last = 0;
    for (item, w) in items {
        last = item;
        if target < w {
            return item;
        }
        target -= w;
    }
    last
}

/// How a single query between two arms is decided: a majority over `x`
/// independent duels, `x` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct QueryPolicy {
    x: u64,
}

impl QueryPolicy {
    pub fn new(x: u64) -> Result<Self> {
        if x == 0 || x % 2 == 0 {
            return Err(Error::EvenX(x));
        }
        Ok(Self { x })
    }

    pub const fn single() -> Self {
        Self { x: 1 }
    }

    pub fn x(self) -> u64 {
        self.x
    }

    pub fn is_single(self) -> bool {
        self.x == 1
    }

    /// Exact probability that the arm with single-duel win probability `p`
    /// wins the query.
    pub fn win_probability(self, p: f64) -> f64 {
        if self.is_single() {
            p
        } else {
            binomial_upper_tail(self.x, self.x / 2 + 1, p)
        }
    }
}

impl Default for QueryPolicy {
    fn default() -> Self {
        Self::single()
    }
}

impl TryFrom<u64> for QueryPolicy {
    type Error = Error;

    fn try_from(x: u64) -> Result<Self> {
        Self::new(x)
    }
}

impl From<QueryPolicy> for u64 {
    fn from(p: QueryPolicy) -> Self {
        p.x
    }
}
