//! Two-player normal-form Bayesian games seen from Player 1.
//!
//! Player 1 holds a payoff matrix `A` (rows are its actions) and a belief
//! over a finite hypothesis set of Player-2 mixed strategies. This module
//! holds the basic types, best responses, hypothesis-set statistics and the
//! trust-weighted policy; payoff gaps live in [`gap`].

mod gap;
pub mod io;
mod stats;

pub use gap::{
    opportunity_risk_nfg, payoff_gap_nfg, BeliefSearch, GapEvaluator, GapPoint, GapReport,
    GapWitness,
};
pub use stats::{kappa_pair, theta_stats, GameStats};

use serde::{Deserialize, Serialize};

use crate::optimizer::{maximin_strategy, MaximinResult};
use crate::{Error, Result};

/// Probability vectors must sum to one within this tolerance.
pub const SIMPLEX_TOL: f64 = 1e-12;
/// Two payoffs closer than this count as tied when picking an argmax.
pub const TIE_TOL: f64 = 1e-9;

/// Player 1's payoff table, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PayoffMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Dimension("payoff matrix needs at least one row and column".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged payoff matrix".into()));
        }
        Self::from_flat(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite payoff {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// ‖A‖_max.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Row payoffs `A y` against a column distribution.
    pub fn row_values(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl TryFrom<Vec<Vec<f64>>> for PayoffMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<PayoffMatrix> for Vec<Vec<f64>> {
    fn from(m: PayoffMatrix) -> Self {
        m.to_rows()
    }
}

/// A probability vector over actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, SIMPLEX_TOL)?;
        Ok(Self(probs))
    }

    /// Normalizes nonnegative weights onto the simplex.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!("bad weights {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(Self(weights.into_iter().map(|w| w / total).collect()))
    }

    pub fn pure(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        Self(p)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Some(i)` when all mass sits on action `i`.
    pub fn as_pure(&self) -> Option<usize> {
        self.0.iter().position(|&p| p == 1.0)
    }

    /// `w * self + (1 - w) * other`.
    pub fn blend(&self, w: f64, other: &Self) -> Self {
        let mixed = self.0.iter().zip(&other.0).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        Self(mixed)
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.0
    }
}

pub(crate) fn check_distribution(p: &[f64], tol: f64) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution(format!("negative or non-finite entry in {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(())
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// The finite set Θ of hypothesized Player-2 strategies.
///
/// The full simplex is stored as its vertices plus the uniform point with
/// `full_simplex` set; statistics and the maximin program treat that flag
/// specially.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisSet {
    members: Vec<MixedStrategy>,
    full_simplex: bool,
}

impl HypothesisSet {
    pub fn new(members: Vec<MixedStrategy>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::Invalid("hypothesis set is empty".into()));
        };
        let b = first.len();
        if members.iter().any(|m| m.len() != b) {
            return Err(Error::Dimension("hypotheses have different lengths".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if let Some(j) = members[..i]
                .iter()
                .position(|o| l1_distance(o.probs(), m.probs()) <= SIMPLEX_TOL)
            {
                return Err(Error::Invalid(format!("hypothesis {i} duplicates hypothesis {j}")));
            }
        }
        Ok(Self { members, full_simplex: false })
    }

    pub fn from_vectors(members: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(members.into_iter().map(MixedStrategy::new).collect::<Result<_>>()?)
    }

    /// Θ = P_b.
    pub fn full_simplex(b: usize) -> Self {
        let mut members: Vec<_> = (0..b).map(|i| MixedStrategy::pure(b, i)).collect();
        if b >= 2 {
            members.push(MixedStrategy::uniform(b));
        }
        Self { members, full_simplex: true }
    }

    pub fn is_full_simplex(&self) -> bool {
        self.full_simplex
    }

    pub fn members(&self) -> &[MixedStrategy] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of Player-2 actions.
    pub fn dim(&self) -> usize {
        self.members[0].len()
    }
}

/// A distribution ρ over the members of a hypothesis set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(weights: Vec<f64>, theta: &HypothesisSet) -> Result<Self> {
        if weights.len() != theta.len() {
            return Err(Error::Dimension(format!(
                "belief over {} types for a set of {}",
                weights.len(),
                theta.len()
            )));
        }
        check_distribution(&weights, SIMPLEX_TOL)?;
        Ok(Self(weights))
    }

    pub fn point(k: usize, n: usize) -> Self {
        let mut w = vec![0.0; n];
        w[k] = 1.0;
        Self(w)
    }

    /// `t` on member `k`, `1 - t` on member `l`.
    pub fn pair(k: usize, l: usize, t: f64, n: usize) -> Self {
        let mut w = vec![0.0; n];
        w[k] += t;
        w[l] += 1.0 - t;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// E_ρ[y].
    pub fn mean(&self, theta: &HypothesisSet) -> Vec<f64> {
        let mut out = vec![0.0; theta.dim()];
        for (w, y) in self.0.iter().zip(theta.members()) {
            if *w != 0.0 {
                for (o, p) in out.iter_mut().zip(y.probs()) {
                    *o += w * p;
                }
            }
        }
        out
    }
}

/// x⊤Ay.
pub fn expected_payoff(x: &MixedStrategy, a: &PayoffMatrix, y: &MixedStrategy) -> Result<f64> {
    if x.len() != a.rows() || y.len() != a.cols() {
        return Err(Error::Dimension(format!(
            "x has {} entries, y has {}, matrix is {}x{}",
            x.len(),
            y.len(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(bilinear(x.probs(), a, y.probs()))
}

pub(crate) fn bilinear(x: &[f64], a: &PayoffMatrix, y: &[f64]) -> f64 {
    x.iter().zip(a.row_values(y)).map(|(xi, v)| xi * v).sum()
}

/// Lowest index whose value is within [`TIE_TOL`] of the maximum.
pub fn argmax_lowest(values: &[f64]) -> usize {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values.iter().position(|&v| v >= best - TIE_TOL).unwrap_or(0)
}

/// Pure best-response row against a column distribution.
pub fn best_response_row(a: &PayoffMatrix, y: &[f64]) -> usize {
    argmax_lowest(&a.row_values(y))
}

/// Pure best response to the mean strategy E_ρ[y].
pub fn best_response(a: &PayoffMatrix, rho: &Belief, theta: &HypothesisSet) -> Result<MixedStrategy> {
    if rho.weights().len() != theta.len() {
        return Err(Error::Dimension("belief does not match hypothesis set".into()));
    }
    if theta.dim() != a.cols() {
        return Err(Error::Dimension(format!(
            "hypotheses over {} actions, matrix has {} columns",
            theta.dim(),
            a.cols()
        )));
    }
    Ok(MixedStrategy::pure(a.rows(), best_response_row(a, &rho.mean(theta))))
}

/// A map from beliefs to Player-1 mixed strategies.
pub trait StrategyMap: Sync {
    fn strategy(&self, belief: &Belief) -> MixedStrategy;
}

impl<F> StrategyMap for F
where
    F: Fn(&Belief) -> MixedStrategy + Sync,
{
    fn strategy(&self, belief: &Belief) -> MixedStrategy {
        self(belief)
    }
}

/// `π(ρ) = λ·BR(ρ) + (1 − λ)·x̄` with x̄ the maximin strategy over Θ.
#[derive(Debug, Clone)]
pub struct LambdaPolicy {
    matrix: PayoffMatrix,
    theta: HypothesisSet,
    lambda: f64,
    safe: MaximinResult,
}

impl LambdaPolicy {
    pub fn new(matrix: &PayoffMatrix, theta: &HypothesisSet, lambda: f64) -> Result<Self> {
        let safe = maximin_strategy(matrix, theta)?;
        Self::with_safe(matrix, theta, lambda, safe)
    }

    /// Reuses a maximin solution, e.g. across a λ sweep.
    pub fn with_safe(
        matrix: &PayoffMatrix,
        theta: &HypothesisSet,
        lambda: f64,
        safe: MaximinResult,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        if theta.dim() != matrix.cols() {
            return Err(Error::Dimension("hypothesis set does not match matrix columns".into()));
        }
        Ok(Self { matrix: matrix.clone(), theta: theta.clone(), lambda, safe })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn safe(&self) -> &MaximinResult {
        &self.safe
    }
}

impl StrategyMap for LambdaPolicy {
    fn strategy(&self, belief: &Belief) -> MixedStrategy {
        let row = best_response_row(&self.matrix, &belief.mean(&self.theta));
        MixedStrategy::pure(self.matrix.rows(), row).blend(self.lambda, &self.safe.strategy)
    }
}

/// Builds the λ-policy for `matrix` over `theta`.
pub fn lambda_policy(matrix: &PayoffMatrix, theta: &HypothesisSet, lambda: f64) -> Result<LambdaPolicy> {
    LambdaPolicy::new(matrix, theta, lambda)
}
