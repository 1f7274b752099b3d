//! Exact payoff gaps Δ(ε; π) for normal-form games.
//!
//! The gap only depends on a belief through the policy output, but the
//! constraint only through the mean E_ρ[y], so the search enumerates a
//! finite family of beliefs: point masses, pairwise mixtures on a grid, and
//! for each truth y⋆ the mixture toward every other member that sits exactly
//! on the ℓ1 boundary ‖E_ρ[y] − y⋆‖₁ = ε.

use serde::{Deserialize, Serialize};

use super::{bilinear, l1_distance, Belief, HypothesisSet, PayoffMatrix, StrategyMap};
use crate::{Error, Result};

const DIST_TOL: f64 = 1e-12;

/// Belief search scheme, echoed into every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefSearch {
    /// Step of the mixture weight for pairwise mixtures of members.
    pub mixture_step: f64,
    /// Whether to add the ℓ1-boundary mixture toward each truth.
    pub boundary: bool,
}

impl Default for BeliefSearch {
    fn default() -> Self {
        Self { mixture_step: 0.01, boundary: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapWitness {
    /// ρ, as weights over the hypothesis set.
    pub belief: Vec<f64>,
    /// Index of the true strategy y⋆ in the hypothesis set.
    pub truth: usize,
    /// ‖E_ρ[y] − y⋆‖₁.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapPoint {
    pub eps: f64,
    pub gap: f64,
    pub witness: GapWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub opportunity: f64,
    pub risk: f64,
    pub curve: Vec<GapPoint>,
    pub opportunity_witness: GapWitness,
    pub risk_witness: GapWitness,
    pub search: BeliefSearch,
}

struct Entry {
    candidate: usize,
    truth: usize,
    distance: f64,
    gap: f64,
}

/// Precomputes the gap of every (candidate belief, truth) pair so that a
/// whole ε grid costs one pass per ε.
pub struct GapEvaluator<'a, P: StrategyMap + ?Sized> {
    matrix: &'a PayoffMatrix,
    theta: &'a HypothesisSet,
    policy: &'a P,
    search: BeliefSearch,
    /// max_x x⊤Ay⋆ per truth.
    best: Vec<f64>,
    candidates: Vec<Belief>,
    entries: Vec<Entry>,
}

impl<'a, P: StrategyMap + ?Sized> GapEvaluator<'a, P> {
    pub fn new(
        matrix: &'a PayoffMatrix,
        theta: &'a HypothesisSet,
        policy: &'a P,
        search: BeliefSearch,
    ) -> Result<Self> {
        if theta.dim() != matrix.cols() {
            return Err(Error::Dimension("hypothesis set does not match matrix columns".into()));
        }
        if !(search.mixture_step > 0.0 && search.mixture_step <= 1.0) {
            return Err(Error::Invalid(format!("mixture step {}", search.mixture_step)));
        }
        let n = theta.len();
        let best = theta
            .members()
            .iter()
            .map(|y| matrix.row_values(y.probs()).into_iter().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let mut candidates: Vec<Belief> = (0..n).map(|k| Belief::point(k, n)).collect();
        let steps = (1.0 / search.mixture_step).round() as usize;
        for k in 0..n {
            for l in k + 1..n {
                for s in 1..steps {
                    candidates.push(Belief::pair(k, l, s as f64 / steps as f64, n));
                }
            }
        }
        let mut this = Self {
            matrix,
            theta,
            policy,
            search,
            best,
            candidates: Vec::new(),
            entries: Vec::new(),
        };
        let mut entries = Vec::with_capacity(candidates.len() * n);
        for (c, belief) in candidates.iter().enumerate() {
            this.score(c, belief, None, &mut entries);
        }
        this.candidates = candidates;
        this.entries = entries;
        Ok(this)
    }

    fn score(&self, c: usize, belief: &Belief, only_truth: Option<usize>, out: &mut Vec<Entry>) {
        let mean = belief.mean(self.theta);
        let x = self.policy.strategy(belief);
        for (j, y) in self.theta.members().iter().enumerate() {
            if only_truth.is_some_and(|t| t != j) {
                continue;
            }
            let gap = self.best[j] - bilinear(x.probs(), self.matrix, y.probs());
            out.push(Entry { candidate: c, truth: j, distance: l1_distance(&mean, y.probs()), gap });
        }
    }

    /// Δ(ε; π) together with the attaining (ρ, y⋆).
    pub fn gap_at(&self, eps: f64) -> GapPoint {
        let mut best: Option<(f64, GapWitness)> = None;
        let mut consider = |e: &Entry, belief: &Belief| {
            if e.distance <= eps + DIST_TOL && best.as_ref().is_none_or(|(g, _)| e.gap > *g) {
                let w = GapWitness {
                    belief: belief.weights().to_vec(),
                    truth: e.truth,
                    distance: e.distance,
                };
                best = Some((e.gap, w));
            }
        };
        for e in &self.entries {
            consider(e, &self.candidates[e.candidate]);
        }
        if self.search.boundary && eps > 0.0 {
            let n = self.theta.len();
            let members = self.theta.members();
            let mut scratch = Vec::new();
            for j in 0..n {
                for k in (0..n).filter(|&k| k != j) {
                    let d = l1_distance(members[k].probs(), members[j].probs());
                    let t = (eps / d).min(1.0);
                    let belief = Belief::pair(k, j, t, n);
                    scratch.clear();
                    self.score(0, &belief, Some(j), &mut scratch);
                    for e in &scratch {
                        consider(e, &belief);
                    }
                }
            }
        }
        // Point masses on each truth are always feasible, so `best` is set.
        let (gap, witness) = best.expect("hypothesis set is nonempty");
        GapPoint { eps, gap, witness }
    }

    pub fn search(&self) -> BeliefSearch {
        self.search
    }
}

/// Δ_NFG(ε; π) with the default search scheme.
pub fn payoff_gap_nfg<P: StrategyMap + ?Sized>(
    matrix: &PayoffMatrix,
    theta: &HypothesisSet,
    policy: &P,
    eps: f64,
) -> Result<GapPoint> {
    if !(eps >= 0.0) {
        return Err(Error::Invalid(format!("eps {eps} must be nonnegative")));
    }
    Ok(GapEvaluator::new(matrix, theta, policy, BeliefSearch::default())?.gap_at(eps))
}

/// Opportunity Δ(0; π), risk max_ε Δ(ε; π) and the sampled curve.
///
/// `0` and η(Θ) are added to the grid when missing. The curve is reported
/// as a running maximum in ε: a belief feasible at ε stays feasible at every
/// larger ε, so the running maximum is still attained by a recorded witness.
pub fn opportunity_risk_nfg<P: StrategyMap + ?Sized>(
    matrix: &PayoffMatrix,
    theta: &HypothesisSet,
    policy: &P,
    eps_grid: &[f64],
    search: BeliefSearch,
) -> Result<GapReport> {
    if eps_grid.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::Invalid("eps grid must be nonnegative".into()));
    }
    let eta = super::theta_stats(theta, matrix)?.eta;
    let mut grid: Vec<f64> = eps_grid.to_vec();
    grid.push(0.0);
    grid.push(eta);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= DIST_TOL);

    let evaluator = GapEvaluator::new(matrix, theta, policy, search)?;
    let mut curve: Vec<GapPoint> = Vec::with_capacity(grid.len());
    for &eps in &grid {
        let mut point = evaluator.gap_at(eps);
        if let Some(prev) = curve.last() {
            if prev.gap > point.gap {
                point.gap = prev.gap;
                point.witness = prev.witness.clone();
            }
        }
        curve.push(point);
    }
    let first = &curve[0];
    let last = curve.last().expect("grid is nonempty");
    Ok(GapReport {
        opportunity: first.gap,
        risk: last.gap,
        opportunity_witness: first.witness.clone(),
        risk_witness: last.witness.clone(),
        curve,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::{lambda_policy, MixedStrategy};

    fn mp() -> PayoffMatrix {
        PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    fn hut() -> HypothesisSet {
        HypothesisSet::from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn matching_pennies_gaps() {
        for i in 0..=10 {
            let lambda = i as f64 / 10.0;
            let pi = lambda_policy(&mp(), &hut(), lambda).unwrap();
            let opp = payoff_gap_nfg(&mp(), &hut(), &pi, 0.0).unwrap();
            let risk = payoff_gap_nfg(&mp(), &hut(), &pi, 2.0).unwrap();
            assert!((opp.gap - (1.0 - lambda)).abs() < 1e-12, "{lambda}");
            assert!((risk.gap - (1.0 + lambda)).abs() < 1e-12, "{lambda}");
        }
    }

    #[test]
    fn full_trust_has_no_opportunity_loss() {
        let a = PayoffMatrix::new(vec![vec![3.0, 0.0, 1.0], vec![0.5, 2.0, -1.0]]).unwrap();
        let theta = HypothesisSet::from_vectors(vec![
            vec![0.2, 0.3, 0.5],
            vec![0.6, 0.2, 0.2],
            vec![0.0, 0.9, 0.1],
        ])
        .unwrap();
        let pi = lambda_policy(&a, &theta, 1.0).unwrap();
        assert!(payoff_gap_nfg(&a, &theta, &pi, 0.0).unwrap().gap.abs() < 1e-12);
    }

    #[test]
    fn report_orders_opportunity_and_risk() {
        let theta = hut();
        let pi = lambda_policy(&mp(), &theta, 1.0).unwrap();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let r = opportunity_risk_nfg(&mp(), &theta, &pi, &grid, BeliefSearch::default()).unwrap();
        assert!(r.opportunity.abs() < 1e-12);
        assert!((r.risk - 2.0).abs() < 1e-12);
        assert!(r.curve.windows(2).all(|w| w[0].gap <= w[1].gap));
        assert!((r.risk_witness.distance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_policy_closure() {
        let theta = hut();
        let always_heads = |_: &Belief| MixedStrategy::pure(2, 0);
        let g = payoff_gap_nfg(&mp(), &theta, &always_heads, 0.0).unwrap();
        // Against tails the loss is 1 − (−1).
        assert!((g.gap - 2.0).abs() < 1e-12);
        assert_eq!(g.witness.truth, 1);
    }
}
