use serde::{Deserialize, Serialize};

use super::{l1_distance, HypothesisSet, PayoffMatrix};
use crate::optimizer::maximin_strategy;
use crate::{Error, Result};

/// Diameter, type intensity, maximum and value of a game over Θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameStats {
    pub eta: f64,
    /// `None` when no ordered pair satisfies the strict feasibility condition.
    pub kappa: Option<f64>,
    pub mu: f64,
    pub nu: f64,
}

impl GameStats {
    pub fn kappa_or_err(&self) -> Result<f64> {
        self.kappa.ok_or(Error::KappaUndefined)
    }
}

/// The ordered pair `(y, z)` attaining κ(Θ), first in enumeration order.
///
/// For a pair, let `I₋ = {i : y_i ≤ z_i}` and `I₊` its complement. The pair
/// is feasible when `Σ_{I₋} y < Σ_{I₊} y`, and scores `Σ_{I₋} z − Σ_{I₊} z`.
pub fn kappa_pair(theta: &HypothesisSet) -> Option<(usize, usize, f64)> {
    let m = theta.members();
    let mut best: Option<(usize, usize, f64)> = None;
    for (yi, y) in m.iter().enumerate() {
        for (zi, z) in m.iter().enumerate() {
            let (mut y_minus, mut y_plus, mut score) = (0.0, 0.0, 0.0);
            for (&a, &b) in y.probs().iter().zip(z.probs()) {
                if a <= b {
                    y_minus += a;
                    score += b;
                } else {
                    y_plus += a;
                    score -= b;
                }
            }
            if y_minus < y_plus && best.is_none_or(|(_, _, k)| score > k) {
                best = Some((yi, zi, score));
            }
        }
    }
    best
}

/// η, κ, μ and ν of Θ with respect to `a`.
///
/// For the full simplex, η = 2 and κ = 1 (for b ≥ 2), μ = ‖A‖_max and ν is
/// the column player's minimax value, computed through the maximin LP.
pub fn theta_stats(theta: &HypothesisSet, a: &PayoffMatrix) -> Result<GameStats> {
    if theta.dim() != a.cols() {
        return Err(Error::Dimension(format!(
            "hypotheses over {} actions, matrix has {} columns",
            theta.dim(),
            a.cols()
        )));
    }
    if theta.is_full_simplex() {
        let wide = theta.dim() >= 2;
        return Ok(GameStats {
            eta: if wide { 2.0 } else { 0.0 },
            kappa: wide.then_some(1.0),
            mu: a.max_norm(),
            nu: maximin_strategy(a, theta)?.value,
        });
    }
    let m = theta.members();
    let mut eta = 0.0_f64;
    for (i, y) in m.iter().enumerate() {
        for z in &m[i + 1..] {
            eta = eta.max(l1_distance(y.probs(), z.probs()));
        }
    }
    let mut mu = 0.0_f64;
    let mut nu = f64::INFINITY;
    for y in m {
        let values = a.row_values(y.probs());
        let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        mu = values.iter().fold(mu, |acc, v| acc.max(v.abs()));
        nu = nu.min(top);
    }
    Ok(GameStats { eta, kappa: kappa_pair(theta).map(|(_, _, k)| k), mu, nu })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_pair() {
        let theta = HypothesisSet::from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let st = theta_stats(&theta, &mp).unwrap();
        assert_eq!(st.eta, 2.0);
        assert_eq!(st.kappa, Some(1.0));
        assert_eq!(kappa_pair(&theta), Some((0, 1, 1.0)));
    }

    #[test]
    fn singleton_has_no_kappa() {
        let theta = HypothesisSet::from_vectors(vec![vec![0.3, 0.7]]).unwrap();
        let a = PayoffMatrix::new(vec![vec![1.0, 0.0]]).unwrap();
        let st = theta_stats(&theta, &a).unwrap();
        assert_eq!(st.kappa, None);
        assert_eq!(st.eta, 0.0);
        assert!(st.kappa_or_err().is_err());
    }

    #[test]
    fn full_simplex_stats() {
        let rps = PayoffMatrix::new(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap();
        let st = theta_stats(&HypothesisSet::full_simplex(3), &rps).unwrap();
        assert_eq!((st.eta, st.kappa, st.mu), (2.0, Some(1.0), 1.0));
        assert!(st.nu.abs() < 1e-9);
    }
}
