//! Payoff gaps, missed opportunity and risk for stochastic games.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dp::policy_evaluation;
use super::policy::{PolicyBuilder, SbgModel};
use crate::Result;

/// Distances at or below this count as "same kernel".
const SAME_KERNEL_TOL: f64 = 1e-12;

/// Gap of the policy built for `belief` when the opponent is really `truth`,
/// maximized over initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGap {
    pub belief: usize,
    pub truth: usize,
    pub distance: f64,
    pub state: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbgGapPoint {
    pub eps: f64,
    pub gap: f64,
    pub witness: PairGap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbgGapReport {
    pub lambda: f64,
    /// β: gap at ε = 0.
    pub opportunity: f64,
    /// δ: gap at ε = 2, i.e. over every pair.
    pub risk: f64,
    pub opportunity_witness: PairGap,
    pub risk_witness: PairGap,
    pub pairs: Vec<PairGap>,
}

/// All ordered (belief, truth) pairs of the type set, in type-set order.
fn pair_gaps<B: PolicyBuilder + ?Sized>(model: &SbgModel, builder: &B, lambda: f64) -> Result<Vec<PairGap>> {
    let types = model.types();
    let per_belief: Vec<Result<Vec<PairGap>>> = types
        .par_iter()
        .map(|&belief| {
            let pi = builder.build(model, belief, lambda)?;
            types
                .iter()
                .map(|&truth| {
                    let sigma = model.kernel().sigma(truth);
                    let v_pi = policy_evaluation(model.game(), &pi, sigma)?;
                    let (v_opt, _) = model.optimal(truth)?;
                    let (state, gap) = v_opt
                        .values()
                        .iter()
                        .zip(v_pi.values())
                        .map(|(o, p)| o - p)
                        .enumerate()
                        .fold((0, f64::NEG_INFINITY), |best, (s, g)| if g > best.1 { (s, g) } else { best });
                    Ok(PairGap { belief, truth, distance: model.kernel().distance(belief, truth), state, gap })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(types.len() * types.len());
    for r in per_belief {
        out.extend(r?);
    }
    Ok(out)
}

fn max_within(pairs: &[PairGap], eps: f64) -> PairGap {
    pairs
        .iter()
        .filter(|p| p.distance <= eps + SAME_KERNEL_TOL)
        .fold(None::<&PairGap>, |best, p| match best {
            Some(b) if b.gap >= p.gap => Some(b),
            _ => Some(p),
        })
        .expect("every type is within distance 0 of itself")
        .clone()
}

/// Δ_SBG(ε; π) = max over pairs with d(θ, θ⋆) ≤ ε and initial states of
/// V^{⋆, σ(θ⋆)}(s) − V^{π(θ), σ(θ⋆)}(s).
pub fn payoff_gap_sbg<B: PolicyBuilder + ?Sized>(
    model: &SbgModel,
    builder: &B,
    lambda: f64,
    eps: f64,
) -> Result<SbgGapPoint> {
    let pairs = pair_gaps(model, builder, lambda)?;
    let witness = max_within(&pairs, eps);
    Ok(SbgGapPoint { eps, gap: witness.gap, witness })
}

/// β = Δ(0) and δ = Δ(2) from a single sweep over all pairs.
pub fn opportunity_risk_sbg<B: PolicyBuilder + ?Sized>(
    model: &SbgModel,
    builder: &B,
    lambda: f64,
) -> Result<SbgGapReport> {
    let pairs = pair_gaps(model, builder, lambda)?;
    let opportunity_witness = max_within(&pairs, 0.0);
    let risk_witness = max_within(&pairs, f64::INFINITY);
    Ok(SbgGapReport {
        lambda,
        opportunity: opportunity_witness.gap,
        risk: risk_witness.gap,
        opportunity_witness,
        risk_witness,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::PayoffMatrix;
    use crate::sbg::{PolicyKind, StochasticGame, StrategyKernel};

    #[test]
    fn stateless_pennies_scale_by_horizon() {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = StochasticGame::stateless(&mp, 0.9).unwrap();
        let k = StrategyKernel::new(
            vec!["heads".into(), "tails".into()],
            vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]],
            &g,
        )
        .unwrap();
        let m = SbgModel::with_all_types(g, k).unwrap();
        for lambda in [0.0, 0.3, 1.0] {
            let r = opportunity_risk_sbg(&m, &PolicyKind::Blend, lambda).unwrap();
            assert!((r.opportunity - 10.0 * (1.0 - lambda)).abs() < 1e-7, "{r:?}");
            assert!((r.risk - 10.0 * (1.0 + lambda)).abs() < 1e-7);
            let p = payoff_gap_sbg(&m, &PolicyKind::Blend, lambda, 2.0).unwrap();
            assert_eq!(p.gap, r.risk);
        }
    }
}
