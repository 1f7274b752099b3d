//! Value-based policies for the agent, built from a point belief over types.

use serde::{Deserialize, Serialize};

use super::dp::{action_values, optimal_value};
use super::value::{game_value_sbg, GameValue};
use super::{AgentPolicy, StochasticGame, StrategyKernel, ValueFunction};
use crate::nfg::argmax_lowest;
use crate::{Error, Result};

/// A game, its opponent kernel and the type set, with the quantities every
/// policy needs precomputed: V̄/σ̄ and the optimal response to each type.
#[derive(Debug, Clone)]
pub struct SbgModel {
    game: StochasticGame,
    kernel: StrategyKernel,
    types: Vec<usize>,
    value: GameValue,
    /// Indexed by kernel position; `None` for types outside the set.
    optimal: Vec<Option<(ValueFunction, AgentPolicy)>>,
}

impl SbgModel {
    pub fn new(game: StochasticGame, kernel: StrategyKernel, types: Vec<usize>) -> Result<Self> {
        let value = game_value_sbg(&game, &kernel, &types)?;
        let mut optimal = vec![None; kernel.len()];
        for &t in &types {
            if optimal[t].is_none() {
                optimal[t] = Some(optimal_value(&game, kernel.sigma(t))?);
            }
        }
        Ok(Self { game, kernel, types, value, optimal })
    }

    /// Uses every type of the kernel.
    pub fn with_all_types(game: StochasticGame, kernel: StrategyKernel) -> Result<Self> {
        let types = (0..kernel.len()).collect();
        Self::new(game, kernel, types)
    }

    pub fn game(&self) -> &StochasticGame {
        &self.game
    }

    pub fn kernel(&self) -> &StrategyKernel {
        &self.kernel
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    pub fn game_value(&self) -> &GameValue {
        &self.value
    }

    /// V^{⋆, σ(θ)} and a greedy optimal policy.
    pub fn optimal(&self, theta: usize) -> Result<&(ValueFunction, AgentPolicy)> {
        self.optimal
            .get(theta)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::UnknownType(format!("type index {theta} is not in the type set")))
    }

    fn check_lambda(lambda: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Invalid(format!("lambda {lambda} outside [0, 1]")));
        }
        Ok(())
    }
}

/// Deterministic policy maximizing, per state,
/// `λ R_Ṽ(s)σ̃(s) + (1 − λ) R_V̄(s)σ̄(s)` over agent actions, where σ̃ is the
/// believed type with optimal value Ṽ, and V̄/σ̄ are the maximin values and
/// per-state worst-case type. Ties go to the lowest action.
pub fn safe_exploit_policy(model: &SbgModel, belief: usize, lambda: f64) -> Result<AgentPolicy> {
    SbgModel::check_lambda(lambda)?;
    let (v_belief, _) = model.optimal(belief)?;
    let game = &model.game;
    let sigma = model.kernel.sigma(belief);
    let actions: Vec<usize> = (0..game.n_states())
        .map(|s| {
            let exploit = action_values(game, v_belief.values(), s, &sigma[s]);
            let safe = action_values(game, model.value.values.values(), s, &model.value.safe_sigma[s]);
            let score: Vec<f64> = exploit.iter().zip(&safe).map(|(e, r)| lambda * e + (1.0 - lambda) * r).collect();
            argmax_lowest(&score)
        })
        .collect();
    Ok(AgentPolicy::deterministic(&actions, game.n_agent_actions()))
}

/// Per-state mixture `λ · greedy(σ̃) + (1 − λ) · x̄(s)`; the stochastic
/// analogue of the normal-form λ-policy.
pub fn blend_policy(model: &SbgModel, belief: usize, lambda: f64) -> Result<AgentPolicy> {
    SbgModel::check_lambda(lambda)?;
    let (_, greedy) = model.optimal(belief)?;
    let rows = greedy
        .rows()
        .iter()
        .zip(&model.value.safe_strategy)
        .map(|(g, x)| g.iter().zip(x.probs()).map(|(g, x)| lambda * g + (1.0 - lambda) * x).collect())
        .collect();
    AgentPolicy::new(rows)
}

/// Builds the agent's policy from a believed type and trust level λ.
pub trait PolicyBuilder: Sync {
    fn build(&self, model: &SbgModel, belief: usize, lambda: f64) -> Result<AgentPolicy>;
}

impl<F> PolicyBuilder for F
where
    F: Fn(&SbgModel, usize, f64) -> Result<AgentPolicy> + Sync,
{
    fn build(&self, model: &SbgModel, belief: usize, lambda: f64) -> Result<AgentPolicy> {
        self(model, belief, lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    SafeExploit,
    Blend,
}

impl PolicyBuilder for PolicyKind {
    fn build(&self, model: &SbgModel, belief: usize, lambda: f64) -> Result<AgentPolicy> {
        match self {
            Self::SafeExploit => safe_exploit_policy(model, belief, lambda),
            Self::Blend => blend_policy(model, belief, lambda),
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "safe-exploit" => Ok(Self::SafeExploit),
            "blend" => Ok(Self::Blend),
            other => Err(Error::Invalid(format!("unknown policy kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::PayoffMatrix;

    fn mp_model() -> SbgModel {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = StochasticGame::stateless(&mp, 0.9).unwrap();
        let k = StrategyKernel::new(
            vec!["heads".into(), "tails".into()],
            vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]],
            &g,
        )
        .unwrap();
        SbgModel::with_all_types(g, k).unwrap()
    }

    #[test]
    fn full_trust_plays_best_response() {
        let m = mp_model();
        assert_eq!(safe_exploit_policy(&m, 1, 1.0).unwrap().pure_actions(), Some(vec![1]));
        assert_eq!(blend_policy(&m, 1, 1.0).unwrap().pure_actions(), Some(vec![1]));
    }

    #[test]
    fn zero_trust_blend_is_maximin() {
        let m = mp_model();
        let p = blend_policy(&m, 0, 0.0).unwrap();
        assert!((p.at(0)[0] - 0.5).abs() < 1e-9);
        let half = PolicyKind::Blend.build(&m, 0, 0.5).unwrap();
        assert!((half.at(0)[0] - 0.75).abs() < 1e-9);
        assert!(safe_exploit_policy(&m, 0, 1.5).is_err());
        assert_eq!("blend".parse::<PolicyKind>().unwrap(), PolicyKind::Blend);
    }
}
