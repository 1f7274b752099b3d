//! Maximin value of a stochastic Bayesian game.

use serde::{Deserialize, Serialize};

use super::dp::{action_values, iterate, policy_evaluation};
use super::{AgentPolicy, StochasticGame, StrategyKernel, ValueFunction};
use crate::nfg::{MixedStrategy, TIE_TOL};
use crate::optimizer::maximin_over_columns;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameValue {
    /// ν = min_s V̄(s).
    pub nu: f64,
    /// V̄: fixed point of the per-state maximin operator over the type set.
    pub values: ValueFunction,
    /// x̄(s): maximin stage strategy at the fixed point.
    pub safe_strategy: Vec<MixedStrategy>,
    /// θ̄(s): the type attaining the minimum against x̄(s), first on ties.
    pub safe_type: Vec<usize>,
    /// σ̄(s) = σ(s; θ̄(s)).
    pub safe_sigma: Vec<Vec<f64>>,
    /// min over θ and s of V^{x̄, σ(θ)}(s): what x̄ guarantees against any
    /// single stationary type (never below ν).
    pub fixed_type_value: f64,
    pub sweeps: usize,
}

impl GameValue {
    pub fn safe_policy(&self) -> AgentPolicy {
        AgentPolicy::new(self.safe_strategy.iter().map(|x| x.probs().to_vec()).collect())
            .expect("maximin strategies are distributions")
    }
}

fn stage_maximin(
    game: &StochasticGame,
    kernel: &StrategyKernel,
    types: &[usize],
    v: &[f64],
    s: usize,
) -> Result<(MixedStrategy, f64, Vec<Vec<f64>>)> {
    let columns: Vec<Vec<f64>> = types.iter().map(|&t| action_values(game, v, s, &kernel.sigma(t)[s])).collect();
    let (x, value) = maximin_over_columns(game.n_agent_actions(), &columns)?;
    Ok((x, value, columns))
}

/// Maximin value iteration: V(s) ← max_x min_θ x⊤ R_V(s) σ(s; θ).
///
/// `types` selects the members of the kernel forming the type set.
pub fn game_value_sbg(game: &StochasticGame, kernel: &StrategyKernel, types: &[usize]) -> Result<GameValue> {
    if types.is_empty() {
        return Err(Error::Invalid("empty type set".into()));
    }
    if let Some(&t) = types.iter().find(|&&t| t >= kernel.len()) {
        return Err(Error::UnknownType(format!("type index {t}")));
    }
    if kernel.sigma(types[0]).len() != game.n_states() {
        return Err(Error::Dimension("kernel does not match the game".into()));
    }
    let (values, sweeps) = iterate(game, |v| {
        (0..game.n_states()).map(|s| stage_maximin(game, kernel, types, v, s).map(|r| r.1)).collect()
    })?;

    let mut safe_strategy = Vec::with_capacity(game.n_states());
    let mut safe_type = Vec::with_capacity(game.n_states());
    for s in 0..game.n_states() {
        let (x, value, columns) = stage_maximin(game, kernel, types, values.values(), s)?;
        let k = columns
            .iter()
            .position(|c| c.iter().zip(x.probs()).map(|(a, p)| a * p).sum::<f64>() <= value + TIE_TOL)
            .expect("the minimum is attained");
        safe_strategy.push(x);
        safe_type.push(types[k]);
    }
    let safe_sigma = safe_type.iter().enumerate().map(|(s, &t)| kernel.sigma(t)[s].clone()).collect();

    let mut out = GameValue {
        nu: values.min(),
        values,
        safe_strategy,
        safe_type,
        safe_sigma,
        fixed_type_value: f64::INFINITY,
        sweeps,
    };
    let pi = out.safe_policy();
    for &t in types {
        let v = policy_evaluation(game, &pi, kernel.sigma(t))?;
        out.fixed_type_value = out.fixed_type_value.min(v.min());
    }
    Ok(out)
}
