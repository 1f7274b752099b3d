//! Policy evaluation and value iteration.

use super::{AgentPolicy, StochasticGame, ValueFunction};
use crate::nfg::PayoffMatrix;
use crate::{Error, Result};

/// Sweeps stop once ‖V_{k+1} − V_k‖_∞ drops to this.
pub const RESIDUAL_TOL: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100_000;

/// Slack on the per-sweep contraction check, relative to the value scale.
const CONTRACTION_SLACK: f64 = 1e-11;

/// R_V(s)[a][b] = r(s, a, b) + γ Σ_{s′} p(s′ | s, a, b) V(s′).
pub fn r_matrix(game: &StochasticGame, v: &ValueFunction, s: usize) -> PayoffMatrix {
    let (na, nb) = (game.n_agent_actions(), game.n_opponent_actions());
    let mut data = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in 0..nb {
            data.push(continuation(game, v.values(), s, a, b));
        }
    }
    PayoffMatrix::from_flat(na, nb, data).expect("shape follows the game")
}

#[inline]
fn continuation(game: &StochasticGame, v: &[f64], s: usize, a: usize, b: usize) -> f64 {
    let next: f64 = game.next_states(s, a, b).iter().zip(v).map(|(p, x)| p * x).sum();
    game.reward(s, a, b) + game.gamma() * next
}

/// Q(s, a) against the opponent distribution `sigma_s`.
pub(crate) fn action_values(game: &StochasticGame, v: &[f64], s: usize, sigma_s: &[f64]) -> Vec<f64> {
    (0..game.n_agent_actions())
        .map(|a| {
            sigma_s
                .iter()
                .enumerate()
                .filter(|(_, &q)| q != 0.0)
                .map(|(b, q)| q * continuation(game, v, s, a, b))
                .sum()
        })
        .collect()
}

/// Iterates `op` from V = 0 until the sup-norm residual reaches
/// [`RESIDUAL_TOL`]. Every sweep must shrink the residual by γ (up to
/// round-off), otherwise the operator is not the contraction it claims.
pub(crate) fn iterate<F>(game: &StochasticGame, mut op: F) -> Result<(ValueFunction, usize)>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let mut v = vec![0.0; game.n_states()];
    let mut previous = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        let next = op(&v)?;
        let residual = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = next.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        if residual > game.gamma() * previous + CONTRACTION_SLACK * scale {
            return Err(Error::Contraction { sweep, residual, previous });
        }
        v = next;
        if residual <= RESIDUAL_TOL {
            return Ok((ValueFunction(v), sweep));
        }
        previous = residual;
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS, tolerance: RESIDUAL_TOL })
}

fn check_shapes(game: &StochasticGame, sigma: &[Vec<f64>]) -> Result<()> {
    if sigma.len() != game.n_states() || sigma.iter().any(|d| d.len() != game.n_opponent_actions()) {
        return Err(Error::Dimension("opponent kernel does not match the game".into()));
    }
    Ok(())
}

/// V^{π, σ}: value of the stationary pair (π, σ).
pub fn policy_evaluation(game: &StochasticGame, pi: &AgentPolicy, sigma: &[Vec<f64>]) -> Result<ValueFunction> {
    check_shapes(game, sigma)?;
    if pi.n_states() != game.n_states() || pi.rows().iter().any(|p| p.len() != game.n_agent_actions()) {
        return Err(Error::Dimension("agent policy does not match the game".into()));
    }
    iterate(game, |v| {
        Ok((0..game.n_states())
            .map(|s| {
                let q = action_values(game, v, s, &sigma[s]);
                pi.at(s).iter().zip(&q).map(|(p, x)| p * x).sum()
            })
            .collect())
    })
    .map(|(v, _)| v)
}

/// V^{⋆, σ} and a greedy (lowest-index) optimal policy against σ.
pub fn optimal_value(game: &StochasticGame, sigma: &[Vec<f64>]) -> Result<(ValueFunction, AgentPolicy)> {
    check_shapes(game, sigma)?;
    let (v, _) = iterate(game, |v| {
        Ok((0..game.n_states())
            .map(|s| action_values(game, v, s, &sigma[s]).into_iter().fold(f64::NEG_INFINITY, f64::max))
            .collect())
    })?;
    let actions: Vec<usize> = (0..game.n_states())
        .map(|s| crate::nfg::argmax_lowest(&action_values(game, v.values(), s, &sigma[s])))
        .collect();
    Ok((v, AgentPolicy::deterministic(&actions, game.n_agent_actions())))
}
