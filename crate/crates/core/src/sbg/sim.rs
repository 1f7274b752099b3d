//! Monte-Carlo episodes between the agent and an opponent behavior.

use serde::{Deserialize, Serialize};

use super::{AgentPolicy, StochasticGame};
use crate::nfg::{check_distribution, SIMPLEX_TOL};
use crate::rng::{sample_index, stream};
use crate::{Error, Result};

/// What a player sees before acting at step `t`.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub state: usize,
    /// States visited before `t`.
    pub states: &'a [usize],
    /// The player's own past actions.
    pub own: &'a [usize],
    /// The other player's past actions.
    pub other: &'a [usize],
}

/// A (possibly history-dependent) strategy.
pub trait Behavior: Sync {
    fn distribution(&self, obs: &Observation<'_>) -> Vec<f64>;
}

impl Behavior for AgentPolicy {
    fn distribution(&self, obs: &Observation<'_>) -> Vec<f64> {
        self.at(obs.state).to_vec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<usize>,
    pub agent_actions: Vec<usize>,
    pub opponent_actions: Vec<usize>,
    pub rewards: Vec<f64>,
    /// Σ_t γ^t r_t.
    pub discounted_return: f64,
}

/// Plays `horizon` steps from a state drawn from `initial`. The same seed
/// always yields the same trajectory.
pub fn simulate_episode(
    game: &StochasticGame,
    agent: &dyn Behavior,
    opponent: &dyn Behavior,
    initial: &[f64],
    horizon: usize,
    seed: u64,
) -> Result<Trajectory> {
    if initial.len() != game.n_states() {
        return Err(Error::Dimension("initial distribution does not cover the states".into()));
    }
    check_distribution(initial, SIMPLEX_TOL)?;
    let mut rng = stream(seed, &[]);
    let mut t = Trajectory {
        states: Vec::with_capacity(horizon),
        agent_actions: Vec::with_capacity(horizon),
        opponent_actions: Vec::with_capacity(horizon),
        rewards: Vec::with_capacity(horizon),
        discounted_return: 0.0,
    };
    let mut state = sample_index(&mut rng, initial);
    let mut discount = 1.0;
    for _ in 0..horizon {
        let pa = agent.distribution(&Observation {
            state,
            states: &t.states,
            own: &t.agent_actions,
            other: &t.opponent_actions,
        });
        let pb = opponent.distribution(&Observation {
            state,
            states: &t.states,
            own: &t.opponent_actions,
            other: &t.agent_actions,
        });
        if pa.len() != game.n_agent_actions() || pb.len() != game.n_opponent_actions() {
            return Err(Error::Dimension("behavior returned a distribution of the wrong length".into()));
        }
        let a = sample_index(&mut rng, &pa);
        let b = sample_index(&mut rng, &pb);
        let r = game.reward(state, a, b);
        t.discounted_return += discount * r;
        discount *= game.gamma();
        t.states.push(state);
        t.agent_actions.push(a);
        t.opponent_actions.push(b);
        t.rewards.push(r);
        state = sample_index(&mut rng, game.next_states(state, a, b));
    }
    Ok(t)
}
