//! Discounted stochastic Bayesian games.
//!
//! The agent (player `i`) faces opponents whose joint stationary strategy is
//! a kernel σ(s; θ) indexed by an unknown type θ from a finite type set. All
//! value computations are from the agent's side with rewards `r(s, a, a′)`.

mod dp;
pub mod io;
mod gap;
mod policy;
mod sim;
mod value;

pub use dp::{optimal_value, policy_evaluation, r_matrix, MAX_SWEEPS, RESIDUAL_TOL};
pub use gap::{opportunity_risk_sbg, payoff_gap_sbg, PairGap, SbgGapPoint, SbgGapReport};
pub use policy::{blend_policy, safe_exploit_policy, PolicyBuilder, PolicyKind, SbgModel};
pub use sim::{simulate_episode, Behavior, Observation, Trajectory};
pub use value::{game_value_sbg, GameValue};

use serde::{Deserialize, Serialize};

use crate::nfg::{check_distribution, l1_distance, PayoffMatrix, SIMPLEX_TOL};
use crate::{Error, Result};

/// ⟨S, A, p, r, γ⟩ with a common agent action set and a common joint
/// opponent action set in every state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticGame {
    n_states: usize,
    n_agent: usize,
    n_opp: usize,
    /// `[s][a][b]`, flattened.
    reward: Vec<f64>,
    /// `[s][a][b][s′]`, flattened.
    transition: Vec<f64>,
    gamma: f64,
    r_max: f64,
}

impl StochasticGame {
    /// `r_max` defaults to the largest |reward|.
    pub fn new(
        reward: Vec<Vec<Vec<f64>>>,
        transition: Vec<Vec<Vec<Vec<f64>>>>,
        gamma: f64,
        r_max: Option<f64>,
    ) -> Result<Self> {
        let n_states = reward.len();
        let n_agent = reward.first().map_or(0, Vec::len);
        let n_opp = reward.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if n_states == 0 || n_agent == 0 || n_opp == 0 {
            return Err(Error::Dimension("game needs states and actions".into()));
        }
        let shape_ok = reward.iter().all(|s| s.len() == n_agent && s.iter().all(|a| a.len() == n_opp))
            && transition.len() == n_states
            && transition.iter().all(|s| {
                s.len() == n_agent && s.iter().all(|a| a.len() == n_opp && a.iter().all(|p| p.len() == n_states))
            });
        if !shape_ok {
            return Err(Error::Dimension("reward/transition tables are ragged".into()));
        }
        let reward: Vec<f64> = reward.into_iter().flatten().flatten().collect();
        let transition: Vec<f64> = transition.into_iter().flatten().flatten().flatten().collect();
        Self::from_flat(n_states, n_agent, n_opp, reward, transition, gamma, r_max)
    }

    pub fn from_flat(
        n_states: usize,
        n_agent: usize,
        n_opp: usize,
        reward: Vec<f64>,
        transition: Vec<f64>,
        gamma: f64,
        r_max: Option<f64>,
    ) -> Result<Self> {
        if reward.len() != n_states * n_agent * n_opp || transition.len() != reward.len() * n_states {
            return Err(Error::Dimension("flat tables have the wrong length".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Invalid(format!("gamma {gamma} outside (0, 1)")));
        }
        if reward.iter().any(|r| !r.is_finite()) {
            return Err(Error::Invalid("non-finite reward".into()));
        }
        for row in transition.chunks(n_states) {
            check_distribution(row, SIMPLEX_TOL)?;
        }
        let largest = reward.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let r_max = match r_max {
            Some(bound) if bound >= largest => bound,
            Some(bound) => {
                return Err(Error::Invalid(format!("reward magnitude {largest} exceeds r_max {bound}")))
            }
            None => largest,
        };
        Ok(Self { n_states, n_agent, n_opp, reward, transition, gamma, r_max })
    }

    /// One state that always returns to itself, with rewards `matrix`.
    pub fn stateless(matrix: &PayoffMatrix, gamma: f64) -> Result<Self> {
        let (a, b) = (matrix.rows(), matrix.cols());
        let reward = (0..a).flat_map(|i| matrix.row(i).to_vec()).collect();
        Self::from_flat(1, a, b, reward, vec![1.0; a * b], gamma, None)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_agent_actions(&self) -> usize {
        self.n_agent
    }

    pub fn n_opponent_actions(&self) -> usize {
        self.n_opp
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn reward(&self, s: usize, a: usize, b: usize) -> f64 {
        self.reward[(s * self.n_agent + a) * self.n_opp + b]
    }

    /// p(· | s, (a, b)).
    pub fn next_states(&self, s: usize, a: usize, b: usize) -> &[f64] {
        let k = ((s * self.n_agent + a) * self.n_opp + b) * self.n_states;
        &self.transition[k..k + self.n_states]
    }

    /// Stage payoff matrix of state `s`.
    pub fn stage_matrix(&self, s: usize) -> PayoffMatrix {
        let k = s * self.n_agent * self.n_opp;
        PayoffMatrix::from_flat(self.n_agent, self.n_opp, self.reward[k..k + self.n_agent * self.n_opp].to_vec())
            .expect("validated on construction")
    }

    /// Same game with rewards shifted by `c` (r_max grows accordingly).
    pub fn shifted(&self, c: f64) -> Self {
        let reward: Vec<f64> = self.reward.iter().map(|r| r + c).collect();
        let r_max = self.r_max + c.abs();
        Self { reward, r_max, ..self.clone() }
    }

    /// Largest possible |V|, r_max / (1 − γ).
    pub fn value_bound(&self) -> f64 {
        self.r_max / (1.0 - self.gamma)
    }
}

/// σ(s; θ): one distribution over joint opponent actions per state and type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyKernel {
    names: Vec<String>,
    /// `[type][state]`.
    dists: Vec<Vec<Vec<f64>>>,
}

impl StrategyKernel {
    pub fn new(names: Vec<String>, dists: Vec<Vec<Vec<f64>>>, game: &StochasticGame) -> Result<Self> {
        if names.is_empty() || names.len() != dists.len() {
            return Err(Error::Invalid("kernel needs one name per type".into()));
        }
        for (name, table) in names.iter().zip(&dists) {
            if table.len() != game.n_states() {
                return Err(Error::Dimension(format!("type `{name}` covers {} states", table.len())));
            }
            for d in table {
                if d.len() != game.n_opponent_actions() {
                    return Err(Error::Dimension(format!("type `{name}` has a distribution of length {}", d.len())));
                }
                check_distribution(d, SIMPLEX_TOL)?;
            }
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate type name `{n}`")));
            }
        }
        Ok(Self { names, dists })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownType(name.to_string()))
    }

    /// σ(·; θ) as a per-state table.
    pub fn sigma(&self, theta: usize) -> &[Vec<f64>] {
        &self.dists[theta]
    }

    /// d(θ, θ′) = max_s ‖σ(s; θ) − σ(s; θ′)‖₁.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.dists[a]
            .iter()
            .zip(&self.dists[b])
            .map(|(x, y)| l1_distance(x, y))
            .fold(0.0, f64::max)
    }
}

/// A stationary distribution over agent actions per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentPolicy {
    probs: Vec<Vec<f64>>,
}

impl AgentPolicy {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("policy covers no states".into()));
        }
        let n = probs[0].len();
        for p in &probs {
            if p.len() != n {
                return Err(Error::Dimension("policy rows differ in length".into()));
            }
            check_distribution(p, SIMPLEX_TOL)?;
        }
        Ok(Self { probs })
    }

    pub fn deterministic(actions: &[usize], n_actions: usize) -> Self {
        let probs = actions
            .iter()
            .map(|&a| {
                let mut p = vec![0.0; n_actions];
                p[a] = 1.0;
                p
            })
            .collect();
        Self { probs }
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    pub fn at(&self, s: usize) -> &[f64] {
        &self.probs[s]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// The action played with certainty in every state, if any.
    pub fn pure_actions(&self) -> Option<Vec<usize>> {
        self.probs.iter().map(|p| p.iter().position(|&v| v == 1.0)).collect()
    }
}

/// V(s) for every state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction(pub Vec<f64>);

impl ValueFunction {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = StochasticGame::stateless(&mp, 0.9).unwrap();
        assert_eq!((g.n_states(), g.n_agent_actions(), g.n_opponent_actions()), (1, 2, 2));
        assert_eq!(g.r_max(), 1.0);
        assert_eq!(g.stage_matrix(0), mp);
        assert!(StochasticGame::stateless(&mp, 1.0).is_err());
        let bad = StochasticGame::new(vec![vec![vec![1.0]]], vec![vec![vec![vec![0.5]]]], 0.5, None);
        assert!(bad.is_err());
        let capped = StochasticGame::new(vec![vec![vec![3.0]]], vec![vec![vec![vec![1.0]]]], 0.5, Some(2.0));
        assert!(capped.is_err());
    }

    #[test]
    fn kernel_distance() {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = StochasticGame::stateless(&mp, 0.9).unwrap();
        let k = StrategyKernel::new(
            vec!["h".into(), "t".into(), "u".into()],
            vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]], vec![vec![0.5, 0.5]]],
            &g,
        )
        .unwrap();
        assert_eq!(k.distance(0, 1), 2.0);
        assert_eq!(k.distance(0, 2), 1.0);
        assert_eq!(k.index_of("t").unwrap(), 1);
        assert!(matches!(k.index_of("x"), Err(Error::UnknownType(_))));
        let dup = StrategyKernel::new(vec!["h".into(), "h".into()], vec![vec![vec![1.0, 0.0]]; 2], &g);
        assert!(dup.is_err());
    }
}
