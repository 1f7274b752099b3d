//! JSON files describing a stochastic Bayesian game.
//!
//! ```json
//! {
//!   "states": ["s0", "s1"],
//!   "agent_actions": ["a", "b"],
//!   "opponent_actions": ["x", "y"],
//!   "gamma": 0.9,
//!   "r_max": 1.0,
//!   "reward": [[[1, -1], [-1, 1]], ...],          // [s][a][a′]
//!   "transition": [[[[0.5, 0.5], ...], ...], ...], // [s][a][a′][s′]
//!   "kernel": { "type-name": [[0.5, 0.5], ...] },  // [s][a′] per type
//!   "type_set": ["type-name"]
//! }
//! ```
//!
//! Kernel order in the file is the type order. `r_max` and `type_set` are
//! optional (defaults: largest |reward|, every kernel entry). Distributions
//! may be off by up to [`LOAD_TOL`](crate::nfg::io::LOAD_TOL) and are renormalized.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{StochasticGame, StrategyKernel};
use crate::nfg::io::LOAD_TOL;
use crate::nfg::check_distribution;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbgFile {
    pub states: Vec<String>,
    pub agent_actions: Vec<String>,
    pub opponent_actions: Vec<String>,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    pub reward: Vec<Vec<Vec<f64>>>,
    pub transition: Vec<Vec<Vec<Vec<f64>>>>,
    pub kernel: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_set: Option<Vec<String>>,
}

fn normalized(p: &[f64]) -> Result<Vec<f64>> {
    check_distribution(p, LOAD_TOL)?;
    let total: f64 = p.iter().sum();
    Ok(p.iter().map(|v| v / total).collect())
}

/// A loaded game: the game, its kernel and the selected type set.
#[derive(Debug, Clone)]
pub struct LoadedSbg {
    pub game: StochasticGame,
    pub kernel: StrategyKernel,
    pub types: Vec<usize>,
    pub state_names: Vec<String>,
}

impl SbgFile {
    pub fn resolve(&self) -> Result<LoadedSbg> {
        let n = self.states.len();
        if self.reward.len() != n || self.transition.len() != n {
            return Err(Error::Dimension(format!("{n} states named, tables disagree")));
        }
        let (na, nb) = (self.agent_actions.len(), self.opponent_actions.len());
        if self.reward.iter().any(|s| s.len() != na || s.iter().any(|a| a.len() != nb)) {
            return Err(Error::Dimension("reward table does not match the action sets".into()));
        }
        let mut transition = self.transition.clone();
        for p in transition.iter_mut().flatten().flatten() {
            *p = normalized(p)?;
        }
        let game = StochasticGame::new(self.reward.clone(), transition, self.gamma, self.r_max)?;
        let mut names = Vec::with_capacity(self.kernel.len());
        let mut dists = Vec::with_capacity(self.kernel.len());
        for (name, value) in &self.kernel {
            let table: Vec<Vec<f64>> = serde_json::from_value(value.clone())?;
            names.push(name.clone());
            dists.push(table.iter().map(|d| normalized(d)).collect::<Result<Vec<_>>>()?);
        }
        let kernel = StrategyKernel::new(names, dists, &game)?;
        let types = match &self.type_set {
            Some(set) => set.iter().map(|t| kernel.index_of(t)).collect::<Result<Vec<_>>>()?,
            None => (0..kernel.len()).collect(),
        };
        Ok(LoadedSbg { game, kernel, types, state_names: self.states.clone() })
    }

    pub fn from_parts(
        game: &StochasticGame,
        kernel: &StrategyKernel,
        types: Option<&[usize]>,
        state_names: Option<Vec<String>>,
    ) -> Self {
        let (n, na, nb) = (game.n_states(), game.n_agent_actions(), game.n_opponent_actions());
        let label = |p: &str, k: usize| (0..k).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let reward = (0..n)
            .map(|s| (0..na).map(|a| (0..nb).map(|b| game.reward(s, a, b)).collect()).collect())
            .collect();
        let transition = (0..n)
            .map(|s| (0..na).map(|a| (0..nb).map(|b| game.next_states(s, a, b).to_vec()).collect()).collect())
            .collect();
        let kernel_map = kernel
            .names()
            .iter()
            .enumerate()
            .map(|(t, name)| (name.clone(), serde_json::json!(kernel.sigma(t))))
            .collect();
        Self {
            states: state_names.unwrap_or_else(|| label("s", n)),
            agent_actions: label("a", na),
            opponent_actions: label("b", nb),
            gamma: game.gamma(),
            r_max: Some(game.r_max()),
            reward,
            transition,
            kernel: kernel_map,
            type_set: types.map(|ts| ts.iter().map(|&t| kernel.names()[t].clone()).collect()),
        }
    }
}

pub fn read_sbg(path: &Path) -> Result<LoadedSbg> {
    let file: SbgFile = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
    file.resolve()
}

pub fn write_sbg(path: &Path, file: &SbgFile) -> Result<()> {
    let text = serde_json::to_string_pretty(file)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::PayoffMatrix;

    #[test]
    fn round_trip() {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = StochasticGame::stateless(&mp, 0.9).unwrap();
        let k = StrategyKernel::new(
            vec!["tails".into(), "heads".into()],
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            &g,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        write_sbg(&path, &SbgFile::from_parts(&g, &k, Some(&[1]), None)).unwrap();
        let back = read_sbg(&path).unwrap();
        assert_eq!(back.game, g);
        assert_eq!(back.kernel.names(), &["tails".to_string(), "heads".to_string()]);
        assert_eq!(back.types, vec![1]);
    }

    #[test]
    fn unknown_type_in_set() {
        let text = r#"{"states":["s"],"agent_actions":["a"],"opponent_actions":["x"],"gamma":0.5,
            "reward":[[[1.0]]],"transition":[[[[1.0]]]],"kernel":{"k":[[1.0]]},"type_set":["nope"]}"#;
        let file: SbgFile = serde_json::from_str(text).unwrap();
        assert!(matches!(file.resolve(), Err(Error::UnknownType(_))));
    }
}
