//! λ-sweeps on stochastic Bayesian games, exact and simulated.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{consistent, summarize, validate_lambdas};
use crate::behavior::{read_type_set, BehaviorSpec, NamedBehavior};
use crate::bounds::sbg_envelopes;
use crate::casestudies::{
    adjusted_matching_pennies, build_green_security_game, ingest_movement, ingest_movement_csv, matching_pennies, pennies_type_set,
    security_type_set, synth_movement_data, GridBounds,
};
use crate::rng::derive_seed;
use crate::sbg::io::read_sbg;
use crate::sbg::{
    opportunity_risk_sbg, policy_evaluation, simulate_episode, PolicyBuilder, PolicyKind, SbgModel, StrategyKernel,
};
use crate::{Error, Result};

/// Relative slack when checking exact gaps against their envelopes.
const ENVELOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SbgSource {
    /// Single-state (adjusted) matching pennies with the six pennies types.
    Pennies { adjusted: bool },
    /// Security game over a movement CSV, or synthetic tracks when absent.
    Security { data: Option<PathBuf>, bounds: GridBounds, adjacency_boost: f64 },
    /// Game JSON; the type set defaults to the file's kernel.
    File { path: PathBuf, type_set: Option<PathBuf> },
}

/// A resolved game with every behavior (stationary or not) that can be
/// simulated, and where each stationary one sits in the model's kernel.
#[derive(Debug, Clone)]
pub struct SbgSetup {
    pub model: SbgModel,
    pub behaviors: Vec<NamedBehavior>,
    pub kernel_index: Vec<Option<usize>>,
}

fn from_kernel(kernel: &StrategyKernel) -> Vec<NamedBehavior> {
    kernel
        .names()
        .iter()
        .enumerate()
        .map(|(t, name)| NamedBehavior {
            name: name.clone(),
            spec: BehaviorSpec::Markovian { table: kernel.sigma(t).to_vec() },
        })
        .collect()
}

fn setup_from_set(
    game: crate::sbg::StochasticGame,
    set: crate::behavior::TypeSetFile,
) -> Result<SbgSetup> {
    let (kernel, positions) = set.kernel(&game)?;
    let mut kernel_index = vec![None; set.types.len()];
    for (k, &p) in positions.iter().enumerate() {
        kernel_index[p] = Some(k);
    }
    Ok(SbgSetup { model: SbgModel::with_all_types(game, kernel)?, behaviors: set.types, kernel_index })
}

/// `gamma` applies to built-in games; game files carry their own.
pub fn resolve_sbg(source: &SbgSource, gamma: f64, seed: u64) -> Result<SbgSetup> {
    match source {
        SbgSource::Pennies { adjusted } => {
            let m = if *adjusted { adjusted_matching_pennies() } else { matching_pennies() };
            let game = crate::sbg::StochasticGame::stateless(&m, gamma)?;
            setup_from_set(game, pennies_type_set(&m, seed)?)
        }
        SbgSource::Security { data, bounds, adjacency_boost } => {
            let world = match data {
                Some(path) => ingest_movement_csv(path, *bounds)?.0,
                None => ingest_movement(synth_movement_data(seed, 32, 8, *bounds)?.as_bytes(), *bounds)?.0,
            };
            let sg = build_green_security_game(&world, *adjacency_boost, gamma)?;
            let set = security_type_set(&sg, seed)?;
            setup_from_set(sg.defender, set)
        }
        SbgSource::File { path, type_set } => {
            let loaded = read_sbg(path)?;
            match type_set {
                Some(ts) => setup_from_set(loaded.game, read_type_set(ts)?),
                None => {
                    let all = from_kernel(&loaded.kernel);
                    let behaviors: Vec<NamedBehavior> = loaded.types.iter().map(|&t| all[t].clone()).collect();
                    let kernel_index = loaded.types.iter().map(|&t| Some(t)).collect();
                    let model = SbgModel::new(loaded.game, loaded.kernel, loaded.types)?;
                    Ok(SbgSetup { model, behaviors, kernel_index })
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbgTradeoffConfig {
    pub lambda_grid: Vec<f64>,
    /// Episodes per (λ, true type).
    pub runs: usize,
    pub horizon: usize,
    pub seed: u64,
    pub policy: PolicyKind,
    /// Believed type; defaults to the first stationary type.
    pub belief: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbgTradeoffRow {
    pub lambda: f64,
    pub belief: String,
    pub true_type: String,
    pub stationary: bool,
    /// V^{π, σ(θ⋆)} averaged over a uniform initial state.
    pub exact_value: Option<f64>,
    /// V^{⋆, σ(θ⋆)} averaged over a uniform initial state.
    pub optimal_value: Option<f64>,
    /// max_s (V^{⋆} − V^{π}) for this pair.
    pub exact_gap: Option<f64>,
    pub return_mean: f64,
    pub return_sd: f64,
    pub return_ci: f64,
    pub beta: f64,
    pub delta: f64,
    pub upper_opportunity: f64,
    pub upper_risk: f64,
    pub lower_opportunity: f64,
    pub lower_risk: f64,
    /// Empirical return within four standard errors (plus truncation
    /// error) of the exact value; empty for non-stationary types.
    pub consistent: Option<bool>,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn run_tradeoff_sbg(setup: &SbgSetup, cfg: &SbgTradeoffConfig) -> Result<Vec<SbgTradeoffRow>> {
    validate_lambdas(&cfg.lambda_grid)?;
    if cfg.runs == 0 || cfg.horizon == 0 {
        return Err(Error::Invalid("runs and horizon must be at least 1".into()));
    }
    let model = &setup.model;
    let game = model.game();
    let belief = match &cfg.belief {
        Some(name) => model.kernel().index_of(name)?,
        None => model.types()[0],
    };
    if !model.types().contains(&belief) {
        return Err(Error::UnknownType(model.kernel().names()[belief].clone()));
    }
    let nu = model.game_value().nu;
    let initial = vec![1.0 / game.n_states() as f64; game.n_states()];
    let truncation = game.gamma().powi(cfg.horizon as i32) * game.value_bound();
    let mut rows = Vec::new();
    for (li, &lambda) in cfg.lambda_grid.iter().enumerate() {
        let report = opportunity_risk_sbg(model, &cfg.policy, lambda)?;
        let env = sbg_envelopes(game.gamma(), game.r_max(), nu, lambda)?;
        let tol = ENVELOPE_TOL * (1.0 + game.value_bound());
        if report.opportunity > env.upper_opportunity + tol || report.risk > env.upper_risk + tol {
            return Err(Error::Envelope(format!(
                "lambda {lambda}: (beta, delta) = ({}, {}) above ({}, {})",
                report.opportunity, report.risk, env.upper_opportunity, env.upper_risk
            )));
        }
        let pi = cfg.policy.build(model, belief, lambda)?;
        for (ti, behavior) in setup.behaviors.iter().enumerate() {
            let returns: Vec<f64> = (0..cfg.runs)
                .into_par_iter()
                .map(|run| {
                    let seed = derive_seed(cfg.seed, &[li as u64, ti as u64, run as u64]);
                    simulate_episode(game, &pi, &behavior.spec, &initial, cfg.horizon, seed).map(|t| t.discounted_return)
                })
                .collect::<Result<_>>()?;
            let s = summarize(&returns);
            let exact = match setup.kernel_index[ti] {
                Some(k) => {
                    let v = policy_evaluation(game, &pi, model.kernel().sigma(k))?;
                    let (opt, _) = model.optimal(k)?;
                    let gap = opt.values().iter().zip(v.values()).map(|(o, p)| o - p).fold(f64::NEG_INFINITY, f64::max);
                    Some((mean(v.values()), mean(opt.values()), gap))
                }
                None => None,
            };
            rows.push(SbgTradeoffRow {
                lambda,
                belief: model.kernel().names()[belief].clone(),
                true_type: behavior.name.clone(),
                stationary: exact.is_some(),
                exact_value: exact.map(|e| e.0),
                optimal_value: exact.map(|e| e.1),
                exact_gap: exact.map(|e| e.2),
                return_mean: s.mean,
                return_sd: s.sd,
                return_ci: s.ci,
                beta: report.opportunity,
                delta: report.risk,
                upper_opportunity: env.upper_opportunity,
                upper_risk: env.upper_risk,
                lower_opportunity: env.lower_opportunity,
                lower_risk: env.lower_risk,
                consistent: exact.map(|e| consistent(&s, cfg.runs, e.0, truncation)),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pennies_rows() {
        let setup = resolve_sbg(&SbgSource::Pennies { adjusted: false }, 0.9, 3).unwrap();
        assert_eq!(setup.behaviors.len(), 6);
        assert_eq!(setup.kernel_index, vec![Some(0), Some(1), Some(2), Some(3), None, None]);
        let cfg = SbgTradeoffConfig {
            lambda_grid: vec![0.0, 1.0],
            runs: 20,
            horizon: 30,
            seed: 1,
            policy: PolicyKind::Blend,
            belief: None,
        };
        let rows = run_tradeoff_sbg(&setup, &cfg).unwrap();
        assert_eq!(rows.len(), 12);
        assert!((rows[0].beta - 10.0).abs() < 1e-6 && (rows[6].delta - 20.0).abs() < 1e-6);
        // λ = 1 with the belief "action 0" against that same type: no loss.
        assert!(rows[6].exact_gap.unwrap().abs() < 1e-9);
        assert_eq!(rows, run_tradeoff_sbg(&setup, &cfg).unwrap());
    }
}
