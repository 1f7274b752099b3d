//! λ-sweeps on normal-form games.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{consistent, summarize, validate_lambdas};
use crate::bounds::nfg_envelope;
use crate::casestudies::{adjusted_matching_pennies, matching_pennies, mp_amp_instances};
use crate::nfg::io::read_game;
use crate::nfg::{
    best_response_row, opportunity_risk_nfg, theta_stats, Belief, BeliefSearch, GapWitness, HypothesisSet,
    LambdaPolicy, PayoffMatrix, StrategyMap,
};
use crate::optimizer::maximin_strategy;
use crate::rng::{sample_index, stream};
use crate::{Error, Result};

/// Slack when checking exact gaps against their upper envelope.
const ENVELOPE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NfgTradeoffConfig {
    pub lambda_grid: Vec<f64>,
    /// Independent runs per λ and metric.
    pub runs: usize,
    /// Rounds per run.
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NfgTradeoffRow {
    pub lambda: f64,
    pub exact_opportunity: f64,
    pub exact_risk: f64,
    pub opportunity_mean: f64,
    pub opportunity_sd: f64,
    pub opportunity_ci: f64,
    pub risk_mean: f64,
    pub risk_sd: f64,
    pub risk_ci: f64,
    pub upper_opportunity: f64,
    pub upper_risk: f64,
    /// Risk floor for strategies with at most the upper opportunity; empty
    /// when κ is undefined.
    pub lower_risk: Option<f64>,
    pub within_envelope: bool,
    /// Both empirical means within four standard errors of the exact values.
    pub consistent: bool,
}

/// Built-in games `mp`/`amp` (default hypothesis set: the four stationary
/// pennies types) or a game file. `theta` overrides the hypothesis set with
/// `full`, `pennies` or a JSON file holding a list of distributions.
pub fn resolve_nfg(game: &str, theta: Option<&str>) -> Result<(PayoffMatrix, HypothesisSet)> {
    let (matrix, default_theta) = match game {
        "mp" => (matching_pennies(), mp_amp_instances()?.2),
        "amp" => (adjusted_matching_pennies(), mp_amp_instances()?.2),
        path => read_game(Path::new(path))?,
    };
    let theta = match theta {
        None => default_theta,
        Some("full") => HypothesisSet::full_simplex(matrix.cols()),
        Some("pennies") => mp_amp_instances()?.2,
        Some(path) => {
            let members: Vec<Vec<f64>> =
                serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
            HypothesisSet::from_vectors(members)?
        }
    };
    if theta.dim() != matrix.cols() {
        return Err(Error::Dimension(format!(
            "hypothesis set over {} actions for a game with {} columns",
            theta.dim(),
            matrix.cols()
        )));
    }
    Ok((matrix, theta))
}

/// Per-run mean of `A[br][b] − A[a][b]` with `a ∼ π(ρ)`, `b ∼ y⋆`: an
/// unbiased estimate of the gap at the witness.
fn sample_gaps(
    matrix: &PayoffMatrix,
    theta: &HypothesisSet,
    policy: &LambdaPolicy,
    witness: &GapWitness,
    cfg: &NfgTradeoffConfig,
    cell: [u64; 2],
) -> Result<Vec<f64>> {
    let belief = Belief::new(witness.belief.clone(), theta)?;
    let x = policy.strategy(&belief);
    let y = theta.members()[witness.truth].probs();
    let br = best_response_row(matrix, y);
    Ok((0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = stream(cfg.seed, &[cell[0], cell[1], run as u64]);
            let total: f64 = (0..cfg.horizon)
                .map(|_| {
                    let a = sample_index(&mut rng, x.probs());
                    let b = sample_index(&mut rng, y);
                    matrix.get(br, b) - matrix.get(a, b)
                })
                .sum();
            total / cfg.horizon as f64
        })
        .collect())
}

pub fn run_tradeoff_nfg(
    matrix: &PayoffMatrix,
    theta: &HypothesisSet,
    cfg: &NfgTradeoffConfig,
) -> Result<Vec<NfgTradeoffRow>> {
    validate_lambdas(&cfg.lambda_grid)?;
    if cfg.runs == 0 || cfg.horizon == 0 {
        return Err(Error::Invalid("runs and horizon must be at least 1".into()));
    }
    let stats = theta_stats(theta, matrix)?;
    let safe = maximin_strategy(matrix, theta)?;
    cfg.lambda_grid
        .iter()
        .enumerate()
        .map(|(li, &lambda)| {
            let policy = LambdaPolicy::with_safe(matrix, theta, lambda, safe.clone())?;
            let report = opportunity_risk_nfg(matrix, theta, &policy, &[], BeliefSearch::default())?;
            let env = nfg_envelope(stats.mu, stats.nu, stats.eta, stats.kappa, lambda)?;
            // Not a hard error: the envelope is stated with ν as the value of
            // the game, and the λ-policy only guarantees the maximin payoff,
            // which can be lower when Θ is not the full simplex.
            let within_envelope = report.opportunity <= env.upper_opportunity + ENVELOPE_TOL
                && report.risk <= env.upper_risk + ENVELOPE_TOL;
            if !within_envelope {
                log::warn!(
                    "lambda {lambda}: (opportunity, risk) = ({}, {}) above ({}, {})",
                    report.opportunity, report.risk, env.upper_opportunity, env.upper_risk
                );
            }
            let opp = sample_gaps(matrix, theta, &policy, &report.opportunity_witness, cfg, [li as u64, 0])?;
            let risk = sample_gaps(matrix, theta, &policy, &report.risk_witness, cfg, [li as u64, 1])?;
            let (so, sr) = (summarize(&opp), summarize(&risk));
            Ok(NfgTradeoffRow {
                lambda,
                exact_opportunity: report.opportunity,
                exact_risk: report.risk,
                opportunity_mean: so.mean,
                opportunity_sd: so.sd,
                opportunity_ci: so.ci,
                risk_mean: sr.mean,
                risk_sd: sr.sd,
                risk_ci: sr.ci,
                upper_opportunity: env.upper_opportunity,
                upper_risk: env.upper_risk,
                lower_risk: env.lower_risk_given_opportunity,
                within_envelope,
                consistent: consistent(&so, cfg.runs, report.opportunity, 0.0)
                    && consistent(&sr, cfg.runs, report.risk, 0.0),
            })
        })
        .collect()
}
