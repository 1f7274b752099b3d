//! λ-sweep over every strictly ordinal 2×2 game class.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::validate_lambdas;
use crate::bounds::nfg_envelope;
use crate::casestudies::enumerate_ordinal_2x2;
use crate::nfg::{opportunity_risk_nfg, theta_stats, BeliefSearch, HypothesisSet, LambdaPolicy};
use crate::optimizer::maximin_strategy;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyRow {
    pub class_id: u32,
    /// Row player's ranks, row-major.
    pub row_payoffs: String,
    pub col_payoffs: String,
    pub lambda: f64,
    pub opportunity: f64,
    pub risk: f64,
    pub mu: f64,
    pub nu: f64,
    pub upper_opportunity: f64,
    pub upper_risk: f64,
}

/// The row player of each class against the full simplex of column
/// strategies (vertices plus the uniform mix).
pub fn run_topology(lambda_grid: &[f64]) -> Result<Vec<TopologyRow>> {
    validate_lambdas(lambda_grid)?;
    let theta = HypothesisSet::full_simplex(2);
    let per_class: Vec<Result<Vec<TopologyRow>>> = enumerate_ordinal_2x2()
        .par_iter()
        .map(|g| {
            let m = g.row_matrix();
            let stats = theta_stats(&theta, &m)?;
            let safe = maximin_strategy(&m, &theta)?;
            let flat = |t: [[u8; 2]; 2]| format!("{}{}{}{}", t[0][0], t[0][1], t[1][0], t[1][1]);
            lambda_grid
                .iter()
                .map(|&lambda| {
                    let policy = LambdaPolicy::with_safe(&m, &theta, lambda, safe.clone())?;
                    let r = opportunity_risk_nfg(&m, &theta, &policy, &[], BeliefSearch::default())?;
                    let env = nfg_envelope(stats.mu, stats.nu, stats.eta, stats.kappa, lambda)?;
                    Ok(TopologyRow {
                        class_id: g.canonical_id(),
                        row_payoffs: flat(g.row),
                        col_payoffs: flat(g.col),
                        lambda,
                        opportunity: r.opportunity,
                        risk: r.risk,
                        mu: stats.mu,
                        nu: stats.nu,
                        upper_opportunity: env.upper_opportunity,
                        upper_risk: env.upper_risk,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_class {
        rows.extend(r?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_class_within_envelope() {
        let rows = run_topology(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 78 * 3);
        for r in &rows {
            assert!(r.opportunity <= r.upper_opportunity + 1e-9, "{r:?}");
            assert!(r.risk <= r.upper_risk + 1e-9, "{r:?}");
        }
    }
}
