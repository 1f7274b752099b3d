//! Envelope curves over a (γ, λ) grid.

use serde::{Deserialize, Serialize};

use super::validate_lambdas;
use crate::bounds::sbg_envelopes;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub gamma: f64,
    pub lambda: f64,
    pub upper_opportunity: f64,
    pub upper_risk: f64,
    pub lower_opportunity: f64,
    pub lower_risk: f64,
}

pub fn emit_bound_curves(gammas: &[f64], r_max: f64, nu: f64, lambda_grid: &[f64]) -> Result<Vec<BoundRow>> {
    validate_lambdas(lambda_grid)?;
    let mut rows = Vec::with_capacity(gammas.len() * lambda_grid.len());
    for &gamma in gammas {
        for &lambda in lambda_grid {
            let e = sbg_envelopes(gamma, r_max, nu, lambda)?;
            rows.push(BoundRow {
                gamma,
                lambda,
                upper_opportunity: e.upper_opportunity,
                upper_risk: e.upper_risk,
                lower_opportunity: e.lower_opportunity,
                lower_risk: e.lower_risk,
            });
        }
    }
    Ok(rows)
}
