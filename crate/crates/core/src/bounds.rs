//! Closed-form opportunity/risk envelopes and the adversarial payoff matrix.
//!
//! Normal-form envelopes depend on the game statistics μ, ν, η, κ; the
//! stochastic-game envelopes on γ, r_max and the game value ν.
//!
//! C4 is `(2 − 2γ² + 1)/(1 − γ)²`, evaluated as written, i.e.
//! `(3 − 2γ²)/(1 − γ)²`.

use serde::{Deserialize, Serialize};

use crate::nfg::{kappa_pair, HypothesisSet, PayoffMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NfgEnvelope {
    pub lambda: f64,
    pub upper_opportunity: f64,
    pub upper_risk: f64,
    /// `None` when κ is undefined.
    pub lower_risk_given_opportunity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbgConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbgEnvelope {
    pub lambda: f64,
    pub gamma: f64,
    pub r_max: f64,
    pub nu: f64,
    pub constants: SbgConstants,
    pub upper_opportunity: f64,
    pub upper_risk: f64,
    pub lower_opportunity: f64,
    pub lower_risk: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("lambda {lambda} outside [0, 1]")))
    }
}

/// `((1−λ)(μ−ν), (1−λ)(μ−ν) + λμη)`.
pub fn nfg_upper_bound(mu: f64, nu: f64, eta: f64, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    if !(nu <= mu) {
        return Err(Error::Invalid(format!("nu {nu} exceeds mu {mu}")));
    }
    if !(0.0..=2.0).contains(&eta) {
        return Err(Error::Invalid(format!("eta {eta} outside [0, 2]")));
    }
    let opportunity = (1.0 - lambda) * (mu - nu);
    Ok((opportunity, opportunity + lambda * mu * eta))
}

/// Risk floor `(κμ − ν)(1 + λ)` for strategies missing at most `(1−λ)(μ−ν)`.
pub fn nfg_lower_bound(mu: f64, nu: f64, kappa: Option<f64>, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let kappa = kappa.ok_or(Error::KappaUndefined)?;
    if kappa < 0.0 {
        return Err(Error::Invalid(format!("kappa {kappa} is negative")));
    }
    Ok((kappa * mu - nu) * (1.0 + lambda))
}

pub fn nfg_envelope(mu: f64, nu: f64, eta: f64, kappa: Option<f64>, lambda: f64) -> Result<NfgEnvelope> {
    let (upper_opportunity, upper_risk) = nfg_upper_bound(mu, nu, eta, lambda)?;
    let lower = match kappa {
        Some(k) if k >= 0.0 => Some(nfg_lower_bound(mu, nu, Some(k), lambda)?),
        _ => None,
    };
    Ok(NfgEnvelope { lambda, upper_opportunity, upper_risk, lower_risk_given_opportunity: lower })
}

/// The `a × b` matrix on which every strategy missing at most `(1−λ)(μ−ν)`
/// opportunity incurs the risk floor.
///
/// With `(y′, y″)` the κ-attaining pair and `β = μ − ν`, column `i` is
/// `β·f` when `y′_i > y″_i` and `−β·f` otherwise, where `f = (1, −1, 1, …)`
/// alternates over an even number of rows (an odd `a` leaves its last row at
/// zero); every entry is then shifted by `ν`. Requires `0 ≤ ν < μ` so that
/// `|x⊤Ay| ≤ μ` holds for every hypothesis.
pub fn adversarial_matrix(mu: f64, nu: f64, theta: &HypothesisSet, a: usize, b: usize) -> Result<PayoffMatrix> {
    if a < 2 {
        return Err(Error::Invalid("the adversarial matrix needs at least two rows".into()));
    }
    if theta.dim() != b {
        return Err(Error::Dimension(format!("hypotheses over {} actions, b = {b}", theta.dim())));
    }
    if !(nu >= 0.0 && mu > nu) || !mu.is_finite() {
        return Err(Error::Invalid(format!("need 0 <= nu < mu, got mu {mu}, nu {nu}")));
    }
    let (yp, ypp, _) = kappa_pair(theta).ok_or(Error::KappaUndefined)?;
    let (yp, ypp) = (theta.members()[yp].probs(), theta.members()[ypp].probs());
    let beta = mu - nu;
    let paired = a - a % 2;
    let mut data = Vec::with_capacity(a * b);
    for i in 0..a {
        let f = if i >= paired {
            0.0
        } else if i % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        for j in 0..b {
            let sign = if yp[j] > ypp[j] { 1.0 } else { -1.0 };
            data.push(nu + sign * f * beta);
        }
    }
    PayoffMatrix::from_flat(a, b, data)
}

/// `(C1, C2, C3, C4)` for γ ∈ (0, 1).
pub fn sbg_constants(gamma: f64) -> Result<SbgConstants> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Invalid(format!("gamma {gamma} outside (0, 1)")));
    }
    Ok(constants_unchecked(gamma))
}

fn constants_unchecked(gamma: f64) -> SbgConstants {
    let g2 = gamma * gamma;
    let one_minus = 1.0 - gamma;
    let c1 = (g2 - 3.0 * gamma + 6.0) / (one_minus * one_minus);
    let c3 = (g2 - 3.0 * gamma + 2.0) / one_minus;
    let c4 = (2.0 - 2.0 * g2 + 1.0) / (one_minus * one_minus);
    SbgConstants { c1, c2: c3.max(c4), c3, c4 }
}

/// Upper and lower opportunity/risk envelopes of a stochastic Bayesian game.
pub fn sbg_envelopes(gamma: f64, r_max: f64, nu: f64, lambda: f64) -> Result<SbgEnvelope> {
    check_lambda(lambda)?;
    let constants = sbg_constants(gamma)?;
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(Error::Invalid(format!("r_max {r_max} must be positive")));
    }
    if !(nu.abs() <= r_max / (1.0 - gamma)) {
        return Err(Error::Invalid(format!("|nu| = {} exceeds r_max/(1-gamma)", nu.abs())));
    }
    let denom = 1.0 - lambda * gamma;
    Ok(SbgEnvelope {
        lambda,
        gamma,
        r_max,
        nu,
        constants,
        upper_opportunity: (constants.c1 * r_max - gamma * nu) * (1.0 - lambda) / denom,
        upper_risk: (constants.c2 * r_max - gamma * nu) * (1.0 + lambda) / denom,
        lower_opportunity: (r_max - nu) * (1.0 - lambda) / denom,
        lower_risk: (r_max - nu) * (1.0 + lambda) / denom,
    })
}
