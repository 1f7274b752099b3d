//! JSON game files:
//! `{ "rows": a, "cols": b, "payoffs": [[...]], "theta": [[...], ...] | "full_simplex" }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HypothesisSet, MixedStrategy, PayoffMatrix};
use crate::{Error, Result};

/// Hypotheses read from text may carry rounding in the last printed digit;
/// vectors within this distance of the simplex are renormalized on load.
pub const LOAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Keyword(String),
    Members(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub rows: usize,
    pub cols: usize,
    pub payoffs: Vec<Vec<f64>>,
    pub theta: ThetaSpec,
}

impl GameFile {
    pub fn new(matrix: &PayoffMatrix, theta: &HypothesisSet) -> Self {
        let theta = if theta.is_full_simplex() {
            ThetaSpec::Keyword("full_simplex".into())
        } else {
            ThetaSpec::Members(theta.members().iter().map(|m| m.probs().to_vec()).collect())
        };
        Self { rows: matrix.rows(), cols: matrix.cols(), payoffs: matrix.to_rows(), theta }
    }

    pub fn resolve(&self) -> Result<(PayoffMatrix, HypothesisSet)> {
        let matrix = PayoffMatrix::new(self.payoffs.clone())?;
        if matrix.rows() != self.rows || matrix.cols() != self.cols {
            return Err(Error::Dimension(format!(
                "declared {}x{}, payoffs are {}x{}",
                self.rows,
                self.cols,
                matrix.rows(),
                matrix.cols()
            )));
        }
        let theta = match &self.theta {
            ThetaSpec::Keyword(k) if k == "full_simplex" => HypothesisSet::full_simplex(self.cols),
            ThetaSpec::Keyword(k) => return Err(Error::Invalid(format!("unknown theta keyword `{k}`"))),
            ThetaSpec::Members(ms) => HypothesisSet::new(
                ms.iter().map(|m| load_strategy(m)).collect::<Result<Vec<_>>>()?,
            )?,
        };
        if theta.dim() != matrix.cols() {
            return Err(Error::Dimension("theta members do not match the column count".into()));
        }
        Ok((matrix, theta))
    }
}

pub(crate) fn load_strategy(p: &[f64]) -> Result<MixedStrategy> {
    super::check_distribution(p, LOAD_TOL)?;
    MixedStrategy::from_weights(p.to_vec())
}

pub fn read_game(path: &Path) -> Result<(PayoffMatrix, HypothesisSet)> {
    let file: GameFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    file.resolve()
}

pub fn write_game(path: &Path, matrix: &PayoffMatrix, theta: &HypothesisSet) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&GameFile::new(matrix, theta))?)?;
    Ok(())
}
