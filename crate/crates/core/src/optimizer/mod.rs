//! Linear programming and the maximin (safe) strategy.

mod simplex;

pub use simplex::{
    solve_lp, Constraint, LinearProgram, LpSolution, Relation, CERTIFICATE_TOL, DEFAULT_PIVOT_LIMIT,
    FEASIBILITY_TOL, OPTIMALITY_TOL,
};

use serde::{Deserialize, Serialize};

use crate::nfg::{bilinear, HypothesisSet, MixedStrategy, PayoffMatrix};
use crate::{Error, Result};

/// Members within this distance of the guaranteed value are reported tight.
const TIGHT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximinResult {
    /// x̄.
    pub strategy: MixedStrategy,
    /// min over Θ of x̄⊤Ay.
    pub value: f64,
    /// Indices of the members of Θ attaining the minimum.
    pub tight_set: Vec<usize>,
}

/// Solves `max v` s.t. `x⊤A y ≥ v` for every hypothesis `y`, `x` on the simplex.
///
/// For the full simplex only the pure columns are constrained.
pub fn maximin_strategy(a: &PayoffMatrix, theta: &HypothesisSet) -> Result<MaximinResult> {
    if theta.dim() != a.cols() {
        return Err(Error::Dimension(format!(
            "hypotheses over {} actions, matrix has {} columns",
            theta.dim(),
            a.cols()
        )));
    }
    let columns: Vec<Vec<f64>> = if theta.is_full_simplex() {
        (0..a.cols()).map(|j| (0..a.rows()).map(|i| a.get(i, j)).collect()).collect()
    } else {
        theta.members().iter().map(|y| a.row_values(y.probs())).collect()
    };
    let (strategy, _) = maximin_over_columns(a.rows(), &columns)?;
    let values: Vec<f64> = theta.members().iter().map(|y| bilinear(strategy.probs(), a, y.probs())).collect();
    let value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tight_set = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v <= value + TIGHT_TOL)
        .map(|(i, _)| i)
        .collect();
    Ok(MaximinResult { strategy, value, tight_set })
}

/// Maximin over explicit payoff columns (each of length `rows`): returns x̄
/// and `min_j x̄·column_j`.
pub fn maximin_over_columns(rows: usize, columns: &[Vec<f64>]) -> Result<(MixedStrategy, f64)> {
    if rows == 0 || columns.is_empty() || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Dimension("maximin needs rows and equal-length columns".into()));
    }
    if rows == 1 {
        let x = MixedStrategy::pure(1, 0);
        let v = columns.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
        return Ok((x, v));
    }
    // Variables: x_0..x_{rows-1} ≥ 0, then the free value v.
    let mut objective = vec![0.0; rows + 1];
    objective[rows] = 1.0;
    let mut lp = LinearProgram::maximize(objective).bounds(rows, f64::NEG_INFINITY, f64::INFINITY);
    for col in columns {
        let mut coeffs = col.clone();
        coeffs.push(-1.0);
        lp = lp.constraint(coeffs, Relation::Ge, 0.0);
    }
    let mut simplex_row = vec![1.0; rows];
    simplex_row.push(0.0);
    lp = lp.constraint(simplex_row, Relation::Eq, 1.0);
    let sol = solve_lp(&lp)?;
    let x = MixedStrategy::from_weights(sol.x[..rows].iter().map(|v| v.max(0.0)).collect())?;
    let v = columns
        .iter()
        .map(|c| c.iter().zip(x.probs()).map(|(a, p)| a * p).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok((x, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn matching_pennies() {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let r = maximin_strategy(&mp, &HypothesisSet::full_simplex(2)).unwrap();
        assert!(close(r.strategy.probs(), &[0.5, 0.5]));
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn dominated_row() {
        let a = PayoffMatrix::new(vec![vec![2.0, 2.0], vec![1.0, 1.0]]).unwrap();
        let theta = HypothesisSet::from_vectors(vec![vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
        let r = maximin_strategy(&a, &theta).unwrap();
        assert!(close(r.strategy.probs(), &[1.0, 0.0]));
        assert!((r.value - 2.0).abs() < 1e-12);
        assert_eq!(r.tight_set, vec![0, 1]);
    }

    #[test]
    fn rock_paper_scissors() {
        let rps = PayoffMatrix::new(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap();
        let r = maximin_strategy(&rps, &HypothesisSet::full_simplex(3)).unwrap();
        assert!(close(r.strategy.probs(), &[1.0 / 3.0; 3]));
        assert!(r.value.abs() < 1e-12);
        // Every pure deviation of the row player is exploited by some column.
        for i in 0..3 {
            let worst = (0..3).map(|j| rps.get(i, j)).fold(f64::INFINITY, f64::min);
            assert!(worst < r.value - 0.5);
        }
    }

    #[test]
    fn single_row_is_trivial() {
        let a = PayoffMatrix::new(vec![vec![3.0, -1.0]]).unwrap();
        let r = maximin_strategy(&a, &HypothesisSet::full_simplex(2)).unwrap();
        assert_eq!(r.value, -1.0);
    }
}
