//! Dense two-phase primal simplex with Bland's rule.
//!
//! Variable bounds are removed up front: a finite lower bound becomes a
//! shift, an upper-only bound a reflection, a free variable a split, and a
//! finite upper bound alongside a finite lower bound an extra `≤` row. The
//! remaining problem is `max cᵀx, Ax (≤|≥|=) b, x ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::LpError;

pub const FEASIBILITY_TOL: f64 = 1e-9;
pub const OPTIMALITY_TOL: f64 = 1e-9;
pub const CERTIFICATE_TOL: f64 = 1e-8;
pub const DEFAULT_PIVOT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x` subject to `constraints` and `lower ≤ x ≤ upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub pivot_limit: usize,
}

impl LinearProgram {
    /// All variables default to `[0, ∞)`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            pivot_limit: DEFAULT_PIVOT_LIMIT,
        }
    }

    pub fn constraint(mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn bounds(mut self, var: usize, lower: f64, upper: f64) -> Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if n == 0 {
            return Err(LpError::Malformed("no variables".into()));
        }
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::Malformed("bound vectors have the wrong length".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("non-finite objective coefficient".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!("constraint {i} has {} coefficients", c.coeffs.len())));
            }
            if c.coeffs.iter().any(|v| !v.is_finite()) || !c.rhs.is_finite() {
                return Err(LpError::Malformed(format!("constraint {i} is not finite")));
            }
        }
        if self.lower.iter().any(|l| l.is_nan() || *l == f64::INFINITY)
            || self.upper.iter().any(|u| u.is_nan() || *u == f64::NEG_INFINITY)
        {
            return Err(LpError::Malformed("invalid variable bound".into()));
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v / (1.0 + c.rhs.abs()));
        }
        for ((xi, lo), hi) in x.iter().zip(&self.lower).zip(&self.upper) {
            worst = worst.max(lo - xi).max(xi - hi);
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

enum VarMap {
    Shift { col: usize, lo: f64 },
    Reflect { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// m rows of `ncols + 1` entries, the last being the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
    limit: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Maximizes `cost·x` over columns `allowed`, Bland's rule throughout.
    fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<(), LpError> {
        loop {
            let entering = (0..self.ncols).find(|&j| {
                if !allowed(j) || self.basis.contains(&j) {
                    return false;
                }
                let zj: f64 = self.basis.iter().enumerate().map(|(i, &b)| cost[b] * self.rows[i][j]).sum();
                cost[j] - zj > OPTIMALITY_TOL
            });
            let Some(c) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > FEASIBILITY_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[r] {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else { return Err(LpError::Unbounded) };
            if self.pivots >= self.limit {
                return Err(LpError::IterationLimit(self.pivots));
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `lp`, returning an optimal vertex or a distinct failure status.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut extra_rows: Vec<(usize, f64)> = Vec::new();
    let mut ns = 0;
    for j in 0..n {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        if lo > hi {
            return Err(LpError::Infeasible);
        }
        if lo.is_finite() {
            if hi.is_finite() {
                extra_rows.push((ns, hi - lo));
            }
            maps.push(VarMap::Shift { col: ns, lo });
            ns += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Reflect { col: ns, hi });
            ns += 1;
        } else {
            maps.push(VarMap::Split { pos: ns, neg: ns + 1 });
            ns += 2;
        }
    }

    let transform = |coeffs: &[f64]| -> (Vec<f64>, f64) {
        let mut row = vec![0.0; ns];
        let mut offset = 0.0;
        for (a, map) in coeffs.iter().zip(&maps) {
            match *map {
                VarMap::Shift { col, lo } => {
                    row[col] += a;
                    offset += a * lo;
                }
                VarMap::Reflect { col, hi } => {
                    row[col] -= a;
                    offset += a * hi;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        (row, offset)
    };

    let mut std_rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            let (row, offset) = transform(&c.coeffs);
            (row, c.relation, c.rhs - offset)
        })
        .collect();
    for (col, width) in extra_rows {
        let mut row = vec![0.0; ns];
        row[col] = 1.0;
        std_rows.push((row, Relation::Le, width));
    }
    for (row, rel, rhs) in std_rows.iter_mut() {
        if *rhs < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = std_rows.len();
    let n_slack = std_rows.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
    let n_art = std_rows.iter().filter(|(_, r, _)| *r != Relation::Le).count();
    let ncols = ns + n_slack + n_art;
    let art_start = ns + n_slack;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (ns, art_start);
    for (coeffs, rel, rhs) in &std_rows {
        let mut row = vec![0.0; ncols + 1];
        row[..ns].copy_from_slice(coeffs);
        row[ncols] = *rhs;
        match rel {
            Relation::Le => {
                row[s] = 1.0;
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -1.0;
                s += 1;
                row[a] = 1.0;
                basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = 1.0;
                basis.push(a);
                a += 1;
            }
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, ncols, pivots: 0, limit: lp.pivot_limit };

    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        cost[art_start..].iter_mut().for_each(|c| *c = -1.0);
        tab.optimize(&cost, &|_| true)?;
        let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= art_start).map(|i| tab.rhs(i)).sum();
        if infeasibility > FEASIBILITY_TOL {
            return Err(LpError::Infeasible);
        }
        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are linear combinations of the others.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| tab.rows[i][j].abs() > FEASIBILITY_TOL) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let (obj_row, obj_offset) = transform(&lp.objective);
    let mut cost = vec![0.0; ncols];
    cost[..ns].copy_from_slice(&obj_row);
    tab.optimize(&cost, &|j| j < art_start)?;

    let mut y = vec![0.0; ns];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < ns {
            y[b] = tab.rhs(i);
        }
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, lo } => lo + y[col],
            VarMap::Reflect { col, hi } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let reduced: f64 = obj_row.iter().zip(&y).map(|(c, v)| c * v).sum::<f64>() + obj_offset;
    let violation = lp.max_violation(&x);
    if violation > CERTIFICATE_TOL {
        return Err(LpError::Certificate(format!("constraint violation {violation:e}")));
    }
    if (objective - reduced).abs() > CERTIFICATE_TOL * (1.0 + objective.abs()) {
        return Err(LpError::Certificate(format!("objective {objective} vs tableau {reduced}")));
    }
    Ok(LpSolution { x, objective, pivots: tab.pivots })
}
