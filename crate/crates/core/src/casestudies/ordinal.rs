//! Strictly ordinal 2×2 games up to relabeling.

use serde::{Deserialize, Serialize};

use crate::nfg::PayoffMatrix;

/// Both players' payoff ranks (1 = worst, 4 = best), indexed
/// `[row action][column action]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrdinalGame2x2 {
    pub row: [[u8; 2]; 2],
    pub col: [[u8; 2]; 2],
}

impl OrdinalGame2x2 {
    fn encoding(&self) -> [u8; 8] {
        let (r, c) = (self.row, self.col);
        [r[0][0], r[0][1], r[1][0], r[1][1], c[0][0], c[0][1], c[1][0], c[1][1]]
    }

    /// Each table is a permutation of 1..=4.
    pub fn is_valid(&self) -> bool {
        let ok = |t: [[u8; 2]; 2]| {
            let mut v = [t[0][0], t[0][1], t[1][0], t[1][1]];
            v.sort_unstable();
            v == [1, 2, 3, 4]
        };
        ok(self.row) && ok(self.col)
    }

    pub fn swap_rows(&self) -> Self {
        Self { row: [self.row[1], self.row[0]], col: [self.col[1], self.col[0]] }
    }

    pub fn swap_cols(&self) -> Self {
        let s = |t: [[u8; 2]; 2]| [[t[0][1], t[0][0]], [t[1][1], t[1][0]]];
        Self { row: s(self.row), col: s(self.col) }
    }

    /// Exchanges the players' roles.
    pub fn transpose(&self) -> Self {
        let t = |m: [[u8; 2]; 2]| [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        Self { row: t(self.col), col: t(self.row) }
    }

    /// All eight images under row swap, column swap and transpose.
    pub fn orbit(&self) -> Vec<Self> {
        let mut out = Vec::with_capacity(8);
        for base in [*self, self.transpose()] {
            for g in [base, base.swap_rows()] {
                out.push(g);
                out.push(g.swap_cols());
            }
        }
        out
    }

    /// Orbit member with the smallest encoding.
    pub fn canonical(&self) -> Self {
        self.orbit().into_iter().min_by_key(Self::encoding).expect("orbit is nonempty")
    }

    /// Compact class id: the canonical encoding read as decimal digits.
    pub fn canonical_id(&self) -> u32 {
        self.canonical().encoding().iter().fold(0, |acc, &d| acc * 10 + u32::from(d))
    }

    pub fn row_matrix(&self) -> PayoffMatrix {
        PayoffMatrix::new(self.row.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect())
            .expect("2×2")
    }

    pub fn col_matrix(&self) -> PayoffMatrix {
        PayoffMatrix::new(self.col.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect())
            .expect("2×2")
    }
}

fn permutations() -> Vec<[[u8; 2]; 2]> {
    let mut out = Vec::with_capacity(24);
    for a in 1..=4u8 {
        for b in (1..=4).filter(|&b| b != a) {
            for c in (1..=4).filter(|&c| c != a && c != b) {
                let d = 10 - a - b - c;
                out.push([[a, b], [c, d]]);
            }
        }
    }
    out
}

/// All 24 × 24 ordered pairs of rank tables.
pub fn all_ordinal_2x2() -> Vec<OrdinalGame2x2> {
    let perms = permutations();
    perms.iter().flat_map(|&row| perms.iter().map(move |&col| OrdinalGame2x2 { row, col })).collect()
}

/// One canonical representative per symmetry class, sorted.
pub fn enumerate_ordinal_2x2() -> Vec<OrdinalGame2x2> {
    let mut classes: Vec<OrdinalGame2x2> = all_ordinal_2x2().iter().map(OrdinalGame2x2::canonical).collect();
    classes.sort_by_key(OrdinalGame2x2::encoding);
    classes.dedup();
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_ordinal_2x2().len(), 576);
        assert_eq!(enumerate_ordinal_2x2().len(), 78);
    }

    #[test]
    fn prisoners_dilemma_is_a_class() {
        let pd = OrdinalGame2x2 { row: [[3, 1], [4, 2]], col: [[3, 4], [1, 2]] };
        assert!(pd.is_valid());
        assert!(enumerate_ordinal_2x2().contains(&pd.canonical()));
        assert_eq!(pd.transpose(), pd);
    }

    #[test]
    fn canonical_is_invariant() {
        for g in all_ordinal_2x2().iter().step_by(7) {
            let c = g.canonical();
            assert_eq!(c.canonical(), c);
            for h in g.orbit() {
                assert_eq!(h.canonical_id(), g.canonical_id());
            }
        }
    }
}
