//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the crate's LP solver or statistics code; the
//! oracles re-derive each quantity from its definition by enumeration.
#![allow(dead_code)]

use beliefsafe::nfg::{HypothesisSet, PayoffMatrix};
use beliefsafe::rng::{stream, Rng};
use rand::Rng as _;

pub fn rng(seed: u64) -> Rng {
    stream(seed, &[0xACCE])
}

/// A distribution on `n` points whose entries are multiples of 1/16, so
/// every sum the statistics take is exact in binary floating point.
pub fn dyadic_distribution(rng: &mut Rng, n: usize) -> Vec<f64> {
    let mut units = vec![0u32; n];
    for _ in 0..16 {
        units[rng.random_range(0..n)] += 1;
    }
    units.iter().map(|&u| f64::from(u) / 16.0).collect()
}

/// Distinct dyadic members; may return fewer than `k` when the draws collide.
pub fn dyadic_theta(rng: &mut Rng, b: usize, k: usize) -> HypothesisSet {
    let mut members: Vec<Vec<f64>> = Vec::new();
    for _ in 0..k * 4 {
        if members.len() == k {
            break;
        }
        let d = dyadic_distribution(rng, b);
        if !members.contains(&d) {
            members.push(d);
        }
    }
    HypothesisSet::from_vectors(members).expect("distinct distributions")
}

/// Integer payoffs in [-4, 4] over eight.
pub fn dyadic_matrix(rng: &mut Rng, a: usize, b: usize) -> PayoffMatrix {
    let data = (0..a * b).map(|_| f64::from(rng.random_range(-32i32..=32)) / 8.0).collect();
    PayoffMatrix::from_flat(a, b, data).unwrap()
}

pub fn uniform_matrix(rng: &mut Rng, a: usize, b: usize, scale: f64) -> PayoffMatrix {
    let data = (0..a * b).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect();
    PayoffMatrix::from_flat(a, b, data).unwrap()
}

pub fn random_distribution(rng: &mut Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let t: f64 = w.iter().sum();
    w.iter().map(|x| x / t).collect()
}

/// Brute-force η, κ, μ, ν straight from their definitions.
pub struct BruteStats {
    pub eta: f64,
    pub kappa: Option<f64>,
    pub mu: f64,
    pub nu: f64,
}

pub fn brute_stats(theta: &[Vec<f64>], a: &PayoffMatrix) -> BruteStats {
    let mut eta: f64 = 0.0;
    let mut kappa: Option<f64> = None;
    for y in theta {
        for z in theta {
            let l1: f64 = y.iter().zip(z).map(|(p, q)| (p - q).abs()).sum();
            eta = eta.max(l1);
            let minus: Vec<usize> = (0..y.len()).filter(|&i| y[i] <= z[i]).collect();
            let plus: Vec<usize> = (0..y.len()).filter(|&i| y[i] > z[i]).collect();
            let y_minus: f64 = minus.iter().map(|&i| y[i]).sum();
            let y_plus: f64 = plus.iter().map(|&i| y[i]).sum();
            if y_minus < y_plus {
                let score = minus.iter().map(|&i| z[i]).sum::<f64>() - plus.iter().map(|&i| z[i]).sum::<f64>();
                kappa = Some(kappa.map_or(score, |k: f64| k.max(score)));
            }
        }
    }
    let mut mu: f64 = 0.0;
    let mut nu = f64::INFINITY;
    for y in theta {
        let mut best = f64::NEG_INFINITY;
        for i in 0..a.rows() {
            let v: f64 = (0..a.cols()).map(|j| a.get(i, j) * y[j]).sum();
            mu = mu.max(v.abs());
            best = best.max(v);
        }
        nu = nu.min(best);
    }
    BruteStats { eta, kappa, mu, nu }
}

/// Solves the square system `m x = rhs` by Gaussian elimination with
/// partial pivoting; `None` when (numerically) singular.
pub fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-12 {
            return None;
        }
        m.swap(c, p);
        rhs.swap(c, p);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n)).map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect()).collect()
}

/// max_x min_j (x⊤A)_j by enumerating every vertex of the LP polytope:
/// a support S of x and |S| columns made tight.
pub fn vertex_maximin(a: &PayoffMatrix) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for rows in subsets(a.rows()) {
        for cols in subsets(a.cols()).into_iter().filter(|c| c.len() == rows.len()) {
            let k = rows.len();
            // Unknowns x_S (k) and v; equations: (x_S A_{S,j}) − v = 0 for j ∈ T, Σ x_S = 1.
            let mut m = vec![vec![0.0; k + 1]; k + 1];
            let mut rhs = vec![0.0; k + 1];
            for (e, &j) in cols.iter().enumerate() {
                for (u, &i) in rows.iter().enumerate() {
                    m[e][u] = a.get(i, j);
                }
                m[e][k] = -1.0;
            }
            for u in 0..k {
                m[k][u] = 1.0;
            }
            rhs[k] = 1.0;
            let Some(sol) = solve_square(m, rhs) else { continue };
            if sol[..k].iter().any(|&p| p < -1e-12) {
                continue;
            }
            let mut x = vec![0.0; a.rows()];
            for (u, &i) in rows.iter().enumerate() {
                x[i] = sol[u].max(0.0);
            }
            let guaranteed = (0..a.cols())
                .map(|j| (0..a.rows()).map(|i| x[i] * a.get(i, j)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            best = best.max(guaranteed);
        }
    }
    best
}

/// min_y max_i (Ay)_i, via the row player's problem on −A⊤.
pub fn vertex_minimax(a: &PayoffMatrix) -> f64 {
    -vertex_maximin(&a.transpose().map(|v| -v))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// x⊤Ay.
pub fn payoff(x: &[f64], a: &PayoffMatrix, y: &[f64]) -> f64 {
    (0..a.rows()).map(|i| x[i] * (0..a.cols()).map(|j| a.get(i, j) * y[j]).sum::<f64>()).sum()
}

/// Index of the first maximal entry within 1e-9.
pub fn first_argmax(v: &[f64]) -> usize {
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    v.iter().position(|&x| x >= top - 1e-9).unwrap()
}
