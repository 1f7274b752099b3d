//! Single-hidden-layer policy network over recent joint actions.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::Rng;
use crate::sbg::Observation;
use crate::{Error, Result};

/// Weights are stored row-major: `w1` is `hidden × input_len`, `w2` is
/// `n_own × hidden`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuroSpec {
    /// Number of past joint actions fed to the network.
    pub window: usize,
    pub n_states: usize,
    /// Actions of the network's own player (the output size).
    pub n_own: usize,
    pub n_other: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl NeuroSpec {
    /// Each past step contributes a one-hot block per player with an extra
    /// "no action yet" slot; the current state is one-hot at the end.
    pub fn input_len(&self) -> usize {
        self.window * (self.n_own + 1 + self.n_other + 1) + self.n_states
    }

    pub fn zeros(window: usize, n_states: usize, n_own: usize, n_other: usize, hidden: usize) -> Self {
        let mut s = Self { window, n_states, n_own, n_other, hidden, w1: vec![], b1: vec![], w2: vec![], b2: vec![] };
        s.w1 = vec![0.0; hidden * s.input_len()];
        s.b1 = vec![0.0; hidden];
        s.w2 = vec![0.0; n_own * hidden];
        s.b2 = vec![0.0; n_own];
        s
    }

    /// Gaussian weights scaled by 1/√fan-in.
    pub fn random(window: usize, n_states: usize, n_own: usize, n_other: usize, hidden: usize, rng: &mut Rng) -> Self {
        let mut s = Self::zeros(window, n_states, n_own, n_other, hidden);
        let n1 = Normal::new(0.0, 1.0 / (s.input_len() as f64).sqrt()).expect("positive scale");
        let n2 = Normal::new(0.0, 1.0 / (hidden.max(1) as f64).sqrt()).expect("positive scale");
        s.w1.iter_mut().for_each(|w| *w = n1.sample(rng));
        s.w2.iter_mut().for_each(|w| *w = n2.sample(rng));
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.n_states == 0 || self.n_own == 0 || self.n_other == 0 || self.hidden == 0 {
            return Err(Error::Invalid("network dimensions must be positive".into()));
        }
        let shapes = [
            (self.w1.len(), self.hidden * self.input_len(), "w1"),
            (self.b1.len(), self.hidden, "b1"),
            (self.w2.len(), self.n_own * self.hidden, "w2"),
            (self.b2.len(), self.n_own, "b2"),
        ];
        for (got, want, name) in shapes {
            if got != want {
                return Err(Error::Dimension(format!("{name} has {got} weights, expected {want}")));
            }
        }
        if self.weights().any(|w| !w.is_finite()) {
            return Err(Error::Invalid("non-finite network weight".into()));
        }
        Ok(())
    }

    pub fn weights(&self) -> impl Iterator<Item = &f64> {
        self.w1.iter().chain(&self.b1).chain(&self.w2).chain(&self.b2)
    }

    pub(crate) fn weights_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w1.iter_mut().chain(self.b1.iter_mut()).chain(self.w2.iter_mut()).chain(self.b2.iter_mut())
    }

    /// Euclidean distance between weight vectors of equally shaped nets.
    pub fn weight_distance(&self, other: &Self) -> f64 {
        self.weights().zip(other.weights()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    fn encode(&self, obs: &Observation<'_>) -> Result<Vec<f64>> {
        if obs.state >= self.n_states {
            return Err(Error::Dimension(format!("state {} outside the network's {}", obs.state, self.n_states)));
        }
        let block = self.n_own + 1 + self.n_other + 1;
        let mut x = vec![0.0; self.input_len()];
        for k in 0..self.window {
            let base = k * block;
            // k = 0 is the most recent step.
            let own = obs.own.len().checked_sub(k + 1).map(|t| obs.own[t]);
            let other = obs.other.len().checked_sub(k + 1).map(|t| obs.other[t]);
            match own {
                Some(a) if a < self.n_own => x[base + a] = 1.0,
                Some(a) => return Err(Error::Dimension(format!("own action {a} out of range"))),
                None => x[base + self.n_own] = 1.0,
            }
            let base = base + self.n_own + 1;
            match other {
                Some(b) if b < self.n_other => x[base + b] = 1.0,
                Some(b) => return Err(Error::Dimension(format!("other action {b} out of range"))),
                None => x[base + self.n_other] = 1.0,
            }
        }
        x[self.window * block + obs.state] = 1.0;
        Ok(x)
    }
}

/// affine → tanh → affine → softmax.
pub fn neuro_forward(spec: &NeuroSpec, obs: &Observation<'_>) -> Result<Vec<f64>> {
    spec.validate()?;
    let x = spec.encode(obs)?;
    let n_in = x.len();
    let h: Vec<f64> = (0..spec.hidden)
        .map(|j| {
            let row = &spec.w1[j * n_in..(j + 1) * n_in];
            (row.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + spec.b1[j]).tanh()
        })
        .collect();
    let logits: Vec<f64> = (0..spec.n_own)
        .map(|i| {
            let row = &spec.w2[i * spec.hidden..(i + 1) * spec.hidden];
            row.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + spec.b2[i]
        })
        .collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = exp.iter().sum();
    Ok(exp.iter().map(|e| e / total).collect())
}
