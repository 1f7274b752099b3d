//! Co-evolution of row and column populations of neural agents.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::neuro::NeuroSpec;
use super::BehaviorSpec;
use crate::rng::{derive_seed, stream, Rng};
use crate::sbg::{simulate_episode, StochasticGame};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoevolveConfig {
    pub mutation_sd: f64,
    /// Fitness bonus per unit of mean weight distance to the rest of the
    /// population; keeps members from collapsing onto one network.
    pub similarity_weight: f64,
    /// Share of offspring produced by mutation rather than crossover.
    pub mutate_fraction: f64,
    /// Episodes per member per fitness evaluation.
    pub matches: usize,
    pub horizon: usize,
}

impl Default for CoevolveConfig {
    fn default() -> Self {
        Self { mutation_sd: 0.1, similarity_weight: 0.01, mutate_fraction: 0.5, matches: 4, horizon: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub previous_mean: f64,
    pub candidate_mean: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<NeuroSpec>,
    pub fitness: Vec<f64>,
    pub generation: usize,
    pub log: Vec<GenerationRecord>,
}

impl Population {
    pub fn new(members: Vec<NeuroSpec>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Invalid("a population needs at least two members".into()));
        }
        for m in &members {
            m.validate()?;
            if m.w1.len() != members[0].w1.len() || m.n_own != members[0].n_own {
                return Err(Error::Dimension("population members differ in shape".into()));
            }
        }
        let fitness = vec![0.0; members.len()];
        Ok(Self { members, fitness, generation: 0, log: Vec::new() })
    }

    /// `size` random networks with window 4 and 16 hidden units.
    pub fn random(size: usize, n_states: usize, n_own: usize, n_other: usize, rng: &mut Rng) -> Result<Self> {
        Self::new((0..size).map(|_| NeuroSpec::random(4, n_states, n_own, n_other, 16, rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn mean_fitness(&self) -> f64 {
        self.fitness.iter().sum::<f64>() / self.fitness.len() as f64
    }

    /// Member with the highest fitness, first on ties.
    pub fn best(&self) -> &NeuroSpec {
        &self.members[ranking(&self.fitness)[0]]
    }
}

fn ranking(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&i, &j| fitness[j].total_cmp(&fitness[i]).then(i.cmp(&j)));
    order
}

fn diversity(members: &[NeuroSpec], i: usize) -> f64 {
    let total: f64 = members.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, m)| m.weight_distance(&members[i])).sum();
    total / (members.len() - 1) as f64
}

/// Fitness of both populations from `cfg.matches` rounds of random
/// one-to-one pairings: mean per-step reward plus the diversity bonus.
fn evaluate(
    rows: &[NeuroSpec],
    cols: &[NeuroSpec],
    game: &StochasticGame,
    col_game: &StochasticGame,
    cfg: &CoevolveConfig,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = rows.len();
    let mut rng = stream(seed, &[0]);
    let (mut fr, mut fc) = (vec![0.0; n], vec![0.0; n]);
    let initial = vec![1.0 / game.n_states() as f64; game.n_states()];
    let row_specs: Vec<BehaviorSpec> = rows.iter().cloned().map(BehaviorSpec::Neuro).collect();
    let col_specs: Vec<BehaviorSpec> = cols.iter().cloned().map(BehaviorSpec::Neuro).collect();
    for m in 0..cfg.matches {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        for (i, &j) in perm.iter().enumerate() {
            let episode_seed = derive_seed(seed, &[1, m as u64, i as u64]);
            let t = simulate_episode(game, &row_specs[i], &col_specs[j], &initial, cfg.horizon, episode_seed)?;
            let steps = t.rewards.len().max(1) as f64;
            fr[i] += t.rewards.iter().sum::<f64>() / steps;
            let col_total: f64 =
                (0..t.states.len()).map(|k| col_game.reward(t.states[k], t.agent_actions[k], t.opponent_actions[k])).sum();
            fc[j] += col_total / steps;
        }
    }
    let finish = |f: &mut Vec<f64>, members: &[NeuroSpec]| {
        for (i, v) in f.iter_mut().enumerate() {
            *v = *v / cfg.matches.max(1) as f64 + cfg.similarity_weight * diversity(members, i);
        }
    };
    finish(&mut fr, rows);
    finish(&mut fc, cols);
    Ok((fr, fc))
}

/// Binary tournament on fitness.
fn select(fitness: &[f64], rng: &mut Rng) -> usize {
    let a = rng.random_range(0..fitness.len());
    let b = rng.random_range(0..fitness.len());
    if fitness[b] > fitness[a] { b } else { a }
}

fn offspring(pop: &[NeuroSpec], fitness: &[f64], cfg: &CoevolveConfig, rng: &mut Rng) -> Vec<NeuroSpec> {
    let noise = Normal::new(0.0, cfg.mutation_sd).expect("nonnegative sd");
    (0..pop.len())
        .map(|i| {
            if rng.random::<f64>() < cfg.mutate_fraction {
                let mut child = pop[i].clone();
                for w in child.weights_mut() {
                    *w += noise.sample(rng);
                }
                child
            } else {
                let (p, q) = (select(fitness, rng), select(fitness, rng));
                let mut child = pop[p].clone();
                for (w, v) in child.weights_mut().zip(pop[q].weights()) {
                    if rng.random::<bool>() {
                        *w = *v;
                    }
                }
                child
            }
        })
        .collect()
}

/// Top half of `pre` plus top half of `post`.
fn candidate(pre: &[NeuroSpec], pre_fit: &[f64], post: &[NeuroSpec], post_fit: &[f64]) -> Vec<NeuroSpec> {
    let keep = pre.len().div_ceil(2);
    let mut out: Vec<NeuroSpec> = ranking(pre_fit)[..keep].iter().map(|&i| pre[i].clone()).collect();
    out.extend(ranking(post_fit)[..pre.len() - keep].iter().map(|&i| post[i].clone()));
    out
}

fn step(
    pop: &mut Population,
    generation: usize,
    pre_fit: Vec<f64>,
    cand: Vec<NeuroSpec>,
    cand_fit: Vec<f64>,
) {
    let previous_mean = pre_fit.iter().sum::<f64>() / pre_fit.len() as f64;
    let candidate_mean = cand_fit.iter().sum::<f64>() / cand_fit.len() as f64;
    let accepted = candidate_mean > previous_mean;
    if accepted {
        pop.members = cand;
        pop.fitness = cand_fit;
    } else {
        pop.fitness = pre_fit;
    }
    pop.generation += 1;
    pop.log.push(GenerationRecord { generation, previous_mean, candidate_mean, accepted });
}

/// Co-evolves a row population (rewards from `game`) against a column
/// population (rewards from `col_game`, same shape, indexed by the row
/// player's action first). Deterministic in `seed`.
pub fn coevolve(
    row_pop: &Population,
    col_pop: &Population,
    game: &StochasticGame,
    col_game: &StochasticGame,
    generations: usize,
    seed: u64,
    cfg: &CoevolveConfig,
) -> Result<(Population, Population)> {
    if row_pop.len() != col_pop.len() {
        return Err(Error::Invalid("populations must have equal size".into()));
    }
    if col_game.n_states() != game.n_states()
        || col_game.n_agent_actions() != game.n_agent_actions()
        || col_game.n_opponent_actions() != game.n_opponent_actions()
    {
        return Err(Error::Dimension("row and column games differ in shape".into()));
    }
    let (r0, c0) = (&row_pop.members[0], &col_pop.members[0]);
    if r0.n_own != game.n_agent_actions() || c0.n_own != game.n_opponent_actions() || r0.n_states != game.n_states() {
        return Err(Error::Dimension("networks do not match the game".into()));
    }
    let (mut rows, mut cols) = (row_pop.clone(), col_pop.clone());
    for g in 0..generations {
        let s = |phase: u64| derive_seed(seed, &[g as u64, phase]);
        let (pre_r, pre_c) = evaluate(&rows.members, &cols.members, game, col_game, cfg, s(0))?;
        let post_r = offspring(&rows.members, &pre_r, cfg, &mut stream(s(1), &[]));
        let post_c = offspring(&cols.members, &pre_c, cfg, &mut stream(s(2), &[]));
        let (fit_r, fit_c) = evaluate(&post_r, &post_c, game, col_game, cfg, s(3))?;
        let cand_r = candidate(&rows.members, &pre_r, &post_r, &fit_r);
        let cand_c = candidate(&cols.members, &pre_c, &post_c, &fit_c);
        let (cf_r, cf_c) = evaluate(&cand_r, &cand_c, game, col_game, cfg, s(4))?;
        step(&mut rows, g, pre_r, cand_r, cf_r);
        step(&mut cols, g, pre_c, cand_c, cf_c);
    }
    Ok((rows, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::PayoffMatrix;

    fn setup() -> (StochasticGame, StochasticGame, Population, Population) {
        let mp = PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let g = StochasticGame::stateless(&mp, 0.9).unwrap();
        let neg = StochasticGame::stateless(&mp.map(|v| -v), 0.9).unwrap();
        let mut rng = stream(5, &[]);
        let r = Population::random(10, 1, 2, 2, &mut rng).unwrap();
        let c = Population::random(10, 1, 2, 2, &mut rng).unwrap();
        (g, neg, r, c)
    }

    #[test]
    fn zero_generations_is_identity() {
        let (g, neg, r, c) = setup();
        let (r2, c2) = coevolve(&r, &c, &g, &neg, 0, 1, &CoevolveConfig::default()).unwrap();
        assert_eq!((r2, c2), (r, c));
    }

    #[test]
    fn reproducible_and_size_preserving() {
        let (g, neg, r, c) = setup();
        let cfg = CoevolveConfig { horizon: 8, matches: 2, ..CoevolveConfig::default() };
        let a = coevolve(&r, &c, &g, &neg, 3, 42, &cfg).unwrap();
        let b = coevolve(&r, &c, &g, &neg, 3, 42, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.0.len(), a.1.len()), (10, 10));
        assert_eq!(a.0.generation, 3);
        for rec in a.0.log.iter().chain(&a.1.log) {
            assert_eq!(rec.accepted, rec.candidate_mean > rec.previous_mean);
        }
        assert!(a.0.fitness.iter().all(|f| f.is_finite()));
    }
}
