//! Opponent types: stationary (Markovian) tables, leader-follower-trigger
//! agents and small neural agents evolved against each other.
//!
//! Every spec implements [`Behavior`], so it can be played in
//! [`simulate_episode`](crate::sbg::simulate_episode). Only Markovian specs
//! have a stationary kernel and take part in exact gap computations.

mod coevolve;
mod neuro;

pub use coevolve::{coevolve, CoevolveConfig, Population};
pub use neuro::{neuro_forward, NeuroSpec};

use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::nfg::{check_distribution, PayoffMatrix, SIMPLEX_TOL};
use crate::optimizer::maximin_strategy;
use crate::nfg::HypothesisSet;
use crate::rng::stream;
use crate::sbg::{Behavior, Observation, StochasticGame, StrategyKernel};
use crate::{Error, Result};

/// When a leader-follower-trigger agent switches to punishment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Trigger {
    /// The watched action appears more than `more_than` times among the
    /// last `window` opponent actions. Short histories never trigger.
    Window { window: usize, more_than: usize },
    /// The watched action makes up strictly more than `more_than` of the
    /// whole recorded history.
    Fraction { more_than: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LftSpec {
    pub trigger: Trigger,
    /// Action of the other player being watched, per state.
    pub watched: Vec<usize>,
    /// Per-state distributions.
    pub preferred: Vec<Vec<f64>>,
    pub punishment: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum BehaviorSpec {
    Markovian { table: Vec<Vec<f64>> },
    Lft(LftSpec),
    Neuro(NeuroSpec),
}

fn check_table(table: &[Vec<f64>]) -> Result<()> {
    if table.is_empty() {
        return Err(Error::Invalid("behavior table covers no states".into()));
    }
    let n = table[0].len();
    for d in table {
        if d.len() != n {
            return Err(Error::Dimension("behavior table rows differ in length".into()));
        }
        check_distribution(d, SIMPLEX_TOL)?;
    }
    Ok(())
}

impl BehaviorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Markovian { table } => check_table(table),
            Self::Lft(lft) => {
                check_table(&lft.preferred)?;
                check_table(&lft.punishment)?;
                let n = lft.preferred.len();
                if lft.punishment.len() != n || lft.watched.len() != n {
                    return Err(Error::Dimension("trigger agent tables cover different states".into()));
                }
                if lft.preferred[0].len() != lft.punishment[0].len() {
                    return Err(Error::Dimension("preferred and punishment action counts differ".into()));
                }
                match lft.trigger {
                    Trigger::Window { window: 0, .. } => Err(Error::Invalid("trigger window must be ≥ 1".into())),
                    Trigger::Fraction { more_than } if !(0.0..1.0).contains(&more_than) => {
                        Err(Error::Invalid(format!("trigger fraction {more_than} outside [0, 1)")))
                    }
                    _ => Ok(()),
                }
            }
            Self::Neuro(n) => n.validate(),
        }
    }

    /// σ(·) when the spec is stationary.
    pub fn stationary(&self) -> Option<&[Vec<f64>]> {
        match self {
            Self::Markovian { table } => Some(table),
            _ => None,
        }
    }
}

impl Behavior for BehaviorSpec {
    fn distribution(&self, obs: &Observation<'_>) -> Vec<f64> {
        match self {
            Self::Markovian { table } => table[obs.state].clone(),
            Self::Lft(lft) => lft_step(lft, obs.states, obs.other, obs.state),
            Self::Neuro(n) => neuro_forward(n, obs).expect("validated on construction"),
        }
    }
}

/// Next-round distribution of a trigger agent given the states visited and
/// the other player's actions so far (aligned, oldest first).
pub fn lft_step(spec: &LftSpec, states: &[usize], other: &[usize], state: usize) -> Vec<f64> {
    let watched = |t: usize| other[t] == spec.watched[states.get(t).copied().unwrap_or(0)];
    let fired = match spec.trigger {
        Trigger::Window { window, more_than } => {
            other.len() >= window && (other.len() - window..other.len()).filter(|&t| watched(t)).count() > more_than
        }
        Trigger::Fraction { more_than } => {
            !other.is_empty() && (0..other.len()).filter(|&t| watched(t)).count() as f64 > more_than * other.len() as f64
        }
    };
    if fired {
        spec.punishment[state].clone()
    } else {
        spec.preferred[state].clone()
    }
}

/// What [`markovian_type`] needs to know about the game, from the
/// opponent's side.
#[derive(Debug, Clone, Default)]
pub struct TypeContext {
    pub n_states: usize,
    pub n_actions: usize,
    /// Per-state stage payoffs with the opponent as the row player (Type 3).
    pub opponent_payoffs: Option<Vec<PayoffMatrix>>,
    /// Per-state value of each opponent action, e.g. animals per cell
    /// (switches Types 1 and 2 to "highest"/"second highest").
    pub counts: Option<Vec<Vec<f64>>>,
    /// Seed for Type 4.
    pub seed: Option<u64>,
}

impl TypeContext {
    pub fn single_state(n_actions: usize) -> Self {
        Self { n_states: 1, n_actions, ..Self::default() }
    }

    /// Context for the column player of a zero-sum matrix game.
    pub fn zero_sum_column(a: &PayoffMatrix) -> Self {
        Self {
            n_states: 1,
            n_actions: a.cols(),
            opponent_payoffs: Some(vec![a.transpose().map(|v| -v)]),
            ..Self::default()
        }
    }
}

/// Actions sorted by decreasing count, ties by index.
fn ranked(counts: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&i, &j| counts[j].total_cmp(&counts[i]).then(i.cmp(&j)));
    order
}

fn point(n: usize, i: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    p[i] = 1.0;
    p
}

/// Markovian Types 1–4: action 0 (or the highest-count action), action 1
/// (or the second highest), the opponent's maximin strategy, and a random
/// distribution frozen at construction.
pub fn markovian_type(kind: u8, ctx: &TypeContext) -> Result<BehaviorSpec> {
    let (n, k) = (ctx.n_states, ctx.n_actions);
    if n == 0 || k == 0 {
        return Err(Error::Invalid("type context has no states or actions".into()));
    }
    let table = match kind {
        1 | 2 => {
            let rank = usize::from(kind - 1);
            if k <= rank {
                return Err(Error::Invalid(format!("type {kind} needs at least {} actions", rank + 1)));
            }
            match &ctx.counts {
                Some(counts) => {
                    if counts.len() != n || counts.iter().any(|c| c.len() != k) {
                        return Err(Error::Dimension("counts do not match the context".into()));
                    }
                    counts.iter().map(|c| point(k, ranked(c)[rank])).collect()
                }
                None => vec![point(k, rank); n],
            }
        }
        3 => {
            let payoffs = ctx
                .opponent_payoffs
                .as_ref()
                .ok_or_else(|| Error::Invalid("type 3 needs the opponent's payoffs".into()))?;
            if payoffs.len() != n {
                return Err(Error::Dimension("one payoff matrix per state expected".into()));
            }
            payoffs
                .iter()
                .map(|m| {
                    if m.rows() != k {
                        return Err(Error::Dimension("opponent payoff rows must match its actions".into()));
                    }
                    Ok(maximin_strategy(m, &HypothesisSet::full_simplex(m.cols()))?.strategy.probs().to_vec())
                })
                .collect::<Result<_>>()?
        }
        4 => {
            let seed = ctx.seed.ok_or_else(|| Error::Invalid("type 4 needs a seed".into()))?;
            let mut rng = stream(seed, &[4]);
            (0..n)
                .map(|_| {
                    // Uniform on the simplex: normalized exponentials.
                    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                    let total: f64 = w.iter().sum();
                    w.iter().map(|x| x / total).collect()
                })
                .collect()
        }
        other => return Err(Error::Invalid(format!("no Markovian type {other}"))),
    };
    Ok(BehaviorSpec::Markovian { table })
}

/// A named behavior, as stored in type-set files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBehavior {
    pub name: String,
    #[serde(flatten)]
    pub spec: BehaviorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeSetFile {
    pub types: Vec<NamedBehavior>,
}

impl TypeSetFile {
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.types.iter().enumerate() {
            if self.types[..i].iter().any(|o| o.name == t.name) {
                return Err(Error::Invalid(format!("duplicate type name `{}`", t.name)));
            }
            t.spec.validate()?;
        }
        Ok(())
    }

    /// The stationary members as a kernel over `game`, plus their positions
    /// in this file.
    pub fn kernel(&self, game: &StochasticGame) -> Result<(StrategyKernel, Vec<usize>)> {
        let mut names = Vec::new();
        let mut dists = Vec::new();
        let mut positions = Vec::new();
        for (i, t) in self.types.iter().enumerate() {
            if let Some(table) = t.spec.stationary() {
                names.push(t.name.clone());
                dists.push(table.to_vec());
                positions.push(i);
            }
        }
        if names.is_empty() {
            return Err(Error::Invalid("type set has no stationary member".into()));
        }
        Ok((StrategyKernel::new(names, dists, game)?, positions))
    }
}

pub fn read_type_set(path: &Path) -> Result<TypeSetFile> {
    let file: TypeSetFile = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
    file.validate()?;
    Ok(file)
}

pub fn write_type_set(path: &Path, file: &TypeSetFile) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp() -> PayoffMatrix {
        PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap()
    }

    #[test]
    fn markovian_kinds() {
        let ctx = TypeContext { seed: Some(3), ..TypeContext::zero_sum_column(&mp()) };
        assert_eq!(markovian_type(1, &ctx).unwrap().stationary().unwrap(), &[vec![1.0, 0.0]]);
        assert_eq!(markovian_type(2, &ctx).unwrap().stationary().unwrap(), &[vec![0.0, 1.0]]);
        let t3 = markovian_type(3, &ctx).unwrap();
        assert!((t3.stationary().unwrap()[0][0] - 0.5).abs() < 1e-9);
        let t4 = markovian_type(4, &ctx).unwrap();
        assert_eq!(t4, markovian_type(4, &ctx).unwrap());
        t4.validate().unwrap();
        assert!(markovian_type(3, &TypeContext::single_state(2)).is_err());
        assert!(markovian_type(4, &TypeContext::single_state(2)).is_err());
        assert!(markovian_type(5, &ctx).is_err());
    }

    #[test]
    fn security_counts() {
        let ctx = TypeContext {
            n_states: 1,
            n_actions: 4,
            counts: Some(vec![vec![0.0, 5.0, 0.0, 2.0]]),
            ..TypeContext::default()
        };
        assert_eq!(markovian_type(1, &ctx).unwrap().stationary().unwrap()[0], vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(markovian_type(2, &ctx).unwrap().stationary().unwrap()[0], vec![0.0, 0.0, 0.0, 1.0]);
    }

    fn window_lft() -> LftSpec {
        LftSpec {
            trigger: Trigger::Window { window: 4, more_than: 2 },
            watched: vec![1],
            preferred: vec![vec![1.0, 0.0]],
            punishment: vec![vec![0.5, 0.5]],
        }
    }

    #[test]
    fn window_trigger() {
        let s = window_lft();
        let states = [0; 8];
        assert_eq!(lft_step(&s, &states, &[1, 1, 1, 0], 0), vec![0.5, 0.5]);
        assert_eq!(lft_step(&s, &states, &[1, 1, 0, 0], 0), vec![1.0, 0.0]);
        assert_eq!(lft_step(&s, &states, &[1, 1, 1], 0), vec![1.0, 0.0]);
        assert_eq!(lft_step(&s, &states, &[0, 0, 0, 1, 1, 1, 0], 0), vec![0.5, 0.5]);
    }

    #[test]
    fn fraction_trigger() {
        let s = LftSpec { trigger: Trigger::Fraction { more_than: 0.5 }, ..window_lft() };
        let states = [0; 4];
        assert_eq!(lft_step(&s, &states, &[1, 0], 0), vec![1.0, 0.0]);
        assert_eq!(lft_step(&s, &states, &[1, 1, 0], 0), vec![0.5, 0.5]);
        assert_eq!(lft_step(&s, &states, &[], 0), vec![1.0, 0.0]);
    }

    #[test]
    fn type_set_round_trip() {
        let ctx = TypeContext { seed: Some(9), ..TypeContext::zero_sum_column(&mp()) };
        let file = TypeSetFile {
            types: vec![
                NamedBehavior { name: "t1".into(), spec: markovian_type(1, &ctx).unwrap() },
                NamedBehavior { name: "t4".into(), spec: markovian_type(4, &ctx).unwrap() },
                NamedBehavior { name: "lft".into(), spec: BehaviorSpec::Lft(window_lft()) },
            ],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("types.json");
        write_type_set(&path, &file).unwrap();
        let back = read_type_set(&path).unwrap();
        assert_eq!(back, file);
        let g = StochasticGame::stateless(&mp(), 0.9).unwrap();
        let (k, pos) = back.kernel(&g).unwrap();
        assert_eq!(pos, vec![0, 1]);
        assert_eq!(k.sigma(1), file.types[1].spec.stationary().unwrap());
    }
}
