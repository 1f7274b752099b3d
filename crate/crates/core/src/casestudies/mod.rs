//! The experimental games: ordinal 2×2 topology, matching pennies and its
//! shifted variant, and the green security game.

mod ordinal;
mod security;

pub use ordinal::{all_ordinal_2x2, enumerate_ordinal_2x2, OrdinalGame2x2};
pub use security::{
    build_green_security_game, ingest_movement, ingest_movement_csv, season_transitions, synth_movement_data, GridBounds, GridWorld,
    IngestWarning, MovementRecord, Season, SecurityGame, ATTACKER_CAUGHT, CELLS, DEFAULT_ADJACENCY_BOOST,
    GRID_COLS, GRID_ROWS, SEASON_STATES,
};

use crate::behavior::{
    coevolve, markovian_type, BehaviorSpec, CoevolveConfig, LftSpec, NamedBehavior, Population, Trigger,
    TypeContext, TypeSetFile,
};
use crate::nfg::{HypothesisSet, PayoffMatrix};
use crate::rng::stream;
use crate::sbg::StochasticGame;
use crate::Result;

/// Seed freezing the random Markovian type of the built-in type sets.
pub const TYPE_SET_SEED: u64 = 2024;
/// Generations used to evolve the neural member of the built-in type sets.
pub const NEURO_GENERATIONS: usize = 5;

pub fn matching_pennies() -> PayoffMatrix {
    PayoffMatrix::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).expect("2×2")
}

/// Matching pennies shifted up by 0.2.
pub fn adjusted_matching_pennies() -> PayoffMatrix {
    matching_pennies().map(|v| v + 0.2)
}

/// Opponent context for the column player of a 2×2 pennies game.
fn pennies_context() -> TypeContext {
    TypeContext { seed: Some(TYPE_SET_SEED), ..TypeContext::zero_sum_column(&matching_pennies()) }
}

/// MP, AMP and the stationary part of the six-type set (Types 1–4).
pub fn mp_amp_instances() -> Result<(PayoffMatrix, PayoffMatrix, HypothesisSet)> {
    let ctx = pennies_context();
    let members = (1..=4)
        .map(|k| Ok(markovian_type(k, &ctx)?.stationary().expect("Markovian")[0].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok((matching_pennies(), adjusted_matching_pennies(), HypothesisSet::from_vectors(members)?))
}

fn best_neuro(
    game: &StochasticGame,
    col_game: &StochasticGame,
    seed: u64,
    cfg: &CoevolveConfig,
) -> Result<BehaviorSpec> {
    let mut rng = stream(seed, &[6]);
    let (ns, na, nb) = (game.n_states(), game.n_agent_actions(), game.n_opponent_actions());
    let rows = Population::random(10, ns, na, nb, &mut rng)?;
    let cols = Population::random(10, ns, nb, na, &mut rng)?;
    let (_, cols) = coevolve(&rows, &cols, game, col_game, NEURO_GENERATIONS, seed, cfg)?;
    Ok(BehaviorSpec::Neuro(cols.best().clone()))
}

fn named(name: &str, spec: BehaviorSpec) -> NamedBehavior {
    NamedBehavior { name: name.to_string(), spec }
}

/// The six column-player types for a pennies game: four Markovian types,
/// a trigger agent (prefers action 0, punishes with its maximin strategy
/// once the row player chose action 1 more than twice in the last four
/// rounds) and a co-evolved network.
pub fn pennies_type_set(matrix: &PayoffMatrix, seed: u64) -> Result<TypeSetFile> {
    let ctx = TypeContext { seed: Some(seed), ..TypeContext::zero_sum_column(matrix) };
    let t: Vec<BehaviorSpec> = (1..=4).map(|k| markovian_type(k, &ctx)).collect::<Result<_>>()?;
    let lft = LftSpec {
        trigger: Trigger::Window { window: 4, more_than: 2 },
        watched: vec![1],
        preferred: t[0].stationary().expect("Markovian").to_vec(),
        punishment: t[2].stationary().expect("Markovian").to_vec(),
    };
    let game = StochasticGame::stateless(matrix, 0.9)?;
    let col_game = StochasticGame::stateless(&matrix.map(|v| -v), 0.9)?;
    let neuro = best_neuro(&game, &col_game, seed, &CoevolveConfig::default())?;
    let mut types: Vec<NamedBehavior> =
        t.into_iter().enumerate().map(|(i, s)| named(&format!("type{}", i + 1), s)).collect();
    types.push(named("type5-lft", BehaviorSpec::Lft(lft)));
    types.push(named("type6-neuro", neuro));
    Ok(TypeSetFile { types })
}

/// The six attacker types for a security game: highest- and
/// second-highest-count cell, the attacker's per-state maximin strategy, a
/// frozen random table, a trigger agent that goes for the richest cell
/// until the defender has guarded it in more than half of the recorded
/// rounds, and a co-evolved network.
pub fn security_type_set(sg: &SecurityGame, seed: u64) -> Result<TypeSetFile> {
    let n = sg.defender.n_states();
    let counts = sg.world.counts_f64();
    let ctx = TypeContext {
        n_states: n,
        n_actions: CELLS,
        opponent_payoffs: Some((0..n).map(|s| sg.attacker.stage_matrix(s).transpose()).collect()),
        counts: Some(counts.clone()),
        seed: Some(seed),
    };
    let t: Vec<BehaviorSpec> = (1..=4).map(|k| markovian_type(k, &ctx)).collect::<Result<_>>()?;
    let richest: Vec<usize> = t[0]
        .stationary()
        .expect("Markovian")
        .iter()
        .map(|d| d.iter().position(|&p| p == 1.0).expect("point mass"))
        .collect();
    let lft = LftSpec {
        trigger: Trigger::Fraction { more_than: 0.5 },
        watched: richest,
        preferred: t[0].stationary().expect("Markovian").to_vec(),
        punishment: t[2].stationary().expect("Markovian").to_vec(),
    };
    let cfg = CoevolveConfig { horizon: 16, matches: 2, ..CoevolveConfig::default() };
    let neuro = best_neuro(&sg.defender, &sg.attacker, seed, &cfg)?;
    let mut types: Vec<NamedBehavior> =
        t.into_iter().enumerate().map(|(i, s)| named(&format!("type{}", i + 1), s)).collect();
    types.push(named("type5-lft", BehaviorSpec::Lft(lft)));
    types.push(named("type6-neuro", neuro));
    Ok(TypeSetFile { types })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfg::theta_stats;

    #[test]
    fn pennies_statistics() {
        let (mp, amp, theta) = mp_amp_instances().unwrap();
        assert_eq!(amp, mp.map(|v| v + 0.2));
        let s = theta_stats(&theta, &mp).unwrap();
        assert_eq!((s.eta, s.kappa, s.mu), (2.0, Some(1.0), 1.0));
        assert!(s.nu.abs() < 1e-12);
        let s = theta_stats(&theta, &amp).unwrap();
        assert!((s.mu - 1.2).abs() < 1e-12 && (s.nu - 0.2).abs() < 1e-9);
    }

    #[test]
    fn six_types() {
        let set = pennies_type_set(&matching_pennies(), 1).unwrap();
        assert_eq!(set.types.len(), 6);
        set.validate().unwrap();
        let g = StochasticGame::stateless(&matching_pennies(), 0.9).unwrap();
        assert_eq!(set.kernel(&g).unwrap().1, vec![0, 1, 2, 3]);
    }
}
