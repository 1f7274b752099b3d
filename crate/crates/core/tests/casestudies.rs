mod common;

use beliefsafe::behavior::{lft_step, read_type_set, write_type_set, LftSpec, Trigger};
use beliefsafe::casestudies::{
    all_ordinal_2x2, build_green_security_game, enumerate_ordinal_2x2, ingest_movement, pennies_type_set,
    season_transitions, security_type_set, synth_movement_data, GridBounds, ATTACKER_CAUGHT, CELLS,
    SEASON_STATES, matching_pennies,
};
use beliefsafe::rng::Rng;
use common::rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use std::collections::HashSet;

#[test]
fn canonical_form_is_constant_on_orbits() {
    let all = all_ordinal_2x2();
    for g in &all {
        let c = g.canonical();
        for h in [g.swap_rows(), g.swap_cols(), g.transpose(), g.swap_rows().transpose()] {
            assert_eq!(h.canonical(), c);
        }
    }
    let ids: HashSet<u32> = all.iter().map(|g| g.canonical_id()).collect();
    assert_eq!(ids.len(), enumerate_ordinal_2x2().len());
}

fn shuffled_rows(text: &str, rng: &mut Rng) -> String {
    let mut lines: Vec<&str> = text.lines().collect();
    let header = lines.remove(0);
    lines.shuffle(rng);
    std::iter::once(header).chain(lines).collect::<Vec<_>>().join("\n") + "\n"
}

#[test]
fn ingest_ignores_row_order() {
    let data = synth_movement_data(4, 12, 8, GridBounds::default()).unwrap();
    let (world, warnings) = ingest_movement(data.as_bytes(), GridBounds::default()).unwrap();
    assert!(warnings.is_empty());
    let mut rng = rng(4);
    for _ in 0..3 {
        let (again, _) = ingest_movement(shuffled_rows(&data, &mut rng).as_bytes(), GridBounds::default()).unwrap();
        assert_eq!(again, world);
    }
    assert_eq!(world.counts.len(), SEASON_STATES);
    assert!(world.counts.iter().all(|c| c.iter().sum::<u32>() <= 12));
}

#[test]
fn security_rewards_follow_the_counts() {
    let data = synth_movement_data(1, 32, 8, GridBounds::default()).unwrap();
    let (world, _) = ingest_movement(data.as_bytes(), GridBounds::default()).unwrap();
    let sg = build_green_security_game(&world, 0.05, 0.9).unwrap();
    for s in 0..SEASON_STATES {
        for d in 0..CELLS {
            for a in 0..CELLS {
                let count = f64::from(world.counts[s][a]);
                if d == a {
                    assert_eq!(sg.defender.reward(s, d, a), count);
                    assert_eq!(sg.attacker.reward(s, d, a), ATTACKER_CAUGHT);
                } else {
                    assert_eq!(sg.defender.reward(s, d, a), -count);
                    assert_eq!(sg.attacker.reward(s, d, a), count);
                }
                assert_eq!(sg.defender.next_states(s, d, a), sg.defender.next_states(s, 0, 0));
            }
        }
    }
    let rows = season_transitions(&world.seasons, 0.05).unwrap();
    for (s, row) in rows.iter().enumerate() {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (t, &p) in row.iter().enumerate() {
            if world.seasons[t].rainy == world.seasons[s].rainy {
                assert_eq!(p, 0.0);
            }
        }
    }
}

#[test]
fn synthetic_data_is_reproducible() {
    let b = GridBounds::default();
    assert_eq!(synth_movement_data(9, 5, 8, b).unwrap(), synth_movement_data(9, 5, 8, b).unwrap());
    assert_ne!(synth_movement_data(9, 5, 8, b).unwrap(), synth_movement_data(10, 5, 8, b).unwrap());
}

fn window_spec(window: usize, more_than: usize) -> LftSpec {
    LftSpec {
        trigger: Trigger::Window { window, more_than },
        watched: vec![1],
        preferred: vec![vec![1.0, 0.0]],
        punishment: vec![vec![0.0, 1.0]],
    }
}

proptest! {
    #[test]
    fn window_trigger_only_sees_the_trailing_window(
        prefix in proptest::collection::vec(0usize..2, 0..12),
        tail in proptest::collection::vec(0usize..2, 4),
        more_than in 0usize..4,
    ) {
        let spec = window_spec(4, more_than);
        let mut history = prefix.clone();
        history.extend(&tail);
        let states = vec![0; history.len()];
        let fired = tail.iter().filter(|&&a| a == 1).count() > more_than;
        let want = if fired { &spec.punishment[0] } else { &spec.preferred[0] };
        prop_assert_eq!(&lft_step(&spec, &states, &history, 0), want);
    }

    #[test]
    fn short_histories_never_trigger(history in proptest::collection::vec(0usize..2, 0..4)) {
        let spec = window_spec(4, 0);
        let states = vec![0; history.len()];
        prop_assert_eq!(lft_step(&spec, &states, &history, 0), vec![1.0, 0.0]);
    }
}

#[test]
fn type_sets_round_trip_and_are_seeded() {
    let a = pennies_type_set(&matching_pennies(), 3).unwrap();
    assert_eq!(a, pennies_type_set(&matching_pennies(), 3).unwrap());
    assert_eq!(a.types.len(), 6);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("types.json");
    write_type_set(&path, &a).unwrap();
    assert_eq!(read_type_set(&path).unwrap(), a);
}

#[test]
fn security_type_set_has_four_stationary_members() {
    let data = synth_movement_data(2, 16, 8, GridBounds::default()).unwrap();
    let (world, _) = ingest_movement(data.as_bytes(), GridBounds::default()).unwrap();
    let sg = build_green_security_game(&world, 0.05, 0.9).unwrap();
    let types = security_type_set(&sg, 2).unwrap();
    let (kernel, positions) = types.kernel(&sg.defender).unwrap();
    assert_eq!(positions, vec![0, 1, 2, 3]);
    assert_eq!(kernel.len(), 4);
}
