mod common;

use beliefsafe::sbg::io::{read_sbg, write_sbg, SbgFile};
use beliefsafe::sbg::{
    optimal_value, policy_evaluation, safe_exploit_policy, simulate_episode, AgentPolicy, SbgModel,
    StochasticGame, StrategyKernel,
};
use common::*;
use proptest::prelude::*;
use rand::Rng as _;

fn random_model(seed: u64) -> SbgModel {
    let mut rng = rng(seed);
    let ns = rng.random_range(1..=3);
    let (na, nb, nt) = (rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(1..=3));
    let gamma = 0.2 + 0.7 * rng.random::<f64>();
    let reward = (0..ns).map(|_| (0..na).map(|_| (0..nb).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect()).collect()).collect();
    let transition = (0..ns)
        .map(|_| (0..na).map(|_| (0..nb).map(|_| random_distribution(&mut rng, ns)).collect()).collect())
        .collect();
    let g = StochasticGame::new(reward, transition, gamma, None).unwrap();
    let dists = (0..nt).map(|_| (0..ns).map(|_| random_distribution(&mut rng, nb)).collect()).collect();
    let k = StrategyKernel::new((0..nt).map(|t| format!("t{t}")).collect(), dists, &g).unwrap();
    SbgModel::with_all_types(g, k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn values_stay_within_the_reward_bound(seed in any::<u64>()) {
        let model = random_model(seed);
        let bound = model.game().value_bound() + 1e-9;
        prop_assert!(model.game_value().values.values().iter().all(|v| v.abs() <= bound));
        for t in 0..model.kernel().len() {
            let (v, greedy) = model.optimal(t).unwrap();
            prop_assert!(v.values().iter().all(|x| x.abs() <= bound));
            // The greedy policy attains the optimal value.
            let back = policy_evaluation(model.game(), greedy, model.kernel().sigma(t)).unwrap();
            prop_assert!(back.sup_distance(v) <= 1e-8);
        }
    }

    #[test]
    fn optimal_value_dominates_every_policy(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let model = random_model(seed);
        let pi = safe_exploit_policy(&model, 0, lambda).unwrap();
        for t in 0..model.kernel().len() {
            let v = policy_evaluation(model.game(), &pi, model.kernel().sigma(t)).unwrap();
            let (best, _) = model.optimal(t).unwrap();
            prop_assert!(v.values().iter().zip(best.values()).all(|(a, b)| a <= &(b + 1e-8)));
        }
    }

    #[test]
    fn reward_shift_leaves_the_policy_unchanged(seed in any::<u64>(), c in -3.0f64..3.0, lambda in 0.0f64..=1.0) {
        let model = random_model(seed);
        let shifted = SbgModel::with_all_types(model.game().shifted(c), model.kernel().clone()).unwrap();
        let gamma = model.game().gamma();
        let d = (shifted.game_value().nu - model.game_value().nu) - c / (1.0 - gamma);
        prop_assert!(d.abs() <= 1e-7, "value moved by {d}");
        let (a, b) = (safe_exploit_policy(&model, 0, lambda).unwrap(), safe_exploit_policy(&shifted, 0, lambda).unwrap());
        // Compared through values, so a rounding-level tie flip cannot fail the test.
        let va = policy_evaluation(model.game(), &a, model.kernel().sigma(0)).unwrap();
        let vb = policy_evaluation(shifted.game(), &b, model.kernel().sigma(0)).unwrap();
        prop_assert!(va.values().iter().zip(vb.values()).all(|(x, y)| (y - x - c / (1.0 - gamma)).abs() <= 1e-6));
    }
}

#[test]
fn zero_horizon_episode_is_empty() {
    let model = random_model(5);
    let g = model.game();
    let pi = AgentPolicy::deterministic(&vec![0; g.n_states()], g.n_agent_actions());
    let opp = AgentPolicy::new(model.kernel().sigma(0).to_vec()).unwrap();
    let init = vec![1.0 / g.n_states() as f64; g.n_states()];
    let t = simulate_episode(g, &pi, &opp, &init, 0, 1).unwrap();
    assert!(t.states.is_empty() && t.rewards.is_empty());
    assert_eq!(t.discounted_return, 0.0);
}

#[test]
fn constant_reward_gives_a_geometric_return() {
    let gamma = 0.8;
    let reward = vec![vec![vec![1.5; 2]; 2]; 2];
    let transition = vec![vec![vec![vec![0.5, 0.5]; 2]; 2]; 2];
    let g = StochasticGame::new(reward, transition, gamma, None).unwrap();
    let pi = AgentPolicy::new(vec![vec![0.5, 0.5]; 2]).unwrap();
    let t = simulate_episode(&g, &pi, &pi, &[1.0, 0.0], 30, 9).unwrap();
    let want = 1.5 * (1.0 - gamma.powi(30)) / (1.0 - gamma);
    assert!((t.discounted_return - want).abs() < 1e-12);
    let v = policy_evaluation(&g, &pi, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
    assert!(v.values().iter().all(|x| (x - 1.5 / (1.0 - gamma)).abs() < 1e-8));
    let (opt, _) = optimal_value(&g, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    assert!(opt.sup_distance(&v) < 1e-8);
}

#[test]
fn episodes_replay_from_their_seed() {
    let model = random_model(11);
    let g = model.game();
    let pi = safe_exploit_policy(&model, 0, 0.5).unwrap();
    let opp = AgentPolicy::new(model.kernel().sigma(0).to_vec()).unwrap();
    let init = vec![1.0 / g.n_states() as f64; g.n_states()];
    let a = simulate_episode(g, &pi, &opp, &init, 40, 3).unwrap();
    assert_eq!(a, simulate_episode(g, &pi, &opp, &init, 40, 3).unwrap());
}

#[test]
fn game_files_round_trip() {
    let model = random_model(17);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.json");
    write_sbg(&path, &SbgFile::from_parts(model.game(), model.kernel(), None, None)).unwrap();
    let loaded = read_sbg(&path).unwrap();
    // Rewards survive exactly; distributions are renormalized on load.
    let g = model.game();
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-15);
    assert_eq!((loaded.game.gamma(), loaded.game.r_max()), (g.gamma(), g.r_max()));
    for s in 0..g.n_states() {
        for a in 0..g.n_agent_actions() {
            for b in 0..g.n_opponent_actions() {
                assert_eq!(loaded.game.reward(s, a, b), g.reward(s, a, b));
                assert!(close(loaded.game.next_states(s, a, b), g.next_states(s, a, b)));
            }
        }
    }
    assert_eq!(loaded.kernel.names(), model.kernel().names());
    for t in 0..model.kernel().len() {
        for (x, y) in loaded.kernel.sigma(t).iter().zip(model.kernel().sigma(t)) {
            assert!(close(x, y));
        }
    }
}

