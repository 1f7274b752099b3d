mod common;

use beliefsafe::bounds::adversarial_matrix;
use beliefsafe::nfg::{
    best_response, expected_payoff, lambda_policy, opportunity_risk_nfg, theta_stats, Belief, BeliefSearch,
    HypothesisSet, MixedStrategy,
};
use beliefsafe::optimizer::maximin_strategy;
use common::*;
use proptest::prelude::*;
use rand::Rng as _;

fn random_theta(rng: &mut beliefsafe::rng::Rng, b: usize, k: usize) -> HypothesisSet {
    HypothesisSet::from_vectors((0..k).map(|_| random_distribution(rng, b)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaps_are_ordered_and_monotone(seed in any::<u64>(), lambda in 0.0f64..=1.0) {
        let mut rng = rng(seed);
        let (a, b, k) = (rng.random_range(1..=4), rng.random_range(2..=4), rng.random_range(1..=5));
        let m = uniform_matrix(&mut rng, a, b, 2.0);
        let theta = random_theta(&mut rng, b, k);
        let pi = lambda_policy(&m, &theta, lambda).unwrap();
        let grid: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();
        let r = opportunity_risk_nfg(&m, &theta, &pi, &grid, BeliefSearch::default()).unwrap();
        prop_assert!(r.opportunity >= -1e-12);
        prop_assert!(r.risk >= r.opportunity);
        prop_assert!(r.curve.windows(2).all(|w| w[0].gap <= w[1].gap));
    }

    #[test]
    fn scaling_scales_everything(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut rng = rng(seed);
        let (a, b) = (rng.random_range(1..=3), rng.random_range(2..=3));
        let m = uniform_matrix(&mut rng, a, b, 1.0);
        let scaled = m.map(|v| c * v);
        let theta = random_theta(&mut rng, b, 3);
        let (s, t) = (theta_stats(&theta, &m).unwrap(), theta_stats(&theta, &scaled).unwrap());
        prop_assert!((t.mu - c * s.mu).abs() <= 1e-9 * c.max(1.0));
        prop_assert!((t.nu - c * s.nu).abs() <= 1e-9 * c.max(1.0));
        prop_assert_eq!((t.eta, t.kappa), (s.eta, s.kappa));
        let rho = Belief::point(0, theta.len());
        prop_assert_eq!(best_response(&m, &rho, &theta).unwrap(), best_response(&scaled, &rho, &theta).unwrap());
        let r1 = opportunity_risk_nfg(&m, &theta, &lambda_policy(&m, &theta, 0.5).unwrap(), &[], BeliefSearch::default()).unwrap();
        let r2 = opportunity_risk_nfg(&scaled, &theta, &lambda_policy(&scaled, &theta, 0.5).unwrap(), &[], BeliefSearch::default()).unwrap();
        prop_assert!((r2.risk - c * r1.risk).abs() <= 1e-7 * c.max(1.0));
    }

    #[test]
    fn best_response_beats_every_vertex(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = (rng.random_range(1..=5), rng.random_range(2..=4));
        let m = uniform_matrix(&mut rng, a, b, 3.0);
        let theta = random_theta(&mut rng, b, 3);
        let rho = Belief::new(random_distribution(&mut rng, 3), &theta).unwrap();
        let br = best_response(&m, &rho, &theta).unwrap();
        prop_assert!(br.as_pure().is_some());
        let mean = MixedStrategy::new(rho.mean(&theta)).unwrap();
        let v = expected_payoff(&br, &m, &mean).unwrap();
        for i in 0..a {
            prop_assert!(v >= expected_payoff(&MixedStrategy::pure(a, i), &m, &mean).unwrap() - 1e-12);
        }
    }

    #[test]
    fn maximin_matches_vertex_enumeration(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let m = uniform_matrix(&mut rng, a, b, 4.0);
        let r = maximin_strategy(&m, &HypothesisSet::full_simplex(b)).unwrap();
        prop_assert!((r.value - vertex_maximin(&m)).abs() <= 1e-7, "{} vs {}", r.value, vertex_maximin(&m));
    }

    #[test]
    fn adversarial_matrix_respects_its_targets(seed in any::<u64>(), mu in 0.5f64..3.0, frac in 0.0f64..0.9) {
        let mut rng = rng(seed);
        let (a, b) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let k = rng.random_range(2..=5);
        let theta = random_theta(&mut rng, b, k);
        let nu = mu * frac;
        if let Ok(m) = adversarial_matrix(mu, nu, &theta, a, b) {
            let s = theta_stats(&theta, &m).unwrap();
            prop_assert!(s.mu <= mu + 1e-12 && s.nu >= nu - 1e-12, "{s:?}");
        }
    }
}

#[test]
fn full_trust_has_no_opportunity_loss_on_random_games() {
    let mut rng = rng(99);
    for _ in 0..50 {
        let m = uniform_matrix(&mut rng, 3, 3, 1.0);
        let theta = random_theta(&mut rng, 3, 4);
        let pi = lambda_policy(&m, &theta, 1.0).unwrap();
        let r = opportunity_risk_nfg(&m, &theta, &pi, &[], BeliefSearch::default()).unwrap();
        assert!(r.opportunity.abs() < 1e-12);
    }
}
