use beliefsafe::harness::{
    emit_bound_curves, render, resolve_nfg, resolve_sbg, run_tradeoff_nfg, run_tradeoff_sbg, Format, Meta,
    NfgTradeoffConfig, SbgSource, SbgTradeoffConfig,
};
use beliefsafe::sbg::PolicyKind;

#[test]
fn nfg_sampling_agrees_with_exact_values() {
    for game in ["mp", "amp"] {
        let (m, theta) = resolve_nfg(game, None).unwrap();
        let cfg = NfgTradeoffConfig { lambda_grid: vec![0.0, 0.3, 0.7, 1.0], runs: 1000, horizon: 20, seed: 21 };
        let rows = run_tradeoff_nfg(&m, &theta, &cfg).unwrap();
        assert!(rows.iter().all(|r| r.consistent && r.within_envelope), "{game}: {rows:?}");
        // The sampled AMP points sit on the floor line (1 − λ, 1 + λ).
        if game == "amp" {
            for r in &rows {
                assert!((r.exact_risk - r.lower_risk.unwrap()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn sbg_sampling_agrees_with_exact_values() {
    let setup = resolve_sbg(&SbgSource::Pennies { adjusted: true }, 0.9, 5).unwrap();
    let cfg = SbgTradeoffConfig {
        lambda_grid: vec![0.0, 1.0],
        runs: 1000,
        horizon: 150,
        seed: 8,
        policy: PolicyKind::SafeExploit,
        belief: Some("type2".into()),
    };
    let rows = run_tradeoff_sbg(&setup, &cfg).unwrap();
    let stationary: Vec<_> = rows.iter().filter(|r| r.stationary).collect();
    assert_eq!(stationary.len(), 8);
    assert!(stationary.iter().all(|r| r.consistent == Some(true)), "{stationary:?}");
    assert!(rows.iter().filter(|r| !r.stationary).all(|r| r.consistent.is_none() && r.exact_gap.is_none()));
    // λ = 1 against the believed type attains the optimal value.
    let own = rows.iter().find(|r| r.lambda == 1.0 && r.true_type == "type2").unwrap();
    assert!((own.exact_value.unwrap() - own.optimal_value.unwrap()).abs() < 1e-8);
}

#[test]
fn bound_curves_are_ordered() {
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let rows = emit_bound_curves(&[0.3, 0.5, 0.9], 1.0, 0.0, &grid).unwrap();
    assert_eq!(rows.len(), 33);
    for r in &rows {
        assert!(r.lower_opportunity <= r.upper_opportunity && r.lower_risk <= r.upper_risk, "{r:?}");
        if r.lambda == 1.0 {
            assert_eq!((r.upper_opportunity, r.lower_opportunity), (0.0, 0.0));
        }
    }
    assert!(emit_bound_curves(&[1.0], 1.0, 0.0, &grid).is_err());
}

#[test]
fn csv_and_json_carry_the_same_rows() {
    let grid = [0.0, 1.0];
    let rows = emit_bound_curves(&[0.5], 1.0, 0.0, &grid).unwrap();
    let meta = Meta::new("bounds", None, &grid, true).unwrap();
    let csv = render(&rows, &meta, Format::Csv).unwrap();
    assert!(!csv.contains("timestamp"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 3);
    let json: serde_json::Value = serde_json::from_str(&render(&rows, &meta, Format::Json).unwrap()).unwrap();
    assert_eq!(json["rows"][0]["upper_opportunity"], 19.0);
    assert_eq!(json["meta"]["command"], "bounds");
}
