use ragnet::chain::{simulate, simulate_dominant, simulate_replications, truncated_stationary, OracleConfig, SimConfig};
use ragnet::regions::{dominant_rates, Dominant};
use ragnet::{ModelParams, SymmetricParams};

fn aloha(l1: f64, l2: f64) -> ModelParams {
    SymmetricParams::new(0.0, 0.5, 0.0, 0.0).embed().with_lambdas(l1, l2)
}

#[test]
fn classical_throughput_equals_load() {
    let p = aloha(0.2, 0.2);
    let s = simulate(&p, &SimConfig::new(1_000_000, 100_000, 3));
    assert!((s.throughput1 - 0.2).abs() <= 3.0 * s.se_throughput1);
    assert_eq!(s.drop_rate1, 0.0);
    let o = truncated_stationary(&p, &OracleConfig::default()).unwrap();
    assert!((o.stats.throughput1 - 0.2).abs() < 1e-9);
    assert!(s.disagreements(&o.stats, 3.0, 1e-12).is_empty());
}

#[test]
fn symmetric_queues_agree() {
    let p = SymmetricParams::new(0.1, 0.5, 0.2, 0.5).embed();
    let s = simulate_replications(&p, &SimConfig::new(500_000, 50_000, 9), 4);
    let se = (s.se_mean_q1.powi(2) + s.se_mean_q2.powi(2)).sqrt();
    assert!((s.mean_q1 - s.mean_q2).abs() <= 3.0 * se);
}

#[test]
fn dominant_without_signals() {
    let mut p = aloha(0.1, 0.1);
    p.alpha1 = 0.4;
    p.alpha2 = 0.6;
    let s = simulate_dominant(&p, Dominant::R1, &SimConfig::new(1_000_000, 100_000, 4));
    let expect = 1.0 - 0.1 / (0.6 * 0.6);
    assert!((dominant_rates(&p, Dominant::R1).unwrap().p_empty_other - expect).abs() < 1e-15);
    assert!((s.p_empty2 - expect).abs() <= 3.0 * s.se_p_empty2);
}

#[test]
fn saturated_dominant_queue_does_not_matter() {
    let base = SymmetricParams::new(0.1, 0.5, 0.1, 0.4).embed();
    let cfg = SimConfig::new(300_000, 10_000, 8);
    let a = simulate_dominant(&base.with_lambdas(0.9, 0.1), Dominant::R1, &cfg);
    let b = simulate_dominant(&base.with_lambdas(0.5, 0.1), Dominant::R1, &cfg);
    assert_eq!(a.p_empty2, b.p_empty2);
    assert_eq!(a.mean_q2, b.mean_q2);
}

#[test]
fn oracle_serializes_with_stats() {
    let p = SymmetricParams::new(0.1, 0.5, 0.2, 0.5).embed();
    let o = truncated_stationary(&p, &OracleConfig::default()).unwrap();
    let v: serde_json::Value = serde_json::to_value(&o).unwrap();
    assert!(v["stats"]["mean_q1"].is_number());
    assert!(v["tail_mass"].as_f64().unwrap() < 1e-8);
    assert!(v["n"].as_u64().unwrap() >= 32);
}
