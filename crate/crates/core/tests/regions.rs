use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ragnet::chain::{simulate, truncated_stationary, OracleConfig, SimConfig};
use ragnet::regions::{
    classify_drift, closure_boundary, dominant_rates, in_stability_region, in_throughput_region, region_closure,
    trace_boundary, Dominant, Recurrence, Via, Which,
};
use ragnet::{ModelParams, SymmetricParams};

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let (a, b) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
    ModelParams {
        lambda1: 0.0,
        lambda2: 0.0,
        alpha1: rng.random_range(0.1..0.9),
        alpha2: rng.random_range(0.1..0.9),
        s1: rng.random_range(0.0..0.4),
        s2: rng.random_range(0.0..0.4),
        l1_plus: a,
        l1_minus: 1.0 - a,
        l2_plus: b,
        l2_minus: 1.0 - b,
    }
}

fn aloha() -> ModelParams {
    SymmetricParams::new(0.0, 0.5, 0.0, 0.0).embed()
}

#[test]
fn classical_examples() {
    let v = in_stability_region(0.2, 0.2, &aloha());
    assert!(v.member);
    assert_eq!(v.via, Via::Both);
    assert_eq!(classify_drift(0.2, 0.2, &aloha()).unwrap().verdict, Recurrence::PositiveRecurrent);
    assert!(!in_stability_region(0.3, 0.3, &aloha()).member);
    assert_ne!(classify_drift(0.3, 0.3, &aloha()).unwrap().verdict, Recurrence::PositiveRecurrent);
}

#[test]
fn drift_matches_expanded_inequality() {
    // r1 < 0 is the time-averaged first-axis drift being negative.
    let p = SymmetricParams::new(0.0, 0.5, 0.2, 0.4).embed();
    let d = classify_drift(0.1, 0.15, &p).unwrap();
    let rho = d.nu1d / (1.0 - d.nu3 + d.nu1d);
    let averaged = rho * (d.mu3 - 1.0) + (1.0 - rho) * (d.mu1d - 1.0);
    assert!((averaged * (1.0 - d.nu3 + d.nu1d) / (1.0 - d.nu3) - d.r1.unwrap()).abs() < 1e-14);
}

#[test]
fn dominant_removal_dominates_service() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let mut p = random_params(&mut rng);
        p.lambda1 = rng.random_range(0.0..0.3);
        p.lambda2 = rng.random_range(0.0..0.3);
        for d in [Dominant::R1, Dominant::R2] {
            if let Ok(r) = dominant_rates(&p, d) {
                assert!(r.m1 >= r.mu1 && r.m2 >= r.mu2);
                assert_eq!(r.m1 == r.mu1, p.s1 * p.l1_minus == 0.0);
                assert_eq!(r.m2 == r.mu2, p.s2 * p.l2_minus == 0.0);
            }
        }
    }
    let p = SymmetricParams::new(0.1, 0.5, 0.0, 0.5).embed();
    let r = dominant_rates(&p, Dominant::R1).unwrap();
    assert_eq!((r.m1, r.m2), (r.mu1, r.mu2));
}

#[test]
fn oracle_converges_inside_and_simulation_diverges_outside() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = OracleConfig::default();
    let (mut inside, mut outside) = (0, 0);
    while inside < 20 || outside < 20 {
        let p = random_params(&mut rng);
        let (l1, l2) = (rng.random_range(0.0..0.6), rng.random_range(0.0..0.6));
        let v = in_stability_region(l1, l2, &p);
        let q = p.with_lambdas(l1, l2);
        if inside < 20 && in_stability_region(l1 / 0.7, l2 / 0.7, &p).member {
            inside += 1;
            let o = truncated_stationary(&q, &cfg).unwrap();
            assert!(o.tail_mass < 1e-8);
        } else if outside < 20 && !v.member && v.margins.iter().any(|m| *m > 0.05) {
            let far = [v.margins[0].max(v.margins[1]), v.margins[2].max(v.margins[3])];
            if far.iter().all(|m| *m > 0.05) {
                outside += 1;
                let s = simulate(&q, &SimConfig::new(200_000, 0, outside as u64));
                assert!(s.diverged, "{q:?}");
            }
        }
    }
}

#[test]
fn boundary_is_strict() {
    let p = aloha();
    let pts = trace_boundary(&p, Which::Stability, 11).unwrap();
    for (l1, l2) in pts.into_iter().filter(|(a, _)| *a > 0.0) {
        assert!(in_stability_region(l1 - 1e-8, l2, &p).member);
        assert!(!in_stability_region(l1 + 1e-8, l2, &p).member);
    }
}

#[test]
fn closure_diagonal_refines() {
    // On the diagonal the signal-free closure reaches the best symmetric
    // operating point, here λ = 1/4 at α = 1/2.
    let p = SymmetricParams::new(0.0, 0.5, 0.0, 0.0).embed();
    let diag = |g: usize| {
        let c = region_closure(&p, Which::Stability, g, 201).unwrap();
        (0..201).filter(|&i| c.at(i, i)).map(|i| c.lambdas[i]).fold(0.0, f64::max)
    };
    let (coarse, fine) = (diag(19), diag(190));
    assert!(coarse <= fine + 1e-12);
    assert!((fine - 0.25).abs() <= 0.005 + 1e-12, "{fine}");
}

#[test]
fn envelope_points_lie_on_closure_edge() {
    let p = SymmetricParams::new(0.0, 0.5, 0.1, 0.2).embed();
    let env = closure_boundary(&p, Which::Throughput, 8, 41).unwrap();
    assert!(!env.is_empty());
    let alphas: Vec<f64> = (1..=8).map(|k| k as f64 / 9.0).collect();
    for (l1, l2) in env {
        let hit = alphas
            .iter()
            .any(|&a1| alphas.iter().any(|&a2| in_throughput_region(l1 - 1e-9, l2, &p.with_alphas(a1, a2)).member));
        assert!(hit, "({l1}, {l2})");
    }
}
