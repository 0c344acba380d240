use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ragnet::chain::{simulate, truncated_stationary, OracleConfig, SimConfig};
use ragnet::meanvalue::{flow_residuals, l_from_pi, queue_bounds, symmetric_stability, PiEstimates};
use ragnet::regions::in_stability_region;
use ragnet::SymmetricParams;

fn random_symmetric(rng: &mut ChaCha8Rng) -> SymmetricParams {
    SymmetricParams::new(
        rng.random_range(0.0..0.35),
        rng.random_range(0.05..0.95),
        rng.random_range(0.0..0.6),
        rng.random_range(0.0..1.0),
    )
}

#[test]
fn stability_agrees_with_region() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let p = random_symmetric(&mut rng);
        let v = in_stability_region(p.lambda, p.lambda, &p.embed());
        if v.boundary {
            continue;
        }
        assert_eq!(symmetric_stability(&p).stable, v.member, "{p:?}");
    }
}

#[test]
fn gap_formula_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut n = 0;
    while n < 100 {
        let p = random_symmetric(&mut rng);
        let Ok(b) = queue_bounds(&p) else { continue };
        n += 1;
        let (s, sb, a) = (p.s, p.s_bar(), p.alpha);
        let ab = 1.0 - a;
        let sp = s * p.l_plus;
        let expect = (s * p.l_minus).powi(2) * (sp + sb * a - sb * sb * a * ab)
            / (2.0 * (s + sb * a + sp) * (s + sb * sb * a * ab - p.lambda - sp));
        assert!((b.gap - expect).abs() <= 1e-12 * expect.abs().max(1.0), "{p:?}");
        assert!(b.l_up >= b.l_low);
    }
}

#[test]
fn bounds_decrease_in_alpha() {
    for lp in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for k in 0..=30 {
            let a = 0.3 + 0.01 * k as f64;
            let b = queue_bounds(&SymmetricParams::new(0.1, a, 0.2, lp)).unwrap();
            assert!(b.l_low <= prev.0 + 1e-12 && b.l_up <= prev.1 + 1e-12, "l⁺ = {lp}, α = {a}");
            prev = (b.l_low, b.l_up);
        }
    }
}

#[test]
fn gap_shrinks_as_triggering_grows() {
    for a in [0.3, 0.45, 0.6] {
        let gaps: Vec<f64> = (0..=10)
            .map(|k| queue_bounds(&SymmetricParams::new(0.1, a, 0.2, 0.1 * k as f64)).unwrap().gap)
            .collect();
        // The gap peaks near l⁺ = 0.1 and shrinks from there to zero.
        assert!(gaps[1..].windows(2).all(|w| w[1] <= w[0] + 1e-15), "{gaps:?}");
        assert!(gaps[10] == 0.0 && gaps[9] < gaps[0]);
    }
}

#[test]
fn diagonal_route_is_exact() {
    let cfg = OracleConfig { tail_tol: 1e-12, ..OracleConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut n = 0;
    while n < 10 {
        let p = random_symmetric(&mut rng);
        let st = symmetric_stability(&p);
        if !st.stable || st.margins.iter().any(|m| *m > -0.05) {
            continue;
        }
        n += 1;
        let o = truncated_stationary(&p.embed(), &cfg).unwrap();
        let r = l_from_pi(&PiEstimates::from_solution(&o), &p);
        assert!((r.diagonal - o.stats.mean_q1).abs() < 1e-8, "{p:?}");
    }
}

#[test]
fn transfer_route_exact_only_without_triggering() {
    let cfg = OracleConfig { tail_tol: 1e-12, ..OracleConfig::default() };
    for (l, a, s) in [(0.1, 0.5, 0.2), (0.05, 0.3, 0.4), (0.15, 0.6, 0.1)] {
        let plain = SymmetricParams::new(l, a, s, 0.0);
        let o = truncated_stationary(&plain.embed(), &cfg).unwrap();
        let r = l_from_pi(&PiEstimates::from_solution(&o), &plain);
        assert!((r.transfer_balance - o.stats.mean_q1).abs() < 1e-8);

        let trig = SymmetricParams::new(l, a, s, 0.5);
        let o = truncated_stationary(&trig.embed(), &cfg).unwrap();
        let r = l_from_pi(&PiEstimates::from_solution(&o), &trig);
        assert!((r.transfer_balance - o.stats.mean_q1).abs() > 1e-4);
    }
}

#[test]
fn signal_free_mean_matches_classical_relation() {
    // Without signals the two users form collision ALOHA, whose symmetric
    // mean follows from the diagonal balance alone.
    let cfg = OracleConfig { tail_tol: 1e-12, ..OracleConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut n = 0;
    while n < 10 {
        let p = SymmetricParams::new(rng.random_range(0.01..0.2), rng.random_range(0.2..0.8), 0.0, 0.0);
        if !symmetric_stability(&p).stable || symmetric_stability(&p).margins.iter().any(|m| *m > -0.03) {
            continue;
        }
        n += 1;
        let o = truncated_stationary(&p.embed(), &cfg).unwrap();
        let r = l_from_pi(&PiEstimates::from_solution(&o), &p);
        let b = queue_bounds(&p).unwrap();
        assert!((r.transfer_balance - o.stats.mean_q1).abs() < 1e-8);
        assert!((b.l_low - o.stats.mean_q1).abs() < 1e-8, "{p:?}: {} vs {}", b.l_low, o.stats.mean_q1);
    }
}

#[test]
fn simulated_residuals_within_noise() {
    let p = SymmetricParams::new(0.1, 0.5, 0.2, 0.5).embed();
    let s = simulate(&p, &SimConfig::new(2_000_000, 100_000, 5));
    let r = flow_residuals(&s, &p);
    for i in 0..3 {
        assert!(r.values()[i].abs() <= 3.0 * r.se[i] + 1e-12, "{i}: {:?}", r);
    }
}

#[test]
fn zero_load_routes() {
    let p = SymmetricParams::new(0.0, 0.5, 0.2, 0.5);
    let pi = PiEstimates {
        pi00: 1.0,
        pi10: 1.0,
        pi1_10: 0.0,
        p_both_busy: 0.0,
    };
    let r = l_from_pi(&pi, &p);
    assert!(r.diagonal.abs() < 1e-15);
}
