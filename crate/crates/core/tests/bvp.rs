use std::f64::consts::PI;

use num_complex::Complex64;
use ragnet::bvp::{
    boundary_functions, compute_index, kernel_eval, kernel_root_g, solve_adaptive, solve_riemann, solve_theodorsen,
};
use ragnet::chain::{truncated_stationary, OracleConfig};
use ragnet::meanvalue::queue_bounds;
use ragnet::{Error, SymmetricParams};

fn base() -> SymmetricParams {
    SymmetricParams::new(0.1, 0.5, 0.2, 0.5)
}

#[test]
fn root_bounded_on_circle() {
    let p = base();
    for k in 0..1024 {
        let r = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 1024.0);
        let g = kernel_root_g(r, &p).unwrap();
        assert!(g > 0.0 && g <= 1.0 + 1e-15, "g = {g} at node {k}");
        let z = kernel_eval(g * r, g / r, &p).z;
        assert!(z.norm() < 1e-12, "residual {} at node {k}", z.norm());
    }
}

#[test]
fn root_rejects_off_circle() {
    assert!(matches!(kernel_root_g(Complex64::new(0.5, 0.0), &base()), Err(Error::Domain(_))));
}

#[test]
fn map_refinement() {
    let p = base();
    let a = solve_theodorsen(&p, 1024).unwrap();
    let b = solve_theodorsen(&p, 2048).unwrap();
    let worst = (0..1024).map(|j| (a.x[j] - b.x[2 * j]).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
    for j in 1..1024 {
        assert!((a.x[1024 - j] - a.x[j].conj()).norm() < 1e-12);
        assert!(a.x[j].norm() <= 1.0 && a.y[j].norm() <= 1.0);
    }
    assert_eq!(a.x[0], Complex64::new(1.0, 0.0));
}

#[test]
fn boundary_functions_at_one() {
    let p = base();
    let grid = boundary_functions(solve_theodorsen(&p, 1024).unwrap(), &p).unwrap();
    assert_eq!(grid.big_s[0], Complex64::new(0.0, 0.0));
    assert!(grid.big_g.iter().all(|g| g.re.is_finite() && g.im.is_finite()));
    assert_eq!(compute_index(&grid).unwrap(), 1);
}

#[test]
fn index_stable_under_doubling() {
    let p = SymmetricParams::new(0.15, 0.6, 0.3, 0.3);
    for m in [512, 1024, 2048] {
        let grid = boundary_functions(solve_theodorsen(&p, m).unwrap(), &p).unwrap();
        assert_eq!(compute_index(&grid).unwrap(), 1);
    }
}

#[test]
fn empty_limit() {
    let s = solve_riemann(&SymmetricParams::new(1e-6, 0.5, 0.2, 0.5), 1024).unwrap();
    assert!((s.pi00 - 1.0).abs() < 1e-3);
    assert!(s.l_exact.abs() < 1e-3);
}

#[test]
fn side_conditions_hold() {
    let s = solve_riemann(&base(), 1024).unwrap();
    let z0 = Complex64::new(s.z0, 0.0);
    assert!(s.phi1(z0).norm() < 1e-8);
    assert!(s.phi2(1.0 / z0).norm() < 1e-8);
    assert!(s.boundary_residual < 1e-6);
    let grid = s.grid.as_ref().unwrap();
    assert!(grid.map_x(z0).norm() < 1e-10);
}

#[test]
fn pi_on_axis_matches_endpoints() {
    let s = solve_riemann(&base(), 1024).unwrap();
    let (x, v) = s.pi_on_axis(Complex64::new(1.0, 0.0)).unwrap();
    assert!((x - 1.0).norm() < 1e-12);
    assert!((v.re - s.pi10).abs() < 1e-10);
    let (x, v) = s.pi_on_axis(Complex64::new(s.z0, 0.0)).unwrap();
    assert!(x.norm() < 1e-10);
    assert!((v.re - s.pi00).abs() < 1e-8);
}

#[test]
fn oracle_sweep() {
    let cfg = OracleConfig::default();
    for (l, a, sg, lp) in [(0.05, 0.4, 0.4, 0.2), (0.25, 0.5, 0.3, 0.2), (0.2, 0.3, 0.2, 0.0)] {
        let p = SymmetricParams::new(l, a, sg, lp);
        let s = solve_riemann(&p, 1024).unwrap();
        let o = truncated_stationary(&p.embed(), &cfg).unwrap();
        assert!((s.pi00 - o.pi00()).abs() < 1e-8, "{p:?}");
        assert!((s.pi10 - o.pi10()).abs() < 1e-8, "{p:?}");
        assert!((s.l_exact - o.stats.mean_q1).abs() < 1e-7, "{p:?}");
    }
}

#[test]
fn exact_mean_at_bound_collapse() {
    // With l⁻ = 0 the two bounds coincide and equal the exact mean.
    let p = SymmetricParams::new(0.1, 0.5, 0.2, 1.0);
    let b = queue_bounds(&p).unwrap();
    assert_eq!(b.l_low, b.l_up);
    match solve_riemann(&p, 1024) {
        Err(Error::Degenerate(_)) => {}
        other => panic!("expected degenerate contour, got {other:?}"),
    }
}

#[test]
fn degenerate_signal_free_case() {
    let p = SymmetricParams::new(0.1, 0.5, 0.0, 0.5);
    assert!(matches!(solve_riemann(&p, 1024), Err(Error::Degenerate(_))));
    let g = kernel_root_g(Complex64::new(-1.0, 0.0), &p).unwrap();
    assert!(g < 1e-6);
}

#[test]
fn adaptive_resolves_small_signal_rate() {
    let p = SymmetricParams::new(0.1, 0.5, 0.05, 0.5);
    let s = solve_adaptive(&p, 1024, 1 << 15, 1e-7).unwrap();
    let o = truncated_stationary(&p.embed(), &OracleConfig::default()).unwrap();
    assert!(s.m >= 4096);
    assert!((s.l_exact - o.stats.mean_q1).abs() < 1e-7, "{} vs {}", s.l_exact, o.stats.mean_q1);
}
