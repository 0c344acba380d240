//! Riemann boundary value problem for `Π(x,0)` and the quantities derived
//! from its solution.
//!
//! With `Φ1(z) = Π(x(z),0)/Π(0,0) − 1` inside the circle and
//! `Φ2(z) = Π(0,y(z))/Π(0,0) − 1` outside, the boundary condition is
//! `Φ1 = G·Φ2 + S` on the circle. For index 1 the general solution is
//! `Φ1 = e^{Γ⁺}(Ψ⁺ + c1·z + c0)`, `Φ2 = e^{Γ⁻}(Ψ⁻ + c1·z + c0)/z`, and the
//! constants follow from `x(z0) = 0` and `y(1/z0) = 0`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cauchy::{eval_inside, eval_inside_derivative, eval_outside, Spectral};
use super::conformal::{solve_theodorsen, CircleGrid};
use super::kernel::kernel_eval;
use crate::error::{Error, Result};
use crate::meanvalue::{l_from_pi, LRoutes, PiEstimates};
use crate::model::SymmetricParams;

/// Below this `|φ1 − x|` counts as a pole of `G` and `S` on the contour.
pub const POLE_TOL: f64 = 1e-12;
/// Largest accepted trailing Fourier coefficient of the solution.
pub const TAIL_TOL: f64 = 1e-7;
/// Richardson base step for the derivative cross-check.
pub const RICHARDSON_STEP: f64 = 1e-3;

/// `G(z_j)` and `S(z_j)` filled into the grid.
pub fn boundary_functions(mut grid: CircleGrid, p: &SymmetricParams) -> Result<CircleGrid> {
    let one = Complex64::new(1.0, 0.0);
    let mut g = Vec::with_capacity(grid.m);
    let mut s = Vec::with_capacity(grid.m);
    for j in 0..grid.m {
        if j == 0 {
            // Both are 0/0 at x = y = 1; the limits are G = 1, S = 0.
            g.push(one);
            s.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let (x, y) = (grid.x[j], grid.y[j]);
        let k = kernel_eval(x, y, p);
        let den = k.phi1 - x;
        if den.norm() < POLE_TOL {
            return Err(Error::PoleOnContour(j));
        }
        g.push(x * (y - k.phi2) / (y * den));
        s.push(x * (one - k.h) / den);
    }
    if g.iter().chain(&s).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::UnderResolved("non-finite boundary coefficient".into()));
    }
    grid.big_g = g;
    grid.big_s = s;
    Ok(grid)
}

/// Winding number of `G` around the origin along the grid.
pub fn compute_index(grid: &CircleGrid) -> Result<i32> {
    let g = &grid.big_g;
    if g.is_empty() {
        return Err(Error::Domain("boundary functions not computed".into()));
    }
    let m = g.len();
    let total: f64 = (0..m).map(|j| (g[(j + 1) % m] / g[j]).arg()).sum();
    let w = total / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 1e-6 {
        return Err(Error::NonIntegerWinding(w));
    }
    // A jump of more than a quarter turn between nodes leaves the count unreliable.
    let worst = (0..m).map(|j| (g[(j + 1) % m] / g[j]).arg().abs()).fold(0.0, f64::max);
    if worst > 0.5 * PI {
        return Err(Error::UnderResolved(format!("arg G jumps by {worst:.3} between nodes")));
    }
    Ok(r as i32)
}

/// Solution of the symmetric boundary value problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpSolution {
    pub m: usize,
    pub chi: i32,
    /// Interior point mapped to the origin.
    pub z0: f64,
    pub c0: Complex64,
    pub c1: Complex64,
    pub pi00: f64,
    pub pi10: f64,
    /// `Π₁(1,0)` from the Taylor coefficients of `Φ1` and `x`.
    pub pi1_10: f64,
    /// The same from Richardson-extrapolated difference quotients.
    pub pi1_10_richardson: f64,
    pub l_exact: f64,
    pub l_routes: LRoutes,
    pub kernel_residual: f64,
    /// `max_j |Φ1 − G·Φ2 − S|` on the nodes.
    pub boundary_residual: f64,
    /// `|Φ1(z0)| + |Φ2(1/z0)|`, zero up to rounding.
    pub side_residual: f64,
    /// Largest trailing Fourier coefficient among `x`, `Φ1` and `S·e^{−Γ⁺}`.
    pub tail: f64,
    pub iterations: usize,
    pub map_residual: f64,
    #[serde(skip)]
    pub grid: Option<CircleGrid>,
    #[serde(skip)]
    phi1_coef: Vec<Complex64>,
    #[serde(skip)]
    gamma_coef: Vec<Complex64>,
    #[serde(skip)]
    psi_coef: Vec<Complex64>,
}

impl BvpSolution {
    /// `Φ1(z)` for `|z| ≤ 1`.
    pub fn phi1(&self, z: Complex64) -> Complex64 {
        eval_inside(&self.gamma_coef, z).exp() * (eval_inside(&self.psi_coef, z) + self.c1 * z + self.c0)
    }

    /// `Φ2(z)` for `|z| ≥ 1`.
    pub fn phi2(&self, z: Complex64) -> Complex64 {
        (-eval_outside(&self.gamma_coef, z)).exp() * (eval_outside(&self.psi_coef, z) + self.c1 * z + self.c0) / z
    }

    /// `(x(z), Π(x(z), 0))` for `|z| ≤ 1`.
    pub fn pi_on_axis(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let grid = self.grid.as_ref()?;
        Some((grid.map_x(z), self.pi00 * (1.0 + self.phi1(z))))
    }

    /// Taylor coefficients of `Φ1`.
    pub fn phi1_coefficients(&self) -> &[Complex64] {
        &self.phi1_coef
    }
}

/// Real `z0 ∈ (−1, 1)` with `x(z0) = 0`.
fn find_z0(x_coef: &[Complex64]) -> f64 {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if eval_inside(x_coef, Complex64::new(mid, 0.0)).re > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn tail_of(coef: &[Complex64], both_sides: bool) -> f64 {
    let m = coef.len();
    let (half, w) = (m / 2, m / 16);
    let mut t = coef[half - w..half].iter().fold(0.0f64, |a, c| a.max(c.norm()));
    if both_sides {
        t = coef[half..half + w].iter().fold(t, |a, c| a.max(c.norm()));
    }
    t
}

pub fn solve_riemann(p: &SymmetricParams, m: usize) -> Result<BvpSolution> {
    let grid = solve_theodorsen(p, m)?;
    if (grid.x[0] - 1.0).norm() > 1e-8 {
        return Err(Error::NotOnContour);
    }
    let mut grid = boundary_functions(grid, p)?;
    let chi = compute_index(&grid)?;
    if chi != 1 {
        return Err(Error::Index(chi as i64));
    }

    let sp = Spectral::new(m);
    let z = sp.nodes();
    let g = &grid.big_g;
    let s = &grid.big_s;

    // log(G/z) with the argument made continuous from z = 1.
    let mut lg = Vec::with_capacity(m);
    let mut arg = 0.0;
    for j in 0..m {
        let v = g[j] / z[j];
        if j > 0 {
            arg += (v / (g[j - 1] / z[j - 1])).arg();
        }
        lg.push(Complex64::new(v.norm().ln(), arg));
    }
    let gamma_coef = sp.coefficients(&lg);
    let gamma_plus = sp.plus(&gamma_coef);
    let gamma_minus = sp.minus(&gamma_coef);

    let h: Vec<Complex64> = (0..m).map(|j| s[j] * (-gamma_plus[j]).exp()).collect();
    let psi_coef = sp.coefficients(&h);
    let psi_plus = sp.plus(&psi_coef);
    let psi_minus = sp.minus(&psi_coef);

    let z0 = find_z0(&grid.x_coef);
    let (c1, c0) = if z0.abs() < 1e-12 {
        (Complex64::new(0.0, 0.0), -psi_coef[0])
    } else {
        let zc = Complex64::new(z0, 0.0);
        let a = Matrix2::new(zc, Complex64::new(1.0, 0.0), zc.inv(), Complex64::new(1.0, 0.0));
        let b = Vector2::new(-eval_inside(&psi_coef, zc), -eval_outside(&psi_coef, zc.inv()));
        let sol = a.lu().solve(&b).ok_or(Error::Singular(0))?;
        (sol[0], sol[1])
    };

    let phi1: Vec<Complex64> = (0..m)
        .map(|j| gamma_plus[j].exp() * (psi_plus[j] + c1 * z[j] + c0))
        .collect();
    let phi2: Vec<Complex64> = (0..m)
        .map(|j| gamma_minus[j].exp() * (psi_minus[j] + c1 * z[j] + c0) / z[j])
        .collect();
    let boundary_residual = (0..m)
        .map(|j| (phi1[j] - phi2[j] * g[j] - s[j]).norm())
        .fold(0.0, f64::max);
    let phi1_coef = sp.coefficients(&phi1);

    let lam = p.lambda;
    let (sp_, sm) = (p.s * p.l_plus, p.s * p.l_minus);
    let cl = p.clean();
    let sa = p.s_bar() * p.alpha;
    let ca = sa - 2.0 * cl - sm;
    let cb = cl - sa;
    let cr = lam + sp_ - (p.s + cl);
    let ratio = 1.0 + phi1[0].re;
    let pi00 = cr / (ratio * ca + cb);
    let pi10 = ratio * pi00;

    let one = Complex64::new(1.0, 0.0);
    let dphi = eval_inside_derivative(&phi1_coef, one);
    let dx = eval_inside_derivative(&grid.x_coef, one);
    let pi1_10 = pi00 * (dphi / dx).re;
    let pi1_10_richardson = pi00 * richardson(|t| {
        let zt = Complex64::new(t, 0.0);
        let ph = eval_inside(&gamma_coef, zt).exp() * (eval_inside(&psi_coef, zt) + c1 * zt + c0);
        (ph.re, grid.map_x(zt).re)
    }, phi1[0].re);

    let tail = tail_of(&grid.x_coef, false)
        .max(tail_of(&phi1_coef, false))
        .max(tail_of(&psi_coef, true));
    if tail > TAIL_TOL {
        return Err(Error::UnderResolved(format!(
            "trailing Fourier coefficient {tail:.2e} at M = {m}"
        )));
    }

    let zc = Complex64::new(z0, 0.0);
    let side_residual = if z0.abs() < 1e-12 {
        (psi_coef[0] + c0).norm()
    } else {
        (eval_inside(&psi_coef, zc) + c1 * zc + c0).norm()
            + (eval_outside(&psi_coef, zc.inv()) + c1 * zc.inv() + c0).norm()
    };

    let est = PiEstimates {
        pi00,
        pi10,
        pi1_10,
        p_both_busy: 1.0 - 2.0 * pi10 + pi00,
    };
    let l_routes = l_from_pi(&est, p);
    grid.gamma_plus = gamma_plus;
    Ok(BvpSolution {
        m,
        chi,
        z0,
        c0,
        c1,
        pi00,
        pi10,
        pi1_10,
        pi1_10_richardson,
        l_exact: l_routes.diagonal,
        l_routes,
        kernel_residual: grid.kernel_residual,
        boundary_residual,
        side_residual,
        tail,
        iterations: grid.iterations,
        map_residual: grid.map_residual,
        grid: Some(grid),
        phi1_coef,
        gamma_coef,
        psi_coef,
    })
}

/// Doubles `M` from `m0` until the trailing coefficients are below
/// [`TAIL_TOL`] and two successive solutions agree to `agree` in `pi00`,
/// `pi1_10` and `l_exact`. Returns the finer solution.
pub fn solve_adaptive(p: &SymmetricParams, m0: usize, m_max: usize, agree: f64) -> Result<BvpSolution> {
    let mut m = m0;
    let mut prev: Option<BvpSolution> = None;
    let mut last_err = None;
    while m <= m_max {
        match solve_riemann(p, m) {
            Ok(sol) => {
                if let Some(q) = &prev {
                    let d = (sol.pi00 - q.pi00)
                        .abs()
                        .max((sol.pi1_10 - q.pi1_10).abs())
                        .max((sol.l_exact - q.l_exact).abs());
                    if d < agree {
                        return Ok(sol);
                    }
                }
                prev = Some(sol);
                last_err = None;
            }
            Err(e @ (Error::UnderResolved(_) | Error::NoConvergence { .. } | Error::Singular(_))) => {
                prev = None;
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
        m *= 2;
    }
    Err(last_err.unwrap_or_else(|| Error::UnderResolved(format!("no agreement up to M = {m_max}"))))
}

/// `dΦ/dx` at `z = 1` from one-sided quotients along the real radius,
/// extrapolated over the steps `h`, `h/2`, `h/4`. `f(t)` returns
/// `(Φ(t), x(t))`; `at_one` is `Φ(1)`.
fn richardson(f: impl Fn(f64) -> (f64, f64), at_one: f64) -> f64 {
    let d = |h: f64| {
        let (ph, x) = f(1.0 - h);
        (at_one - ph) / (1.0 - x)
    };
    let h = RICHARDSON_STEP;
    let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
    let r1 = 2.0 * d2 - d1;
    let r2 = 2.0 * d3 - d2;
    (4.0 * r2 - r1) / 3.0
}
