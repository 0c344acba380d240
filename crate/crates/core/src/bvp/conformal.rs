//! Conformal map of the unit disk onto the interior of the kernel contour.
//!
//! The contour is `X(θ) = g(θ)e^{iθ}`. The map is normalised by `x(1) = 1`
//! and `x(0) = c`, where `c` is the midpoint of the contour's real
//! diameter; the origin is reached at an interior point `z0` found later.
//! The boundary correspondence `θ(φ)` solves the discretised Theodorsen
//! equation
//!
//! `arg(X(θ_j) − c) − φ_j = K[log|X(θ) − c|]_j − K[log|X(θ) − c|]_0`
//!
//! with `K` the discrete harmonic conjugate, by Newton's method.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cauchy::Spectral;
use super::gmres::gmres;
use super::kernel::{contour_g, contour_point, kernel_eval};
use crate::error::{Error, Result};
use crate::meanvalue::symmetric_stability;
use crate::model::SymmetricParams;

/// Residual at which Newton stops.
pub const MAP_TOL: f64 = 1e-12;
/// Largest accepted kernel-identity residual on the contour.
pub const KERNEL_TOL: f64 = 1e-8;
const MAX_NEWTON: usize = 60;
const ARG_TABLE: usize = 8192;
/// Largest grid for which the dense Newton fallback is attempted.
const DENSE_MAX: usize = 4096;

/// Boundary data on the nodes `z_j = exp(2πij/M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleGrid {
    pub m: usize,
    /// Image of `z = 0`.
    pub center: f64,
    /// Angle function `θ_j`, the argument of `x(z_j)`.
    pub theta: Vec<f64>,
    pub g: Vec<f64>,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    /// Taylor coefficients of `x(z)`, negative modes at the top.
    pub x_coef: Vec<Complex64>,
    /// `G(z_j)` and `S(z_j)`; empty until [`super::boundary_functions`].
    pub big_g: Vec<Complex64>,
    pub big_s: Vec<Complex64>,
    /// `Γ⁺(z_j)`; empty until the Riemann problem is solved.
    pub gamma_plus: Vec<Complex64>,
    pub iterations: usize,
    pub map_residual: f64,
    pub kernel_residual: f64,
}

impl CircleGrid {
    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.m)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.m as f64))
            .collect()
    }

    /// `x(z)` for `|z| ≤ 1` from the Taylor series.
    pub fn map_x(&self, z: Complex64) -> Complex64 {
        super::cauchy::eval_inside(&self.x_coef, z)
    }

    /// Largest coefficient among the top eighth of the positive modes.
    pub fn tail(&self) -> f64 {
        let half = self.m / 2;
        self.x_coef[half - half / 8..half].iter().fold(0.0, |a, c| a.max(c.norm()))
    }
}

/// Continuous argument of `X(θ) − c` on `[0, 2π]`.
struct ArgTable {
    c: f64,
    w: Vec<Complex64>,
    a: Vec<f64>,
}

impl ArgTable {
    fn new(p: &SymmetricParams, c: f64) -> Self {
        let mut w: Vec<Complex64> = Vec::with_capacity(ARG_TABLE + 1);
        let mut a = Vec::with_capacity(ARG_TABLE + 1);
        for k in 0..=ARG_TABLE {
            let th = 2.0 * PI * k as f64 / ARG_TABLE as f64;
            let v = contour_g(th, p) * Complex64::from_polar(1.0, th) - c;
            let next = match w.last() {
                None => 0.0,
                Some(prev) => a[k - 1] + (v / *prev).arg(),
            };
            w.push(v);
            a.push(next);
        }
        ArgTable { c, w, a }
    }

    fn winding(&self) -> f64 {
        self.a[ARG_TABLE] / (2.0 * PI)
    }

    fn eval(&self, theta: f64, x: Complex64) -> f64 {
        let i = (theta / (2.0 * PI) * ARG_TABLE as f64).round().clamp(0.0, ARG_TABLE as f64) as usize;
        self.a[i] + ((x - self.c) / self.w[i]).arg()
    }
}

pub(crate) fn check_supported(p: &SymmetricParams) -> Result<()> {
    p.validate()?;
    let st = symmetric_stability(p);
    if !st.stable {
        return Err(Error::Unstable(format!("symmetric stability margins {:?}", st.margins)));
    }
    if p.s * p.l_minus * p.lambda_bar() == 0.0 {
        return Err(Error::Degenerate(
            "kernel contour passes through the origin (s·l⁻ = 0 or λ = 1)".into(),
        ));
    }
    Ok(())
}

pub(crate) fn check_grid_size(m: usize) -> Result<()> {
    if m < 256 || !m.is_power_of_two() {
        return Err(Error::Domain(format!("M = {m} must be a power of two ≥ 256")));
    }
    Ok(())
}

struct Residual {
    f: Vec<f64>,
    x: Vec<Complex64>,
    dx: Vec<Complex64>,
    norm: f64,
}

/// Solves `J s = f` for `J = diag(Im q) − K₀ diag(Re q)`, where `K₀` is the
/// conjugation operator with its first row subtracted. GMRES with the
/// diagonal as right preconditioner, dense LU as fallback.
fn newton_step(sp: &Spectral, kappa: &[f64], q: &[Complex64], f: &[f64]) -> Option<Vec<f64>> {
    let m = q.len();
    if q.iter().all(|v| v.im > 0.0) {
        let apply = |u: &[f64]| -> Vec<f64> {
            let bx: Vec<f64> = (0..m).map(|j| q[j].re * u[j] / q[j].im).collect();
            let kb = sp.conjugate(&bx);
            (0..m).map(|i| u[i] - (kb[i] - kb[0])).collect()
        };
        if let Some(u) = gmres(apply, f, 1e-13, 400) {
            return Some((0..m).map(|j| u[j] / q[j].im).collect());
        }
    }
    if m > DENSE_MAX {
        return None;
    }
    let jac = DMatrix::from_fn(m, m, |i, j| {
        let kr = kappa[(i + m - j) % m] - kappa[(m - j) % m];
        let d = if i == j { q[j].im } else { 0.0 };
        d - kr * q[j].re
    });
    jac.lu().solve(&DVector::from_column_slice(f)).map(|s| s.as_slice().to_vec())
}

pub fn solve_theodorsen(p: &SymmetricParams, m: usize) -> Result<CircleGrid> {
    check_supported(p)?;
    check_grid_size(m)?;
    let center = 0.5 * (1.0 - contour_g(PI, p));
    let table = ArgTable::new(p, center);
    let wind = table.winding();
    if (wind - 1.0).abs() > 1e-9 {
        return Err(Error::NonIntegerWinding(wind));
    }

    let sp = Spectral::new(m);
    let kappa = sp.conjugate_kernel();
    let phi: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();

    let residual = |theta: &[f64]| -> Residual {
        let (x, dx): (Vec<Complex64>, Vec<Complex64>) = theta.iter().map(|&t| contour_point(t, p)).unzip();
        let u: Vec<f64> = x.iter().map(|v| (v - center).norm().ln()).collect();
        let ku = sp.conjugate(&u);
        let f: Vec<f64> = (0..m)
            .map(|j| table.eval(theta[j], x[j]) - phi[j] - ku[j] + ku[0])
            .collect();
        let norm = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Residual { f, x, dx, norm }
    };

    let mut theta = phi.clone();
    let mut r = residual(&theta);
    let mut iterations = 0;
    while r.norm >= MAP_TOL {
        if iterations == MAX_NEWTON {
            return Err(Error::NoConvergence {
                iterations,
                residual: r.norm,
            });
        }
        iterations += 1;
        let q: Vec<Complex64> = (0..m).map(|j| r.dx[j] / (r.x[j] - center)).collect();
        let step = newton_step(&sp, &kappa, &q, &r.f).ok_or(Error::Singular(iterations))?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = (0..m).map(|j| theta[j] - t * step[j]).collect();
            let next = residual(&trial);
            if next.norm < r.norm || t < 1e-4 {
                if next.norm >= r.norm {
                    // No descent left: accept only if already at rounding level.
                    if r.norm < 1e3 * MAP_TOL {
                        break;
                    }
                    return Err(Error::NoConvergence {
                        iterations,
                        residual: r.norm,
                    });
                }
                theta = trial;
                r = next;
                break;
            }
            t *= 0.5;
        }
        if t < 1e-4 && r.norm < 1e3 * MAP_TOL {
            break;
        }
    }

    if theta.windows(2).any(|w| w[1] <= w[0]) || theta[m - 1] >= 2.0 * PI {
        return Err(Error::UnderResolved(format!(
            "boundary correspondence not monotone at M = {m}"
        )));
    }

    let x = r.x;
    let y: Vec<Complex64> = x.iter().map(|v| v.conj()).collect();
    let g: Vec<f64> = x.iter().map(|v| v.norm()).collect();
    let mut kernel_residual = 0.0f64;
    for j in 0..m {
        let res = kernel_eval(x[j], y[j], p).z.norm();
        if res > KERNEL_TOL {
            return Err(Error::KernelIdentity { node: j, residual: res });
        }
        kernel_residual = kernel_residual.max(res);
    }
    let x_coef = sp.coefficients(&x);
    Ok(CircleGrid {
        m,
        center,
        theta,
        g,
        x,
        y,
        x_coef,
        big_g: Vec::new(),
        big_s: Vec::new(),
        gamma_plus: Vec::new(),
        iterations,
        map_residual: r.norm,
        kernel_residual,
    })
}
