//! Kernel of the symmetric functional equation and its zeros on the
//! circle `x = g·r`, `y = g/r`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SymmetricParams;

/// `φ1`, `φ2`, `φ3`, `H` and `Z = xy − φ3` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValues {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: Complex64,
    pub h: Complex64,
    pub z: Complex64,
}

pub fn kernel_eval(x: Complex64, y: Complex64, p: &SymmetricParams) -> KernelValues {
    let (lam, a, s) = (p.lambda, p.alpha, p.s);
    let (lm, lp) = (p.l_minus, p.l_plus);
    let (sb, ab) = (p.s_bar(), p.alpha_bar());
    let h = (1.0 - lam + lam * x) * (1.0 - lam + lam * y);
    let quiet = sb * sb * (x * y * (ab * ab + a * a) + a * ab * y + ab * a * x);
    let one = s * sb * y * (lm + lp * y) + s * sb * x * (lm + lp * x);
    let two = s * s * (lm * lm + lp * lm * y + lm * lp * x + lp * lp * x * y);
    let phi3 = h * (quiet + one + two);
    KernelValues {
        phi1: h * (sb * (ab * x + a) + s * (lm + lp * y)),
        phi2: h * (sb * (ab * y + a) + s * (lm + lp * x)),
        phi3,
        h,
        z: x * y - phi3,
    }
}

/// Coefficients (ascending) of `f(g) = g² − φ3(g·e^{iθ}, g·e^{−iθ})` and of
/// `∂f/∂θ`. `f` is real on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartic {
    pub f: [f64; 5],
    pub f_theta: [f64; 5],
}

impl Quartic {
    pub fn new(theta: f64, p: &SymmetricParams) -> Self {
        let (lam, a, s) = (p.lambda, p.alpha, p.s);
        let (lm, lp) = (p.l_minus, p.l_plus);
        let (sb, ab) = (p.s_bar(), p.alpha_bar());
        let (c, c2) = (2.0 * theta.cos(), 2.0 * (2.0 * theta).cos());
        let (dc, dc2) = (-2.0 * theta.sin(), -4.0 * (2.0 * theta).sin());
        let beta = sb * sb * a * ab + s * sb * lm + s * s * lp * lm;
        let h = [(1.0 - lam) * (1.0 - lam), lam * (1.0 - lam) * c, lam * lam];
        let dh = [0.0, lam * (1.0 - lam) * dc, 0.0];
        let b = [
            s * s * lm * lm,
            beta * c,
            sb * sb * (ab * ab + a * a) + s * sb * lp * c2 + s * s * lp * lp,
        ];
        let db = [0.0, beta * dc, s * sb * lp * dc2];
        let mut f = [0.0; 5];
        let mut f_theta = [0.0; 5];
        for i in 0..3 {
            for j in 0..3 {
                f[i + j] -= h[i] * b[j];
                f_theta[i + j] -= dh[i] * b[j] + h[i] * db[j];
            }
        }
        f[2] += 1.0;
        Quartic { f, f_theta }
    }

    pub fn eval(&self, g: f64) -> f64 {
        horner(&self.f, g)
    }

    pub fn eval_dg(&self, g: f64) -> f64 {
        let f = &self.f;
        f[1] + g * (2.0 * f[2] + g * (3.0 * f[3] + 4.0 * g * f[4]))
    }

    pub fn eval_dtheta(&self, g: f64) -> f64 {
        horner(&self.f_theta, g)
    }

    /// Root in `[0, 1]` by bisection on the sign change `f(0) ≤ 0 ≤ f(1)`,
    /// polished by Newton.
    pub fn unit_root(&self) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut g = 0.5 * (lo + hi);
        for _ in 0..3 {
            let d = self.eval_dg(g);
            if d.abs() > 1e-300 {
                let next = g - self.eval(g) / d;
                if (0.0..=1.0).contains(&next) {
                    g = next;
                }
            }
        }
        g
    }
}

fn horner(c: &[f64; 5], g: f64) -> f64 {
    c[0] + g * (c[1] + g * (c[2] + g * (c[3] + g * c[4])))
}

/// `g(θ)` on the kernel contour; 1 at `θ = 0`.
pub fn contour_g(theta: f64, p: &SymmetricParams) -> f64 {
    if (0.5 * theta).sin().abs() < 1e-15 {
        return 1.0;
    }
    Quartic::new(theta, p).unit_root()
}

/// `g(θ)` and `dg/dθ`.
pub fn contour_g_prime(theta: f64, p: &SymmetricParams) -> (f64, f64) {
    let q = Quartic::new(theta, p);
    let g = if (0.5 * theta).sin().abs() < 1e-15 { 1.0 } else { q.unit_root() };
    let fg = q.eval_dg(g);
    (g, -q.eval_dtheta(g) / fg)
}

/// Contour point `g(θ)·e^{iθ}` and its derivative in `θ`.
pub fn contour_point(theta: f64, p: &SymmetricParams) -> (Complex64, Complex64) {
    let (g, dg) = contour_g_prime(theta, p);
    let e = Complex64::from_polar(1.0, theta);
    (g * e, Complex64::new(dg, g) * e)
}

/// The root of `g² = φ3(g·r, g/r)` on the branch through `g(1) = 1`,
/// found among the eigenvalues of the companion matrix.
///
/// Where the contour passes through the origin the branch value is 0.
pub fn kernel_root_g(r: Complex64, p: &SymmetricParams) -> Result<f64> {
    if (r.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("|r| = {} is not 1", r.norm())));
    }
    let theta = r.arg();
    if (0.5 * theta).sin().abs() < 1e-15 {
        return Ok(1.0);
    }
    let q = Quartic::new(theta, p);
    let reference = q.unit_root();
    let roots = real_roots(&q.f);
    let cands: Vec<f64> = roots.into_iter().filter(|&g| g > 1e-12 && g <= 1.0 + 1e-12).collect();
    for (i, &a) in cands.iter().enumerate() {
        for &b in &cands[i + 1..] {
            if (a - b).abs() < 1e-10 {
                return Err(Error::BranchAmbiguity { theta, a, b });
            }
        }
    }
    let best = cands
        .into_iter()
        .min_by(|a, b| (a - reference).abs().total_cmp(&(b - reference).abs()));
    Ok(match best {
        Some(g) if (g - reference).abs() < 1e-6 => g.min(1.0),
        _ => reference,
    })
}

/// Real eigenvalues of the companion matrix of an ascending polynomial.
fn real_roots(c: &[f64; 5]) -> Vec<f64> {
    let deg = (0..5).rev().find(|&k| c[k] != 0.0).unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / c[deg];
    }
    m.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-9)
        .map(|z| z.re)
        .collect()
}
