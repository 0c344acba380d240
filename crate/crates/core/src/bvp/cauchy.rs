//! Cauchy integrals over the unit circle on an equispaced grid.
//!
//! Boundary values are split spectrally: modes `0..M/2` form the part
//! analytic inside the circle, modes `M/2..M` the part analytic outside.
//! Quadrature versions of the same integrals are kept for cross-checks.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// FFT plans and node set for one grid size.
#[derive(Clone)]
pub struct Spectral {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Spectral({})", self.m)
    }
}

impl Spectral {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Nodes `exp(2πij/M)`.
    pub fn nodes(&self) -> Vec<Complex64> {
        (0..self.m)
            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.m as f64))
            .collect()
    }

    /// Fourier coefficients `f = Σ c_k z^k`, negative modes stored at the top.
    pub fn coefficients(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.fwd.process(&mut buf);
        let s = 1.0 / self.m as f64;
        buf.iter_mut().for_each(|v| *v *= s);
        buf
    }

    /// Node values of a coefficient vector.
    pub fn synthesize(&self, coef: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coef.to_vec();
        self.inv.process(&mut buf);
        buf
    }

    /// Values of the interior part `Σ_{k≥0} c_k z^k` on the nodes.
    pub fn plus(&self, coef: &[Complex64]) -> Vec<Complex64> {
        let half = self.m / 2;
        let masked: Vec<Complex64> = coef
            .iter()
            .enumerate()
            .map(|(k, &c)| if k < half { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        self.synthesize(&masked)
    }

    /// Values of the exterior part `−Σ_{k<0} c_k z^k` on the nodes.
    pub fn minus(&self, coef: &[Complex64]) -> Vec<Complex64> {
        let half = self.m / 2;
        let masked: Vec<Complex64> = coef
            .iter()
            .enumerate()
            .map(|(k, &c)| if k >= half { -c } else { Complex64::new(0.0, 0.0) })
            .collect();
        self.synthesize(&masked)
    }

    /// Harmonic conjugate of real periodic data, multiplier `−i·sign(k)`.
    pub fn conjugate(&self, u: &[f64]) -> Vec<f64> {
        let half = self.m / 2;
        let cu: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut c = self.coefficients(&cu);
        for (k, v) in c.iter_mut().enumerate() {
            *v *= if k == 0 || k == half {
                Complex64::new(0.0, 0.0)
            } else if k < half {
                Complex64::new(0.0, -1.0)
            } else {
                Complex64::new(0.0, 1.0)
            };
        }
        self.synthesize(&c).iter().map(|v| v.re).collect()
    }

    /// First column of the circulant matrix of [`Spectral::conjugate`].
    pub fn conjugate_kernel(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.m];
        e[0] = 1.0;
        self.conjugate(&e)
    }
}

/// Interior series `Σ_{k<M/2} c_k z^k`.
pub fn eval_inside(coef: &[Complex64], z: Complex64) -> Complex64 {
    let half = coef.len() / 2;
    coef[..half].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Exterior series `−Σ_{0<k<M/2} c_{−k} z^{−k}`.
pub fn eval_outside(coef: &[Complex64], z: Complex64) -> Complex64 {
    let m = coef.len();
    let w = z.inv();
    let s = (1..m / 2).rev().fold(Complex64::new(0.0, 0.0), |acc, k| (acc + coef[m - k]) * w);
    -s
}

/// Derivative of the interior series.
pub fn eval_inside_derivative(coef: &[Complex64], z: Complex64) -> Complex64 {
    let half = coef.len() / 2;
    (1..half).rev().fold(Complex64::new(0.0, 0.0), |acc, k| acc * z + coef[k] * k as f64)
}

/// Cauchy integral `(1/2πi)∮ f(τ)/(τ − z) dτ` by the trapezoidal rule, for
/// `z` off the circle.
pub fn cauchy_trapezoid(f: &[Complex64], nodes: &[Complex64], z: Complex64) -> Complex64 {
    let m = f.len() as f64;
    f.iter().zip(nodes).map(|(&fk, &t)| fk * t / (t - z)).sum::<Complex64>() / m
}

/// Interior boundary value at node `j` by Sokhotski–Plemelj: half residue
/// plus the principal value, with node `j` excluded and the first-order
/// exclusion error restored from a central difference.
pub fn plemelj_plus(f: &[Complex64], nodes: &[Complex64], j: usize) -> Complex64 {
    let m = f.len();
    let zj = nodes[j];
    let pv: Complex64 = (0..m)
        .filter(|&k| k != j)
        .map(|k| f[k] * nodes[k] / (nodes[k] - zj))
        .sum::<Complex64>()
        / m as f64;
    let h = 2.0 * PI / m as f64;
    let df_dphi = (f[(j + 1) % m] - f[(j + m - 1) % m]) / (2.0 * h);
    // z f'(z) = −i df/dφ on the circle
    let zdf = Complex64::new(0.0, -1.0) * df_dphi;
    0.5 * f[j] + pv + (zdf + 0.5 * f[j]) / m as f64
}
