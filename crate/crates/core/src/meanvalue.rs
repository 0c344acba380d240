//! Mean-value relations of the symmetric system, explicit queue-length
//! bounds, and flow-conservation residuals.

use serde::{Deserialize, Serialize};

use crate::chain::{SimStats, StationarySolution};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SymmetricParams};

/// Below this the denominator `s + s̄²αᾱ − λ − s·l⁺` is reported as near-singular.
pub const NEAR_SINGULAR: f64 = 1e-6;

/// Both symmetric stability conditions with their margins (lhs − rhs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricStability {
    pub stable: bool,
    pub margins: [f64; 2],
}

pub fn symmetric_stability(p: &SymmetricParams) -> SymmetricStability {
    let c = p.s + p.clean();
    let k = (p.lambda + p.s * p.l_plus) / c;
    let m1 = p.lambda + p.s * p.l_plus - c;
    let m2 = p.lambda + p.s * p.l_plus * k - ((p.s + p.s_bar() * p.alpha) * (1.0 - k) + k * c);
    SymmetricStability {
        stable: m1 < 0.0 && m2 < 0.0,
        margins: [m1, m2],
    }
}

/// Recurring coefficients, named after their role in the relations.
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    /// `s + s̄²αᾱ − λ − s·l⁺`
    d: f64,
    /// `s̄²αᾱ − s̄α − s·l⁺`
    b: f64,
    /// `2s̄²αᾱ − s̄α + s·l⁻`
    c: f64,
    /// Free term of the diagonal relation.
    e: f64,
    /// `λλ̄ + s·l⁺·(λ + s·l⁺)/(s + s̄²αᾱ)`
    t: f64,
    /// `s + s̄α + s·l⁺`
    f: f64,
}

fn coeffs(p: &SymmetricParams) -> Coeffs {
    let (lam, s, cl) = (p.lambda, p.s, p.clean());
    let (sp, sm) = (s * p.l_plus, s * p.l_minus);
    let sa = p.s_bar() * p.alpha;
    let d = s + cl - lam - sp;
    Coeffs {
        d,
        b: cl - sa - sp,
        c: 2.0 * cl - sa + sm,
        e: 4.0 * lam * (1.0 - sm - cl) + lam * lam - 2.0 * sm - 2.0 * cl + (4.0 * lam + 2.0) * d,
        t: lam * p.lambda_bar() + sp * (lam + sp) / (s + cl),
        f: s + sa + sp,
    }
}

/// Explicit bounds on the mean queue length of either user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueBounds {
    pub l_low: f64,
    pub l_up: f64,
    pub s_term: f64,
    pub w0: f64,
    pub w1: f64,
    pub gap: f64,
    pub stable: bool,
    /// The shared denominator is below [`NEAR_SINGULAR`].
    pub near_singular: bool,
}

/// `(W0, W1)` of the boundary-derivative relation.
pub fn w_coefficients(p: &SymmetricParams) -> (f64, f64) {
    let (lam, s, cl) = (p.lambda, p.s, p.clean());
    let (sp, sm) = (s * p.l_plus, s * p.l_minus);
    let sa = p.s_bar() * p.alpha;
    let den = (sm + cl) * (sm + cl);
    let w1 = (lam * (2.0 * cl - sa - sm) + sp * (cl + sm - p.s_bar() * (s + sa))) / den;
    let w0 = (lam * (sa - cl) - sp * (sm + cl) - p.s_bar() * (s + sa)) / den;
    (w0, w1)
}

pub fn queue_bounds(p: &SymmetricParams) -> Result<MeanValueBounds> {
    p.validate()?;
    let st = symmetric_stability(p);
    if !st.stable {
        return Err(Error::Unstable(format!("symmetric stability margins {:?}", st.margins)));
    }
    let k = coeffs(p);
    let scale = -k.b / (2.0 * k.f * k.d);
    let s_term = scale * (k.e - 2.0 * k.c * k.t / k.b);
    let sm = p.s * p.l_minus;
    let gap = sm * sm * scale;
    let (w0, w1) = w_coefficients(p);
    Ok(MeanValueBounds {
        l_low: s_term,
        l_up: s_term + gap,
        s_term,
        w0,
        w1,
        gap,
        stable: true,
        near_singular: k.d < NEAR_SINGULAR,
    })
}

/// Boundary quantities of the symmetric stationary distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiEstimates {
    pub pi00: f64,
    /// `Π(1,0) = Π(0,1)`.
    pub pi10: f64,
    /// `Π₁(1,0) = E[Q1; Q2 = 0]`.
    pub pi1_10: f64,
    pub p_both_busy: f64,
}

impl PiEstimates {
    /// Symmetrised boundary quantities of an oracle solution.
    pub fn from_solution(sol: &StationarySolution) -> Self {
        let pi10 = 0.5 * (sol.pi10() + sol.pi01());
        PiEstimates {
            pi00: sol.pi00(),
            pi10,
            pi1_10: sol.pi1_10(),
            p_both_busy: sol.stats.p_both_busy,
        }
    }

    pub fn validate(&self) -> Result<Self> {
        let ok = 0.0 <= self.pi00 && self.pi00 <= self.pi10 && self.pi10 <= 1.0 && self.pi1_10 >= 0.0;
        if !ok {
            return Err(Error::Domain(format!("inconsistent boundary probabilities {self:?}")));
        }
        Ok(*self)
    }
}

/// Mean queue length computed from boundary quantities along three routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LRoutes {
    /// Derivative of the functional equation at `y = 1`, with `W0`, `W1`.
    pub boundary_derivative: f64,
    /// The relation built on the transfer balance.
    pub transfer_balance: f64,
    /// Derivative along the diagonal `x = y`, using `p_both_busy`.
    pub diagonal: f64,
}

pub fn l_from_pi(pi: &PiEstimates, p: &SymmetricParams) -> LRoutes {
    let k = coeffs(p);
    let (w0, w1) = w_coefficients(p);
    let sm = p.s * p.l_minus;
    LRoutes {
        boundary_derivative: k.b / (sm + p.clean()) * pi.pi1_10 + w1 * pi.pi10 + w0 * pi.pi00,
        transfer_balance: (k.t + pi.pi1_10 * k.b) / k.d,
        diagonal: (k.e + 2.0 * pi.pi1_10 * k.c + sm * sm * pi.p_both_busy) / (4.0 * k.d),
    }
}

/// Signed residuals of the flow relations, each with a standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowResiduals {
    /// Packet balance of queue 1 and queue 2.
    pub conservation: [f64; 2],
    /// Relation between `Π(1,0)` and `Π(0,0)`; symmetric systems only.
    pub pi00_relation: Option<f64>,
    /// Balance of triggered transfers; symmetric systems only.
    pub transfer_balance: Option<f64>,
    /// Conservative standard errors in the same order, `Σ|coef|·SE`.
    pub se: [f64; 4],
}

impl FlowResiduals {
    pub fn values(&self) -> [f64; 4] {
        [
            self.conservation[0],
            self.conservation[1],
            self.pi00_relation.unwrap_or(0.0),
            self.transfer_balance.unwrap_or(0.0),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Substitutes `Π(1,0) = P(Q2 = 0)`, `Π(0,1) = P(Q1 = 0)` and `Π(0,0)`
/// into the flow relations.
pub fn flow_residuals(stats: &SimStats, p: &ModelParams) -> FlowResiduals {
    let (p10, p01, p00) = (stats.p_empty2, stats.p_empty1, stats.p_both_empty);
    let (e10, e01, e00) = (stats.se_p_empty2, stats.se_p_empty1, stats.se_p_both_empty);
    let (a, b) = (p.user(1), p.user(2));
    let bb = 1.0 - p10 - p01 + p00;
    let quiet = a.s_bar() * b.s_bar();

    let c1 = a.s + quiet * a.alpha * b.alpha_bar();
    let d1 = a.s + a.s_bar() * a.alpha;
    let r1 = a.lambda + b.s * b.l_plus * (1.0 - p10) - (c1 * bb + d1 * (p10 - p00));
    let se1 = (-b.s * b.l_plus + c1 - d1).abs() * e10 + c1.abs() * e01 + (d1 - c1).abs() * e00;

    let c2 = b.s + quiet * b.alpha * a.alpha_bar();
    let d2 = b.s + b.s_bar() * b.alpha;
    let r2 = b.lambda + a.s * a.l_plus * (1.0 - p01) - (c2 * bb + d2 * (p01 - p00));
    let se2 = (-a.s * a.l_plus + c2 - d2).abs() * e01 + c2.abs() * e10 + (d2 - c2).abs() * e00;

    let mut out = FlowResiduals {
        conservation: [r1, r2],
        pi00_relation: None,
        transfer_balance: None,
        se: [se1, se2, 0.0, 0.0],
    };
    if let Some(q) = p.symmetric() {
        let cl = q.clean();
        let (sp, sm) = (q.s * q.l_plus, q.s * q.l_minus);
        let sa = q.s_bar() * q.alpha;
        let ca = sa - 2.0 * cl - sm;
        let cb = cl - sa;
        out.pi00_relation = Some(p10 * ca + p00 * cb - (q.lambda + sp - (q.s + cl)));
        out.se[2] = ca.abs() * e10 + cb.abs() * e00;

        let k = (q.lambda + sp) / (q.s + cl);
        let ss = q.s * q.s_bar() * q.l_plus;
        out.transfer_balance = Some(sp * k - (ss * bb + sp * (p10 - p00)));
        out.se[3] = (sp - ss).abs() * (e10 + e00) + ss * e01;
    }
    out
}
