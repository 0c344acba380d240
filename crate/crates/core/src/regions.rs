//! Stability and stable-throughput regions.
//!
//! Margins follow one convention throughout: left side minus right side of
//! a strict inequality, so a negative margin means the condition holds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Margins closer to zero than this put a point on the region boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Which user keeps transmitting dummy packets in the dominant system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dominant {
    R1,
    R2,
}

impl std::str::FromStr for Dominant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R1" | "r1" => Ok(Dominant::R1),
            "R2" | "r2" => Ok(Dominant::R2),
            _ => Err(Error::Domain(format!("unknown dominant system {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Stability,
    Throughput,
}

impl std::str::FromStr for Which {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stability" => Ok(Which::Stability),
            "throughput" => Ok(Which::Throughput),
            _ => Err(Error::Domain(format!("unknown region {s:?}"))),
        }
    }
}

/// Rates seen in a dominant system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantRates {
    /// Probability that a packet is delivered or relocated.
    pub mu1: f64,
    pub mu2: f64,
    /// Probability that a packet leaves the queue by any means.
    pub m1: f64,
    pub m2: f64,
    /// Arrivals caused by the other user's transfers.
    pub lambda1_int: f64,
    pub lambda2_int: f64,
    /// Probability that the non-dominant queue is empty.
    pub p_empty_other: f64,
}

/// Rates of the dominant system `d`.
pub fn dominant_rates(p: &ModelParams, d: Dominant) -> Result<DominantRates> {
    match d {
        Dominant::R1 => dominant_first(p),
        Dominant::R2 => {
            let r = dominant_first(&p.swapped())?;
            Ok(DominantRates {
                mu1: r.mu2,
                mu2: r.mu1,
                m1: r.m2,
                m2: r.m1,
                lambda1_int: r.lambda2_int,
                lambda2_int: r.lambda1_int,
                p_empty_other: r.p_empty_other,
            })
        }
    }
}

fn dominant_first(p: &ModelParams) -> Result<DominantRates> {
    let (a, b) = (p.user(1), p.user(2));
    let m2 = b.alpha * b.s_bar() * a.alpha_bar() * a.s_bar() + b.s;
    let load2 = b.lambda + a.s * a.l_plus;
    if load2 >= m2 {
        return Err(Error::SaturatedCompanion { load: load2, removal: m2 });
    }
    let p0 = 1.0 - load2 / m2;
    let m1 = a.alpha * a.s_bar() * (p0 + (1.0 - p0) * b.alpha_bar() * b.s_bar()) + a.s;
    Ok(DominantRates {
        mu1: m1 - a.s * a.l_minus,
        mu2: m2 - b.s * b.l_minus,
        m1,
        m2,
        lambda1_int: b.s * b.l_plus * (1.0 - p0),
        lambda2_int: a.s * a.l_plus,
        p_empty_other: p0,
    })
}

/// Sub-region through which a point is a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Via {
    R1,
    R2,
    Both,
    None,
}

impl std::fmt::Display for Via {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Via::R1 => "R1",
            Via::R2 => "R2",
            Via::Both => "both",
            Via::None => "none",
        })
    }
}

/// Membership result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub member: bool,
    pub via: Via,
    /// `[R1 queue 1, R1 queue 2, R2 queue 2, R2 queue 1]`.
    pub margins: [f64; 4],
    /// Within `BOUNDARY_TOL` of the region boundary; such points are not members.
    pub boundary: bool,
}

/// The two margins of the sub-region where user 1 is the dominant one.
fn first_margins(l1: f64, l2: f64, p: &ModelParams, which: Which) -> [f64; 2] {
    let (a, b) = (p.user(1), p.user(2));
    let (sb1, sb2) = (a.s_bar(), b.s_bar());
    let m2 = b.alpha * sb2 * a.alpha_bar() * sb1 + b.s;
    let frac = (l2 + a.s * a.l_plus) * (b.s * b.l_plus + a.alpha * sb1 * (1.0 - b.alpha_bar() * sb2)) / m2;
    let (rhs1, rhs2) = match which {
        Which::Stability => (a.alpha * sb1 + a.s, m2),
        Which::Throughput => (
            a.alpha * sb1 + a.s * a.l_plus,
            b.alpha * sb2 * a.alpha_bar() * sb1 + b.s * b.l_plus,
        ),
    };
    [l1 + frac - rhs1, l2 + a.s * a.l_plus - rhs2]
}

pub fn region_verdict(l1: f64, l2: f64, p: &ModelParams, which: Which) -> RegionVerdict {
    let r1 = first_margins(l1, l2, p, which);
    let r2 = first_margins(l2, l1, &p.swapped(), which);
    let margins = [r1[0], r1[1], r2[0], r2[1]];
    let inside = |m: &[f64; 2], t: f64| m.iter().all(|&v| v < t);
    let strict1 = inside(&r1, -BOUNDARY_TOL);
    let strict2 = inside(&r2, -BOUNDARY_TOL);
    let loose = inside(&r1, BOUNDARY_TOL) || inside(&r2, BOUNDARY_TOL);
    let boundary = loose && !(strict1 || strict2);
    let via = match (strict1, strict2) {
        (true, true) => Via::Both,
        (true, false) => Via::R1,
        (false, true) => Via::R2,
        (false, false) => Via::None,
    };
    RegionVerdict {
        member: strict1 || strict2,
        via,
        margins,
        boundary,
    }
}

/// Membership in the stability region `R = R1 ∪ R2`.
pub fn in_stability_region(l1: f64, l2: f64, p: &ModelParams) -> RegionVerdict {
    region_verdict(l1, l2, p, Which::Stability)
}

/// Membership in the stable-throughput region `T = T1 ∪ T2`.
pub fn in_throughput_region(l1: f64, l2: f64, p: &ModelParams) -> RegionVerdict {
    region_verdict(l1, l2, p, Which::Throughput)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recurrence {
    PositiveRecurrent,
    NullRecurrent,
    Transient,
}

impl std::fmt::Display for Recurrence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Recurrence::PositiveRecurrent => "positive-recurrent",
            Recurrence::NullRecurrent => "null-recurrent",
            Recurrence::Transient => "transient",
        })
    }
}

/// Mean one-step displacements of the chain seen as a random walk.
///
/// `mu3`, `nu3` are the interior means plus one; `mu1d`, `nu1d` belong to
/// the axis where queue 2 is empty and `mu2d`, `nu2d` to the axis where
/// queue 1 is empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftClassification {
    pub mu3: f64,
    pub nu3: f64,
    pub mu1d: f64,
    pub nu1d: f64,
    pub mu2d: f64,
    pub nu2d: f64,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub verdict: Recurrence,
}

fn by_sign(r: f64) -> Recurrence {
    if r < 0.0 {
        Recurrence::PositiveRecurrent
    } else if r == 0.0 {
        Recurrence::NullRecurrent
    } else {
        Recurrence::Transient
    }
}

pub fn classify_drift(l1: f64, l2: f64, p: &ModelParams) -> Result<DriftClassification> {
    let (a, b) = (p.user(1), p.user(2));
    let quiet = a.s_bar() * b.s_bar();
    let mu3 = l1 + b.s * b.l_plus + 1.0 - (a.s + quiet * a.alpha * b.alpha_bar());
    let nu3 = l2 + a.s * a.l_plus + 1.0 - (b.s + quiet * b.alpha * a.alpha_bar());
    let mu1d = l1 + a.s_bar() * a.alpha_bar();
    let nu1d = l2 + a.s * a.l_plus;
    let mu2d = l1 + b.s * b.l_plus;
    let nu2d = l2 + b.s_bar() * b.alpha_bar();
    // Time-averaged drift along each axis: the axis drift plus the interior
    // drift weighted by the time spent off the axis. Both interior drifts
    // are negative here, so the weight enters with a minus sign.
    let r1 = (nu3 != 1.0).then(|| mu1d - 1.0 - nu1d * (1.0 - mu3) / (1.0 - nu3));
    let r2 = (mu3 != 1.0).then(|| nu2d - 1.0 - mu2d * (1.0 - nu3) / (1.0 - mu3));

    let verdict = match (mu3 < 1.0, nu3 < 1.0) {
        (true, true) => {
            let (x, y) = (r1.unwrap(), r2.unwrap());
            if x < 0.0 && y < 0.0 {
                Recurrence::PositiveRecurrent
            } else if x > 0.0 || y > 0.0 {
                Recurrence::Transient
            } else {
                Recurrence::NullRecurrent
            }
        }
        (true, false) => by_sign(r2.unwrap()),
        (false, true) => by_sign(r1.unwrap()),
        (false, false) => {
            if mu3 == 1.0 && nu3 == 1.0 {
                return Err(Error::Indeterminate("zero interior drift".into()));
            }
            Recurrence::Transient
        }
    };
    Ok(DriftClassification {
        mu3,
        nu3,
        mu1d,
        nu1d,
        mu2d,
        nu2d,
        r1,
        r2,
        verdict,
    })
}

fn member(l1: f64, l2: f64, p: &ModelParams, which: Which) -> bool {
    region_verdict(l1, l2, p, which).member
}

/// Largest `t` in `[0, hi]` with `inside(t)`, assuming `inside` is
/// down-closed. Returns 0 when even `t = 0` fails.
fn bisect(hi: f64, inside: impl Fn(f64) -> bool) -> f64 {
    if !inside(0.0) {
        return 0.0;
    }
    if inside(hi) {
        return hi;
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary points `(λ1*, λ2)` for `λ2` evenly spaced up to the largest
/// admissible value, with `λ1*` found by bisection.
pub fn trace_boundary(p: &ModelParams, which: Which, resolution: usize) -> Result<Vec<(f64, f64)>> {
    if resolution < 2 {
        return Err(Error::Domain("resolution must be at least 2".into()));
    }
    if !member(0.0, 0.0, p, which) {
        return Ok(Vec::new());
    }
    let top = bisect(1.0, |l2| member(0.0, l2, p, which));
    Ok((0..resolution)
        .map(|k| {
            let l2 = top * k as f64 / (resolution - 1) as f64;
            (bisect(1.0, |l1| member(l1, l2, p, which)), l2)
        })
        .collect())
}

/// Interior transmission-probability grid `{1/(G+1), …, G/(G+1)}`.
pub fn alpha_grid(g: usize) -> Vec<f64> {
    (1..=g).map(|k| k as f64 / (g + 1) as f64).collect()
}

/// Arrival-rate grid `{0, 1/(L-1), …, 1}`.
pub fn lambda_grid(l: usize) -> Vec<f64> {
    (0..l).map(|k| k as f64 / (l - 1) as f64).collect()
}

/// Union of the regions over the transmission-probability grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureGrid {
    pub lambdas: Vec<f64>,
    /// `member[i * len + j]` for `(λ1, λ2) = (lambdas[i], lambdas[j])`.
    pub member: Vec<bool>,
}

impl ClosureGrid {
    pub fn at(&self, i: usize, j: usize) -> bool {
        self.member[i * self.lambdas.len() + j]
    }
}

/// Closure membership on an `L × L` arrival grid. `p`'s own transmission
/// probabilities are ignored.
pub fn region_closure(p: &ModelParams, which: Which, alpha_resolution: usize, lambda_resolution: usize) -> Result<ClosureGrid> {
    if alpha_resolution < 2 || lambda_resolution < 2 {
        return Err(Error::Domain("resolutions must be at least 2".into()));
    }
    let alphas = alpha_grid(alpha_resolution);
    let lambdas = lambda_grid(lambda_resolution);
    let l = lambdas.len();
    let member: Vec<bool> = (0..l * l)
        .into_par_iter()
        .map(|idx| {
            let (l1, l2) = (lambdas[idx / l], lambdas[idx % l]);
            alphas
                .iter()
                .any(|&a1| alphas.iter().any(|&a2| member(l1, l2, &p.with_alphas(a1, a2), which)))
        })
        .collect();
    Ok(ClosureGrid { lambdas, member })
}

/// Outer envelope of the fixed-α boundaries: for each `λ2` on `[0,1]`,
/// the largest boundary `λ1` over the transmission-probability grid.
pub fn closure_boundary(p: &ModelParams, which: Which, alpha_resolution: usize, lambda_resolution: usize) -> Result<Vec<(f64, f64)>> {
    if alpha_resolution < 2 || lambda_resolution < 2 {
        return Err(Error::Domain("resolutions must be at least 2".into()));
    }
    let alphas = alpha_grid(alpha_resolution);
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| alphas.iter().map(move |&b| (a, b))).collect();
    Ok(lambda_grid(lambda_resolution)
        .into_par_iter()
        .map(|l2| {
            let best = pairs
                .iter()
                .map(|&(a1, a2)| {
                    let q = p.with_alphas(a1, a2);
                    if member(0.0, l2, &q, which) {
                        bisect(1.0, |l1| member(l1, l2, &q, which))
                    } else {
                        f64::NAN
                    }
                })
                .fold(f64::NAN, f64::max);
            (best, l2)
        })
        .filter(|(b, _)| b.is_finite())
        .collect())
}
