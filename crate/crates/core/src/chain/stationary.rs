//! Stationary distribution of the chain truncated to `{0..N}²`.
//!
//! Arrivals that would push a queue past `N` are clamped to `N`; the
//! stationary probability of taking such a clamped step is reported as
//! `tail_mass`. The default solver is state reduction (GTH) on the banded
//! transition matrix, which is exact up to rounding and avoids the slow
//! mixing of power iteration near the stability boundary.

use serde::{Deserialize, Serialize};

use super::kernel::{KernelTable, KernelVariant, StateClass};
use super::stats::SimStats;
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
pub const DEFAULT_N0: usize = 32;
pub const DEFAULT_N_MAX: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Banded state reduction.
    Gth,
    /// Power iteration to an l1 residual below `tol`.
    Power { tol: f64, max_iter: usize },
}

/// Oracle controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// First truncation level.
    pub n0: usize,
    /// Largest truncation level tried before giving up.
    pub n_max: usize,
    pub tail_tol: f64,
    pub method: Method,
    pub variant: KernelVariant,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n0: DEFAULT_N0,
            n_max: DEFAULT_N_MAX,
            tail_tol: DEFAULT_TAIL_TOL,
            method: Method::Gth,
            variant: KernelVariant::Explicit,
        }
    }
}

/// Stationary law of the truncated chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationarySolution {
    pub n: usize,
    /// Row-major over `q1`, `(N+1)²` entries.
    pub distribution: Vec<f64>,
    pub tail_mass: f64,
    pub stats: SimStats,
}

impl StationarySolution {
    pub fn pi(&self, q1: usize, q2: usize) -> f64 {
        self.distribution[q1 * (self.n + 1) + q2]
    }

    /// `Π(0,0)`.
    pub fn pi00(&self) -> f64 {
        self.pi(0, 0)
    }

    /// `Π(1,0) = P(Q2 = 0)`.
    pub fn pi10(&self) -> f64 {
        (0..=self.n).map(|i| self.pi(i, 0)).sum()
    }

    /// `Π(0,1) = P(Q1 = 0)`.
    pub fn pi01(&self) -> f64 {
        (0..=self.n).map(|j| self.pi(0, j)).sum()
    }

    /// `Π₁(1,0) = E[Q1; Q2 = 0]`.
    pub fn pi1_10(&self) -> f64 {
        (0..=self.n).map(|i| i as f64 * self.pi(i, 0)).sum()
    }
}

/// Solves at a fixed truncation level.
pub fn solve_at(p: &ModelParams, n: usize, method: Method, variant: KernelVariant) -> Result<StationarySolution> {
    if n < 2 {
        return Err(Error::Domain("N must be at least 2".into()));
    }
    let t = Transitions::new(p, variant);
    let dist = match method {
        Method::Gth => gth(&t, n)?,
        Method::Power { tol, max_iter } => power(&t, n, tol, max_iter)?,
    };
    Ok(summarize(&t, n, dist))
}

/// Solves with automatic doubling of `N` until the tail mass is small.
pub fn truncated_stationary(p: &ModelParams, cfg: &OracleConfig) -> Result<StationarySolution> {
    let mut n = cfg.n0.max(2);
    loop {
        let sol = solve_at(p, n, cfg.method, cfg.variant)?;
        if sol.tail_mass <= cfg.tail_tol {
            return Ok(sol);
        }
        if n * 2 > cfg.n_max {
            return Err(Error::TruncationInsufficient {
                n,
                tail_mass: sol.tail_mass,
            });
        }
        n *= 2;
    }
}

/// Post-arrival jumps of each state class, merged by displacement.
struct Transitions {
    /// `(dq1, dq2, prob)` per class.
    jumps: [Vec<(i64, i64, f64)>; 4],
    /// Event rates per class: success1, success2, drop1, drop2, t12, t21.
    rates: [[f64; 6]; 4],
}

impl Transitions {
    fn new(p: &ModelParams, variant: KernelVariant) -> Self {
        let table = KernelTable::new(p, variant);
        let arrivals = [
            (0, 0, (1.0 - p.lambda1) * (1.0 - p.lambda2)),
            (1, 0, p.lambda1 * (1.0 - p.lambda2)),
            (0, 1, (1.0 - p.lambda1) * p.lambda2),
            (1, 1, p.lambda1 * p.lambda2),
        ];
        let mut jumps: [Vec<(i64, i64, f64)>; 4] = Default::default();
        let mut rates = [[0.0; 6]; 4];
        for (ci, class) in StateClass::ALL.iter().enumerate() {
            for o in table.outcomes(*class) {
                let c = o.event.counts();
                let r = &mut rates[ci];
                r[0] += o.prob * c.success[0] as f64;
                r[1] += o.prob * c.success[1] as f64;
                r[2] += o.prob * c.drop[0] as f64;
                r[3] += o.prob * c.drop[1] as f64;
                r[4] += o.prob * c.transfer_1to2 as f64;
                r[5] += o.prob * c.transfer_2to1 as f64;
                for &(a1, a2, pa) in &arrivals {
                    let pr = o.prob * pa;
                    if pr == 0.0 {
                        continue;
                    }
                    let d = (o.delta1 as i64 + a1, o.delta2 as i64 + a2);
                    match jumps[ci].iter_mut().find(|j| (j.0, j.1) == d) {
                        Some(j) => j.2 += pr,
                        None => jumps[ci].push((d.0, d.1, pr)),
                    }
                }
            }
        }
        Transitions { jumps, rates }
    }

    fn class_index(i: usize, j: usize) -> usize {
        match (i > 0, j > 0) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (true, true) => 3,
        }
    }

    /// Calls `f(target_i, target_j, prob, clamped)` for every jump out of `(i,j)`.
    fn for_each(&self, n: usize, i: usize, j: usize, mut f: impl FnMut(usize, usize, f64, bool)) {
        for &(d1, d2, pr) in &self.jumps[Self::class_index(i, j)] {
            let ti = i as i64 + d1;
            let tj = j as i64 + d2;
            let clamped = ti > n as i64 || tj > n as i64;
            f(ti.min(n as i64) as usize, tj.min(n as i64) as usize, pr, clamped);
        }
    }
}

/// Banded row storage: row `r` keeps columns `r-lo ..= r+hi`.
struct Band {
    lo: usize,
    hi: usize,
    width: usize,
    a: Vec<f64>,
}

impl Band {
    fn new(n_states: usize, lo: usize, hi: usize) -> Self {
        let width = lo + hi + 1;
        Band {
            lo,
            hi,
            width,
            a: vec![0.0; n_states * width],
        }
    }
    #[inline]
    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + (c + self.lo - r)
    }
}

fn gth(t: &Transitions, n: usize) -> Result<Vec<f64>> {
    let side = n + 1;
    let states = side * side;
    // a jump changes q1 by at most (-1..=2) and q2 by (-1..=2)
    let lo = side + 1;
    let hi = 2 * side + 2;
    let mut b = Band::new(states, lo, hi);
    for i in 0..side {
        for j in 0..side {
            let r = i * side + j;
            t.for_each(n, i, j, |ti, tj, pr, _| {
                let c = ti * side + tj;
                if c != r {
                    let k = b.at(r, c);
                    b.a[k] += pr;
                }
            });
        }
    }

    for k in (1..states).rev() {
        let left = k.saturating_sub(b.lo);
        let row_k = b.at(k, left);
        let s: f64 = b.a[row_k..row_k + (k - left)].iter().sum();
        if !(s > 0.0) {
            return Err(Error::Singular(k));
        }
        let top = k.saturating_sub(b.hi);
        for i in top..k {
            let ik = b.at(i, k);
            let v = b.a[ik];
            if v == 0.0 {
                continue;
            }
            let f = v / s;
            b.a[ik] = f;
            let dst = b.at(i, left);
            let (src_start, len) = (row_k, k - left);
            // rows i and k are disjoint slices of the band
            let (head, tail) = b.a.split_at_mut(src_start);
            let dst_slice = &mut head[dst..dst + len];
            let src_slice = &tail[..len];
            for (d, s) in dst_slice.iter_mut().zip(src_slice) {
                *d += f * s;
            }
        }
    }

    let mut pi = vec![0.0; states];
    pi[0] = 1.0;
    for k in 1..states {
        let top = k.saturating_sub(b.hi);
        let mut acc = 0.0;
        for (i, &p) in pi.iter().enumerate().take(k).skip(top) {
            acc += p * b.a[b.at(i, k)];
        }
        pi[k] = acc;
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

fn power(t: &Transitions, n: usize, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let side = n + 1;
    let states = side * side;
    let mut pi = vec![0.0; states];
    pi[0] = 1.0;
    let mut next = vec![0.0; states];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        next.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..side {
            for j in 0..side {
                let m = pi[i * side + j];
                if m == 0.0 {
                    continue;
                }
                t.for_each(n, i, j, |ti, tj, pr, _| next[ti * side + tj] += m * pr);
            }
        }
        residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if residual < tol {
            let total: f64 = pi.iter().sum();
            pi.iter_mut().for_each(|v| *v /= total);
            return Ok(pi);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

fn summarize(t: &Transitions, n: usize, pi: Vec<f64>) -> StationarySolution {
    let side = n + 1;
    let mut v = [0.0; 12];
    let mut tail = 0.0;
    for i in 0..side {
        for j in 0..side {
            let m = pi[i * side + j];
            if m == 0.0 {
                continue;
            }
            v[0] += i as f64 * m;
            v[1] += j as f64 * m;
            if i == 0 {
                v[2] += m;
            }
            if j == 0 {
                v[3] += m;
            }
            if i == 0 && j == 0 {
                v[4] += m;
            }
            if i > 0 && j > 0 {
                v[5] += m;
            }
            let r = &t.rates[Transitions::class_index(i, j)];
            for k in 0..6 {
                v[6 + k] += m * r[k];
            }
            t.for_each(n, i, j, |_, _, pr, clamped| {
                if clamped {
                    tail += m * pr;
                }
            });
        }
    }
    StationarySolution {
        n,
        distribution: pi,
        tail_mass: tail,
        stats: SimStats::from_arrays(v, [0.0; 12], 0, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SymmetricParams;

    #[test]
    fn empty_system_is_point_mass() {
        let p = SymmetricParams::new(0.0, 0.5, 0.2, 0.5).embed();
        let s = solve_at(&p, 8, Method::Gth, KernelVariant::Explicit).unwrap();
        assert!((s.pi00() - 1.0).abs() < 1e-15);
        assert_eq!(s.tail_mass, 0.0);
    }

    #[test]
    fn gth_matches_power_iteration() {
        let p = SymmetricParams::new(0.1, 0.5, 0.2, 0.5).embed();
        let a = solve_at(&p, 24, Method::Gth, KernelVariant::Explicit).unwrap();
        let b = solve_at(
            &p,
            24,
            Method::Power {
                tol: 1e-14,
                max_iter: 1_000_000,
            },
            KernelVariant::Explicit,
        )
        .unwrap();
        let d: f64 = a.distribution.iter().zip(&b.distribution).map(|(x, y)| (x - y).abs()).sum();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn symmetric_distribution() {
        let p = SymmetricParams::new(0.12, 0.45, 0.3, 0.3).embed();
        let s = truncated_stationary(&p, &OracleConfig::default()).unwrap();
        assert!(s.tail_mass < 1e-8);
        let total: f64 = s.distribution.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for i in 0..=s.n {
            for j in 0..i {
                assert!((s.pi(i, j) - s.pi(j, i)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn single_queue_geometric_check() {
        // user 2 idle: queue 1 is a discrete M/M/1 with p=λ(1-μ), q=μ(1-λ)
        let p = ModelParams {
            lambda1: 0.2,
            lambda2: 0.0,
            alpha1: 0.5,
            alpha2: 0.5,
            s1: 0.0,
            s2: 0.0,
            l1_minus: 1.0,
            l1_plus: 0.0,
            l2_minus: 1.0,
            l2_plus: 0.0,
        };
        let s = truncated_stationary(&p, &OracleConfig::default()).unwrap();
        let (lam, mu) = (0.2, 0.5);
        let rho = lam * (1.0 - mu) / (mu * (1.0 - lam));
        // P(Q=0) = 1 - λ/μ for the early-departure late-arrival queue
        assert!((s.stats.p_empty1 - (1.0 - lam / mu)).abs() < 1e-12);
        assert!((s.pi(2, 0) / s.pi(1, 0) - rho).abs() < 1e-12);
        assert!((s.stats.throughput1 - lam).abs() < 1e-12);
    }

    #[test]
    fn truncation_error_reported() {
        let p = SymmetricParams::new(0.24, 0.5, 0.0, 0.5).embed();
        let cfg = OracleConfig {
            n_max: 16,
            n0: 8,
            ..OracleConfig::default()
        };
        assert!(matches!(
            truncated_stationary(&p, &cfg),
            Err(Error::TruncationInsufficient { n: 16, .. })
        ));
    }
}
