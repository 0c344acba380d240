//! C interface to `ragnet`.
//!
//! Every function returns a [`RagnetStatus`]. On failure the message is kept
//! per thread and can be read with [`ragnet_last_error`]. Handles are owned by
//! the caller and released with the matching `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ragnet::bvp::{solve_adaptive, solve_riemann, BvpSolution};
use ragnet::chain::{simulate, truncated_stationary, OracleConfig, SimConfig};
use ragnet::meanvalue::queue_bounds;
use ragnet::regions::{region_verdict, Which};
use ragnet::{Error, ModelParams, SymmetricParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RagnetStatus {
    Ok = 0,
    NullPointer = 1,
    /// Parameters outside their domain.
    Domain = 2,
    /// The system is not stable at the requested point.
    Unstable = 3,
    /// The truncated chain did not capture enough mass.
    Truncation = 4,
    /// The boundary value problem is degenerate or under-resolved.
    Degenerate = 5,
    /// Any other numerical failure.
    Numerical = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RagnetRegion {
    Stability = 0,
    Throughput = 1,
}

/// Opaque model parameters.
pub struct RagnetModel(ModelParams);

/// Opaque solution of the symmetric boundary value problem.
pub struct RagnetBvp(BvpSolution);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RagnetBounds {
    pub l_low: f64,
    pub l_up: f64,
    pub gap: f64,
    pub near_singular: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RagnetSimStats {
    pub mean_q1: f64,
    pub mean_q2: f64,
    pub p_empty1: f64,
    pub p_empty2: f64,
    pub throughput1: f64,
    pub throughput2: f64,
    pub diverged: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RagnetOracle {
    pub n: usize,
    pub tail_mass: f64,
    pub pi00: f64,
    pub mean_q1: f64,
    pub mean_q2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RagnetStatus {
    match e {
        Error::Domain(_) => RagnetStatus::Domain,
        Error::Unstable(_) | Error::SaturatedCompanion { .. } => RagnetStatus::Unstable,
        Error::TruncationInsufficient { .. } => RagnetStatus::Truncation,
        Error::Degenerate(_) | Error::UnderResolved(_) => RagnetStatus::Degenerate,
        _ => RagnetStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> RagnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RagnetStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            RagnetStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(format!("{} is null", stringify!($p)));
            return RagnetStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ragnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn ragnet_model_new(
    lambda1: f64,
    lambda2: f64,
    alpha1: f64,
    alpha2: f64,
    s1: f64,
    s2: f64,
    l1_plus: f64,
    l2_plus: f64,
    out: *mut *mut RagnetModel,
) -> RagnetStatus {
    non_null!(out);
    *out = ptr::null_mut();
    guard(|| {
        let p = ModelParams {
            lambda1,
            lambda2,
            alpha1,
            alpha2,
            s1,
            s2,
            l1_minus: 1.0 - l1_plus,
            l1_plus,
            l2_minus: 1.0 - l2_plus,
            l2_plus,
        }
        .validate()?;
        *out = Box::into_raw(Box::new(RagnetModel(p)));
        Ok(())
    })
}

/// Both users share `lambda`, `alpha`, `s` and `l_plus`.
#[no_mangle]
pub unsafe extern "C" fn ragnet_model_symmetric(
    lambda: f64,
    alpha: f64,
    s: f64,
    l_plus: f64,
    out: *mut *mut RagnetModel,
) -> RagnetStatus {
    ragnet_model_new(lambda, lambda, alpha, alpha, s, s, l_plus, l_plus, out)
}

#[no_mangle]
pub unsafe extern "C" fn ragnet_model_free(model: *mut RagnetModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Writes 1 to `member` when `(lambda1, lambda2)` lies strictly inside the
/// region for the model's other parameters, else 0.
#[no_mangle]
pub unsafe extern "C" fn ragnet_region_member(
    model: *const RagnetModel,
    region: RagnetRegion,
    lambda1: f64,
    lambda2: f64,
    member: *mut i32,
) -> RagnetStatus {
    non_null!(model, member);
    let p = (*model).0;
    guard(|| {
        if !(0.0..=1.0).contains(&lambda1) || !(0.0..=1.0).contains(&lambda2) {
            return Err(Error::Domain("arrival rate out of [0,1]".into()));
        }
        let which = match region {
            RagnetRegion::Stability => Which::Stability,
            RagnetRegion::Throughput => Which::Throughput,
        };
        *member = region_verdict(lambda1, lambda2, &p, which).member as i32;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ragnet_simulate(
    model: *const RagnetModel,
    slots: u64,
    burn_in: u64,
    seed: u64,
    out: *mut RagnetSimStats,
) -> RagnetStatus {
    non_null!(model, out);
    let p = (*model).0;
    guard(|| {
        if burn_in >= slots {
            return Err(Error::Domain("burn-in must be shorter than the run".into()));
        }
        let s = simulate(&p, &SimConfig::new(slots, burn_in, seed));
        *out = RagnetSimStats {
            mean_q1: s.mean_q1,
            mean_q2: s.mean_q2,
            p_empty1: s.p_empty1,
            p_empty2: s.p_empty2,
            throughput1: s.throughput1,
            throughput2: s.throughput2,
            diverged: s.diverged,
        };
        Ok(())
    })
}

/// Stationary law of the chain truncated at up to `n_max` packets per queue.
/// Pass 0 for `n_max` or `tail_tol` to use the defaults.
#[no_mangle]
pub unsafe extern "C" fn ragnet_oracle(
    model: *const RagnetModel,
    n_max: usize,
    tail_tol: f64,
    out: *mut RagnetOracle,
) -> RagnetStatus {
    non_null!(model, out);
    let p = (*model).0;
    guard(|| {
        let mut cfg = OracleConfig::default();
        if n_max > 0 {
            cfg.n_max = n_max;
            cfg.n0 = cfg.n0.min(n_max);
        }
        if tail_tol > 0.0 {
            cfg.tail_tol = tail_tol;
        }
        let o = truncated_stationary(&p, &cfg)?;
        *out = RagnetOracle {
            n: o.n,
            tail_mass: o.tail_mass,
            pi00: o.pi00(),
            mean_q1: o.stats.mean_q1,
            mean_q2: o.stats.mean_q2,
        };
        Ok(())
    })
}

/// Bounds on the mean queue length of a symmetric model.
#[no_mangle]
pub unsafe extern "C" fn ragnet_queue_bounds(
    lambda: f64,
    alpha: f64,
    s: f64,
    l_plus: f64,
    out: *mut RagnetBounds,
) -> RagnetStatus {
    non_null!(out);
    guard(|| {
        let b = queue_bounds(&SymmetricParams::new(lambda, alpha, s, l_plus))?;
        *out = RagnetBounds {
            l_low: b.l_low,
            l_up: b.l_up,
            gap: b.gap,
            near_singular: b.near_singular,
        };
        Ok(())
    })
}

/// Solves the symmetric boundary value problem on `m` nodes, a power of two.
/// With `adaptive` nonzero the grid is doubled until successive solutions agree.
#[no_mangle]
pub unsafe extern "C" fn ragnet_bvp_solve(
    lambda: f64,
    alpha: f64,
    s: f64,
    l_plus: f64,
    m: usize,
    adaptive: i32,
    out: *mut *mut RagnetBvp,
) -> RagnetStatus {
    non_null!(out);
    *out = ptr::null_mut();
    guard(|| {
        let p = SymmetricParams::new(lambda, alpha, s, l_plus).validate()?;
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::Domain("M must be a power of two, at least 8".into()));
        }
        let sol = if adaptive != 0 { solve_adaptive(&p, m, 1 << 16, 1e-7)? } else { solve_riemann(&p, m)? };
        *out = Box::into_raw(Box::new(RagnetBvp(sol)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ragnet_bvp_free(sol: *mut RagnetBvp) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Probability that both queues are empty.
#[no_mangle]
pub unsafe extern "C" fn ragnet_bvp_pi00(sol: *const RagnetBvp) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.pi00)
}

/// Probability that user 1 is busy and user 2 is empty.
#[no_mangle]
pub unsafe extern "C" fn ragnet_bvp_pi10(sol: *const RagnetBvp) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.pi10)
}

/// Mean queue length of either user.
#[no_mangle]
pub unsafe extern "C" fn ragnet_bvp_mean(sol: *const RagnetBvp) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.0.l_exact)
}

/// Number of nodes the solution was computed on.
#[no_mangle]
pub unsafe extern "C" fn ragnet_bvp_nodes(sol: *const RagnetBvp) -> usize {
    sol.as_ref().map_or(0, |s| s.0.m)
}
