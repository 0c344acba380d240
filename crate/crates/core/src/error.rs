use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0}")]
    Domain(String),
    #[error("saturated companion queue: internal load {load:.6} >= removal probability {removal:.6}")]
    SaturatedCompanion { load: f64, removal: f64 },
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("unstable: {0}")]
    Unstable(String),
    #[error("truncation insufficient: tail mass {tail_mass:.3e} at N = {n}")]
    TruncationInsufficient { n: usize, tail_mass: f64 },
    #[error("singular linear system at step {0}")]
    Singular(usize),
    #[error("branch ambiguity at theta = {theta:.6}: roots {a:.12} and {b:.12}")]
    BranchAmbiguity { theta: f64, a: f64, b: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("kernel identity violated at node {node} (residual {residual:.3e})")]
    KernelIdentity { node: usize, residual: f64 },
    #[error("pole on contour at node {0}")]
    PoleOnContour(usize),
    #[error("non-integer winding {0:.9}")]
    NonIntegerWinding(f64),
    #[error("index {0} != 1")]
    Index(i64),
    #[error("x=1 not on S1")]
    NotOnContour,
    #[error("degenerate contour: {0}")]
    Degenerate(String),
    #[error("under-resolved: {0}")]
    UnderResolved(String),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
