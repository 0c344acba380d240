//! Two-user slotted ALOHA network with negative and triggering signals.
//!
//! Each user keeps an infinite buffer. In a slot a nonempty user either
//! raises a signal (which deletes its head packet or moves it to the other
//! queue) or attempts a transmission that succeeds when the other user stays
//! quiet. The crate provides:
//!
//! * [`model`]: parameters and the Bernoulli arrival pgf,
//! * [`chain`]: the exact slot kernel, a simulator and a truncated-chain
//!   stationary solver,
//! * [`regions`]: stability and stable-throughput regions, drift
//!   classification and closures over transmission probabilities,
//! * [`meanvalue`]: symmetric mean-value relations and queue-length bounds,
//! * [`bvp`]: the symmetric Riemann boundary value problem solved on a grid,
//! * [`cli`]: the command-line front end.

pub mod bvp;
pub mod chain;
pub mod cli;
pub mod error;
pub mod meanvalue;
pub mod model;
pub mod regions;

pub use error::{Error, Result};
pub use model::{ModelParams, SymmetricParams};
