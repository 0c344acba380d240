//! The queue-length Markov chain: exact kernel, simulator and oracle.

pub mod kernel;
pub mod sim;
pub mod stationary;
pub mod stats;

pub use kernel::{
    apply_arrivals, step_kernel, step_kernel_with, KernelVariant, QueueState, SlotDistribution, SlotEvent,
    SlotOutcome,
};
pub use sim::{simulate, simulate_dominant, simulate_replications, SimConfig};
pub use stationary::{solve_at, truncated_stationary, Method, OracleConfig, StationarySolution};
pub use stats::SimStats;
