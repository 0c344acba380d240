//! Boundary value problem for the symmetric system: kernel zeros,
//! conformal maps, Riemann problem and exact mean queue length.
//!
//! Supported when `s·l⁻ > 0`; otherwise the kernel contour passes through
//! the origin and the map normalisation used here breaks down.

pub mod cauchy;
pub mod conformal;
mod gmres;
pub mod kernel;
pub mod riemann;

pub use conformal::{solve_theodorsen, CircleGrid};
pub use kernel::{contour_g, kernel_eval, kernel_root_g, KernelValues};
pub use riemann::{boundary_functions, compute_index, solve_adaptive, solve_riemann, BvpSolution};
