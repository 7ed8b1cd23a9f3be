//! Solution operators for the half-line problem.
//!
//! The linear boundary value problem on a window `[0, T0]` is solved by
//! boundary forcing: `φ` is extended to the box, evolved freely, and a source
//! `2π δ_0(x) h(t)` is added with `h` chosen so that the trace at `x = 0`
//! equals `f`. Since the forcing term has trace `C_A Γ(2/3) I_{2/3}(h)`, this
//! means `h = I_{-2/3}(f - S(t)φ̃(0)) / (C_A Γ(2/3))`.
//!
//! The inhomogeneous problem with zero data subtracts from the Duhamel term
//! the homogeneous solution matching its trace. The nonlinear problem is the
//! fixed point of `u = HS(φ, f) + IHS(-u^k u_x)`, found by Picard iteration
//! window by window.

mod config;
mod nonlinear;
mod operators;
mod scaling;

pub use config::{regularity_threshold, BoundaryProblem, SolverConfig};
pub use nonlinear::{solve_nonlinear, RunReport};
pub use operators::{boundary_residual, select_forcing, solve_linear_homogeneous, solve_linear_inhomogeneous};
pub use scaling::rescale_problem;

#[cfg(test)]
mod tests;
