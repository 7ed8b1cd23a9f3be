//! Numerical solver for the generalized Korteweg–de Vries equation
//!
//! ```text
//! u_t + u_xxx + u^k u_x = 0,   x > 0, t > 0,
//! u(x, 0) = phi(x),   u(0, t) = f(t),
//! ```
//!
//! posed on the right half-line. The boundary condition is enforced by a
//! boundary-forcing construction: the problem is replaced by a whole-line
//! problem with a point source `delta_0(x) g(t)` at the origin, and the
//! source strength `g` is obtained by inverting a Riemann–Liouville
//! fractional integral of order 2/3. The nonlinear problem is solved by
//! Picard iteration on the resulting Duhamel integral equation, chained
//! over short time windows.
//!
//! Module map:
//!
//! - [`discrete`]: grids, sampled and spectral representations, Sobolev
//!   norms, half-line extension and smooth cutoffs.
//! - [`fractional`]: Riemann–Liouville integrals and derivatives, Gamma.
//! - [`airy`]: the Airy kernel `A` with `Â(ξ) = e^{iξ³}` and `C_A = A(0)`.
//! - [`linear`]: free group, boundary-forcing term and inhomogeneous Duhamel
//!   term.
//! - [`solver`]: forcing selection, homogeneous and inhomogeneous solution
//!   operators, the nonlinear Picard solver and the scaling map.
//! - [`diagnostics`]: PDE residuals, mass and energy identities, convergence
//!   orders.
//! - [`scenarios`]: exact solutions and canonical test problems.
//! - [`verify`]: the quantitative check suites behind `halfline-kdv verify`.
//! - [`cli`]: manifest parsing and the `solve` / `verify` / `plotdata`
//!   commands.

pub mod airy;
pub mod cli;
pub mod diagnostics;
pub mod discrete;
mod error;
pub mod fractional;
pub mod linear;
pub mod scenarios;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
