//! Discrete substrate shared by every other module: uniform grids, sampled
//! and spectral representations, discrete Sobolev norms, the half-line
//! extension operator and smooth cutoffs.
//!
//! Fourier convention: `f̂(ξ) = (1/2π) ∫ e^{-ixξ} f(x) dx`, so that
//! `f(x) = ∫ e^{ixξ} f̂(ξ) dξ`. On a periodic box of half-width `L` the
//! wavenumbers are `ξ_j = π j / L` and the discrete pair is
//!
//! ```text
//! c_j = (Δx / 2π) Σ_k f_k e^{-i x_k ξ_j},     f_k = Σ_j c_j e^{i x_k ξ_j} Δξ.
//! ```

mod cutoff;
mod extension;
mod field;
mod grid;
mod norms;
mod spectral;

pub use cutoff::{cutoff_value, smooth_cutoff, taper_value};
pub use extension::{extend_halfline, extension_width};
pub use field::{DomainTag, SampledFunction, SpaceTimeField};
pub use grid::Grid1D;
pub use norms::{l2_norm, sobolev_norm};
pub(crate) use spectral::signed_index;
pub use spectral::{forward_transform, inverse_transform, SpectralField, Transformer};
