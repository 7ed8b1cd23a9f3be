use num_complex::Complex64;

use super::{cutoff_value, DomainTag, Grid1D, SampledFunction};
use crate::{Error, Result};

/// Half-width of the left continuation used by [`extend_halfline`] for data
/// on `[0, x_max]` placed on `target`: `min(x_max / 3, L / 2)` where `L` is
/// the extent of `target` to the left of the origin.
pub fn extension_width(x_max: f64, target: &Grid1D) -> f64 {
    (x_max / 3.0).min(-0.5 * target.start())
}

/// Extends `phi`, sampled on `[0, X]`, to the whole of `target`.
///
/// On `x >= 0` the samples are copied (and zero beyond `X`); on `x < 0` the
/// reflection `6 phi(-x) - 8 phi(-2x) + 3 phi(-3x)` is used, multiplied by a
/// smooth cutoff supported in `[-X/3, 0]`. The reflection matches the value
/// and the first two derivatives at the origin. It is bounded on `H^s` for
/// `s < 5/2`, but only `s <= 1` is accepted here.
pub fn extend_halfline(phi: &SampledFunction, s: f64, target: &Grid1D) -> Result<SampledFunction> {
    if !(s <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "the two-term reflection extension is only bounded for s <= 1, got {s}"
        )));
    }
    let src = phi.grid();
    if src.start().abs() > 1e-9 * src.spacing() {
        return Err(Error::InvalidArgument(format!(
            "half-line data must start at x = 0, starts at {}",
            src.start()
        )));
    }
    if !src.same_spacing(target) {
        return Err(Error::GridMismatch(format!(
            "extension target spacing {} differs from data spacing {}",
            target.spacing(),
            src.spacing()
        )));
    }
    let origin = target
        .index_of(0.0)
        .ok_or_else(|| Error::GridMismatch("target grid has no node at x = 0".into()))?;
    let n = src.len();
    if origin + n > target.len() {
        return Err(Error::InvalidArgument(format!(
            "target grid ends at {} and does not contain [0, {}]",
            target.end(),
            src.end()
        )));
    }
    if origin == 0 {
        return Err(Error::InvalidArgument("target grid has no nodes left of the origin".into()));
    }
    let width = extension_width(src.end(), target);
    let data = phi.values();
    let zero = Complex64::new(0.0, 0.0);
    let values = (0..target.len())
        .map(|i| {
            if i >= origin {
                data.get(i - origin).copied().unwrap_or(zero)
            } else {
                let m = origin - i;
                let y = m as f64 * src.spacing();
                let chi = cutoff_value(y, 0.5 * width, width);
                if chi == 0.0 {
                    return zero;
                }
                let near = data.get(m).copied().unwrap_or(zero);
                let far = data.get(2 * m).copied().unwrap_or(zero);
                let farther = data.get(3 * m).copied().unwrap_or(zero);
                (near * 6.0 - far * 8.0 + farther * 3.0) * chi
            }
        })
        .collect();
    SampledFunction::new(*target, values, DomainTag::Space)
}
