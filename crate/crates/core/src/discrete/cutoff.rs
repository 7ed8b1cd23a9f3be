use super::{DomainTag, Grid1D, SampledFunction};
use crate::{Error, Result};

fn flat(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

/// Smooth step falling from 1 at `r <= 0` to 0 at `r >= 1`, built from the
/// bump `e^{-1/u}`; all derivatives vanish at both ends.
fn step(r: f64) -> f64 {
    if r <= 0.0 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let a = flat(1.0 - r);
        a / (a + flat(r))
    }
}

/// Even cutoff: 1 on `[-plateau, plateau]`, 0 outside `(-support, support)`.
pub fn cutoff_value(x: f64, plateau: f64, support: f64) -> f64 {
    let ax = x.abs();
    if ax <= plateau {
        1.0
    } else if ax >= support {
        0.0
    } else {
        step((ax - plateau) / (support - plateau))
    }
}

/// One-sided taper: 1 for `x <= from`, 0 for `x >= to`.
pub fn taper_value(x: f64, from: f64, to: f64) -> f64 {
    if x <= from {
        1.0
    } else if x >= to {
        0.0
    } else {
        step((x - from) / (to - from))
    }
}

/// Samples of the even cutoff with plateau half-width `plateau` and support
/// half-width `support` on `grid`.
pub fn smooth_cutoff(plateau: f64, support: f64, grid: Grid1D, tag: DomainTag) -> Result<SampledFunction> {
    if !(plateau > 0.0) || !(plateau < support) || !support.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "cutoff needs 0 < plateau < support, got plateau {plateau}, support {support}"
        )));
    }
    SampledFunction::from_real_fn(grid, tag, |x| cutoff_value(x, plateau, support))
}
