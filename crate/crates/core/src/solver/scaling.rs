use crate::discrete::{DomainTag, SampledFunction};
use crate::{Error, Result};

use super::BoundaryProblem;

/// The problem for `u_λ(x, t) = λ² u(λx, λ³t)` when `k = 1`:
/// `φ_λ(x) = λ² φ(λx)`, `f_λ(t) = λ² f(λ³t)`.
///
/// Node counts are kept and all lengths divided by `λ` (times by `λ³`), so
/// the rescaled samples are exact multiples of the original ones.
pub fn rescale_problem(problem: &BoundaryProblem, lambda: f64) -> Result<BoundaryProblem> {
    let c = &problem.config;
    if c.k != 1 {
        return Err(Error::InvalidArgument(format!(
            "the scaling map is only defined here for k = 1, got k = {}",
            c.k
        )));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!("scaling factor {lambda} outside (0, 1]")));
    }
    let l3 = lambda.powi(3);
    let mut config = c.clone();
    config.half_width /= lambda;
    config.x_max /= lambda;
    config.sponge_width /= lambda;
    config.t_final /= l3;
    config.window_t0 /= l3;
    config.window_constant /= l3;
    config.sponge_strength *= l3;
    let a = lambda * lambda;
    let phi = SampledFunction::new(
        config.halfline_grid()?,
        problem.phi.values().iter().map(|v| v * a).collect(),
        DomainTag::Space,
    )?;
    let f = SampledFunction::new(
        config.time_grid()?,
        problem.f.values().iter().map(|v| v * a).collect(),
        DomainTag::Time,
    )?;
    BoundaryProblem::new(phi, f, config)
}
