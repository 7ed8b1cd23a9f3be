use crate::airy::constant_ca;
use crate::discrete::{extend_halfline, smooth_cutoff, DomainTag, Grid1D, SampledFunction, SpaceTimeField};
use crate::fractional::{gamma_function, invert_riemann_liouville};
use crate::linear::{boundary_forcing, duhamel_inhomogeneous, evolved_trace, group_field, PropagatorPlan};
use crate::{Complex64, Error, Result};

use super::{BoundaryProblem, SolverConfig};

/// `h = I_{-2/3}(r) / (C_A Γ(2/3))` for a boundary residual `r` with
/// `r(0) = 0`, computed as the exact inverse of the discrete `I_{2/3}` so
/// that the forcing trace reproduces `r` node by node.
pub(crate) fn forcing_density(residual: &SampledFunction) -> Result<SampledFunction> {
    if residual.max_abs() == 0.0 {
        return Ok(SampledFunction::zeros(*residual.grid(), DomainTag::Time));
    }
    let scale = 1.0 / (constant_ca() * gamma_function(2.0 / 3.0)?);
    Ok(invert_riemann_liouville(residual, 2.0 / 3.0)?.scale(scale))
}

/// `f` on `tgrid`, held at its last value past the end of its samples.
pub(crate) fn boundary_samples(f: &SampledFunction, offset: usize, tgrid: &Grid1D) -> Result<SampledFunction> {
    let values = f.values();
    let last = values.len() - 1;
    let samples = (0..tgrid.len()).map(|n| values[(offset + n).min(last)]).collect();
    SampledFunction::new(*tgrid, samples, DomainTag::Time)
}

/// Zeroes the first sample of the boundary residual after checking it
/// against the corner tolerance.
fn clear_corner(mut residual: Vec<Complex64>, tolerance: f64) -> Result<Vec<Complex64>> {
    let mismatch = residual[0].norm();
    if mismatch > tolerance {
        return Err(Error::Compatibility { mismatch, tolerance });
    }
    residual[0] = Complex64::new(0.0, 0.0);
    Ok(residual)
}

/// Linear solution operators on one time window `[0, T0]` of the box.
pub(crate) struct Window<'a> {
    pub plan: &'a PropagatorPlan,
    pub config: &'a SolverConfig,
    pub tgrid: Grid1D,
    pub halfline: Grid1D,
    pub origin: usize,
}

impl<'a> Window<'a> {
    pub fn new(plan: &'a PropagatorPlan, config: &'a SolverConfig, tgrid: Grid1D) -> Result<Self> {
        let origin = plan
            .grid()
            .index_of(0.0)
            .ok_or_else(|| Error::InvalidGrid("box grid has no node at x = 0".into()))?;
        Ok(Self {
            plan,
            config,
            tgrid,
            halfline: config.halfline_grid()?,
            origin,
        })
    }

    pub fn extend(&self, phi: &SampledFunction) -> Result<SampledFunction> {
        extend_halfline(phi, self.config.s.min(1.0), self.plan.grid())
    }

    /// Free evolution of `φ̃` plus the forcing term that corrects its trace
    /// to `f` on the window; returns the field and the forcing density.
    pub fn homogeneous(&self, phi: Option<&SampledFunction>, f: &SampledFunction) -> Result<(SpaceTimeField, SampledFunction)> {
        let (free, alpha) = match phi {
            Some(phi) if phi.max_abs() > 0.0 => {
                let free = group_field(self.plan, phi, &self.tgrid)?;
                let alpha = free.column(self.origin);
                (Some(free), alpha)
            }
            _ => (None, vec![Complex64::new(0.0, 0.0); self.tgrid.len()]),
        };
        let residual: Vec<Complex64> = f.values()[..self.tgrid.len()].iter().zip(&alpha).map(|(f, a)| f - a).collect();
        let scale = phi.map_or(0.0, |p| p.max_abs());
        let residual = clear_corner(residual, self.config.compat_tol * (1.0 + scale))?;
        let residual = SampledFunction::new(self.tgrid, residual, DomainTag::Time)?;
        let h = forcing_density(&residual)?;
        let mut field = if h.max_abs() > 0.0 {
            boundary_forcing(self.plan, &h, &self.tgrid)?
        } else {
            SpaceTimeField::zeros(*self.plan.grid(), self.tgrid)
        };
        if let Some(free) = free {
            field = field.axpby(1.0, &free, 1.0)?;
        }
        Ok((field, h))
    }

    /// Duhamel term of `source` with its boundary trace removed.
    pub fn inhomogeneous(&self, source: &SpaceTimeField) -> Result<SpaceTimeField> {
        if source.max_abs() == 0.0 {
            return Ok(SpaceTimeField::zeros(*self.plan.grid(), self.tgrid));
        }
        let w1 = duhamel_inhomogeneous(self.plan, source, &self.tgrid)?;
        let trace = SampledFunction::new(self.tgrid, w1.column(self.origin), DomainTag::Time)?;
        let (w2, _) = self.homogeneous(None, &trace)?;
        w1.axpby(1.0, &w2, -1.0)
    }
}

/// Forcing density for the window `[0, T0]` on the grid `[0, 2 T0]`.
///
/// With `α = S(t)φ̃(0)`, the boundary residual is `f̃₁ = Ψ₁ (f - α)` and
/// `h = Ψ₃ I_{-2/3}(f̃₁) / (C_A Γ(2/3))`, with `I_{-2/3}` the exact inverse of
/// the discrete `I_{2/3}` the time integrator realises. `Ψ₁` has plateau `T0` and
/// support `4T0/3`, and `Ψ₃` plateau `5T0/3` and support `2T0`. `T0` is
/// rounded to a whole number of time steps.
pub fn select_forcing(problem: &BoundaryProblem, t0: f64) -> Result<SampledFunction> {
    let config = &problem.config;
    config.validate()?;
    problem.check_compatibility()?;
    let steps = config.window_steps(t0)?;
    let dt = config.time_step();
    let t0 = steps as f64 * dt;
    let tgrid = Grid1D::time(dt, 2 * steps + 1)?;
    let plan = config.plan()?;
    let window = Window::new(&plan, config, tgrid)?;
    let phi = window.extend(&problem.phi)?;
    let alpha = evolved_trace(&plan, &phi, &tgrid)?;
    let f = boundary_samples(&problem.f, 0, &tgrid)?;
    let psi1 = smooth_cutoff(t0, 4.0 * t0 / 3.0, tgrid, DomainTag::Time)?;
    let psi3 = smooth_cutoff(5.0 * t0 / 3.0, 2.0 * t0, tgrid, DomainTag::Time)?;
    let residual = f.sub(&alpha)?.mul(&psi1)?;
    let residual = clear_corner(residual.into_values(), config.compat_tol * (1.0 + problem.phi.max_abs()))?;
    let h = forcing_density(&SampledFunction::new(tgrid, residual, DomainTag::Time)?)?;
    h.mul(&psi3)
}

/// The boundary residual `f̃₁ = Ψ₁ (f - S(t)φ̃(0))` on `[0, 2T0]` that
/// [`select_forcing`] inverts.
pub fn boundary_residual(problem: &BoundaryProblem, t0: f64) -> Result<SampledFunction> {
    let config = &problem.config;
    let steps = config.window_steps(t0)?;
    let dt = config.time_step();
    let t0 = steps as f64 * dt;
    let tgrid = Grid1D::time(dt, 2 * steps + 1)?;
    let plan = config.plan()?;
    let window = Window::new(&plan, config, tgrid)?;
    let alpha = evolved_trace(&plan, &window.extend(&problem.phi)?, &tgrid)?;
    let psi1 = smooth_cutoff(t0, 4.0 * t0 / 3.0, tgrid, DomainTag::Time)?;
    boundary_samples(&problem.f, 0, &tgrid)?.sub(&alpha)?.mul(&psi1)
}

/// Solution of the linear problem with data `(φ, f)` on `[0, T0]`, on the
/// whole box.
pub fn solve_linear_homogeneous(problem: &BoundaryProblem, t0: f64) -> Result<SpaceTimeField> {
    let config = &problem.config;
    config.validate()?;
    problem.check_compatibility()?;
    let steps = config.window_steps(t0)?;
    let tgrid = Grid1D::time(config.time_step(), steps + 1)?;
    let plan = config.plan()?;
    let window = Window::new(&plan, config, tgrid)?;
    let phi = window.extend(&problem.phi)?;
    let f = boundary_samples(&problem.f, 0, &tgrid)?;
    Ok(window.homogeneous(Some(&phi), &f)?.0)
}

/// Solution of `w_t + w_xxx = h̃` on `x > 0` with zero initial and boundary
/// data, on `[0, T0]` of the source's time grid.
pub fn solve_linear_inhomogeneous(source: &SpaceTimeField, t0: f64, config: &SolverConfig) -> Result<SpaceTimeField> {
    config.validate()?;
    let plan = config.plan()?;
    if source.xgrid() != plan.grid() {
        return Err(Error::GridMismatch("source is not on the configured box grid".into()));
    }
    let tg = source.tgrid();
    if tg.start().abs() > 1e-9 * tg.spacing() {
        return Err(Error::InvalidArgument("source time grid must start at t = 0".into()));
    }
    let steps = (t0 / tg.spacing()).round() as usize;
    if steps < 4 || steps >= tg.len() {
        return Err(Error::InvalidArgument(format!(
            "window of {steps} steps does not fit the source's {} time nodes",
            tg.len()
        )));
    }
    let tgrid = tg.prefix(steps + 1)?;
    let rows: Vec<Vec<Complex64>> = (0..=steps).map(|n| source.row(n).to_vec()).collect();
    let source = SpaceTimeField::from_rows(*plan.grid(), tgrid, rows)?;
    Window::new(&plan, config, tgrid)?.inhomogeneous(&source)
}
