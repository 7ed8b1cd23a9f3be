use serde::{Deserialize, Serialize};

use crate::discrete::{DomainTag, Grid1D, SampledFunction};
use crate::linear::{PlanOptions, PropagatorPlan, Sponge};
use crate::{Error, Result};

/// Parameters of a half-line solve.
///
/// The box `[-L, L)` carries `n_x` nodes; the half-line data live on the box
/// nodes in `[0, x_max]`. Time runs over `[0, t_final]` with `n_t` nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Power of the nonlinearity `u^k u_x`.
    pub k: u32,
    /// Regularity index of the data.
    pub s: f64,
    pub t_final: f64,
    /// Half-width `L` of the periodic box.
    pub half_width: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub n_t: usize,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Upper bound for the window length.
    pub window_t0: f64,
    pub compat_tol: f64,
    /// Window length heuristic `c / (1 + data_norm)^p`.
    pub window_constant: f64,
    pub window_power: f64,
    /// Window halvings allowed after a failed Picard iteration.
    pub max_retries: usize,
    /// Coefficient of `u^k u_x`; zero gives the linear problem.
    pub nonlinearity: f64,
    pub sponge_width: f64,
    pub sponge_strength: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            k: 1,
            s: 0.0,
            t_final: 1.0,
            half_width: 40.0,
            x_max: 24.0,
            n_x: 2048,
            n_t: 2049,
            picard_tol: 1e-10,
            picard_max_iter: 30,
            window_t0: 0.25,
            compat_tol: 1e-8,
            window_constant: 1.0,
            window_power: 4.0,
            max_retries: 4,
            nonlinearity: 1.0,
            sponge_width: 12.0,
            sponge_strength: 1000.0,
        }
    }
}

/// Lowest regularity covered by the local theory for power `k`.
pub fn regularity_threshold(k: u32) -> f64 {
    match k {
        1 => 0.0,
        2 => 0.25,
        3 => 1.0 / 12.0,
        _ => 0.5 - 2.0 / k as f64,
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidArgument(msg)
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(invalid("nonlinearity power k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.s) {
            return Err(invalid(format!("regularity s = {} outside [0, 1]", self.s)));
        }
        if (self.s - 0.5).abs() < 1e-12 {
            return Err(invalid("regularity s = 1/2 is excluded".into()));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("final time {} must be positive", self.t_final)));
        }
        if !(self.window_t0 > 0.0 && self.window_t0 <= self.t_final) {
            return Err(invalid(format!(
                "window length {} must lie in (0, t_final = {}]",
                self.window_t0, self.t_final
            )));
        }
        if !(self.picard_tol > 0.0) || self.picard_max_iter == 0 {
            return Err(invalid("Picard tolerance and iteration cap must be positive".into()));
        }
        if self.n_x < 16 || self.n_x % 2 != 0 {
            return Err(invalid(format!("n_x = {} must be even and at least 16", self.n_x)));
        }
        if self.n_t < 5 {
            return Err(invalid(format!("n_t = {} must be at least 5", self.n_t)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(invalid(format!("box half-width {} must be positive", self.half_width)));
        }
        if !(self.sponge_width >= 0.0 && self.sponge_strength >= 0.0) {
            return Err(invalid("sponge width and strength must be non-negative".into()));
        }
        if !(self.x_max > 0.0 && self.x_max + self.sponge_width < self.half_width) {
            return Err(invalid(format!(
                "x_max = {} must be positive and clear of the sponge (x_max + sponge_width < L = {})",
                self.x_max, self.half_width
            )));
        }
        if 0.5 * self.x_max + self.sponge_width >= self.half_width {
            return Err(invalid("the extension to x < 0 overlaps the sponge".into()));
        }
        if !(self.compat_tol >= 0.0) || !self.nonlinearity.is_finite() {
            return Err(invalid("compat_tol must be non-negative and the nonlinearity finite".into()));
        }
        if !(self.window_constant > 0.0 && self.window_power >= 0.0) {
            return Err(invalid("window heuristic constants must be positive".into()));
        }
        if self.halfline_nodes() < 4 {
            return Err(invalid("x_max spans fewer than four grid cells".into()));
        }
        Ok(())
    }

    pub fn box_grid(&self) -> Result<Grid1D> {
        Grid1D::periodic_box(self.half_width, self.n_x)
    }

    fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_x as f64
    }

    fn halfline_nodes(&self) -> usize {
        (self.x_max / self.dx() + 1e-9).floor() as usize + 1
    }

    /// Box nodes in `[0, x_max]`.
    pub fn halfline_grid(&self) -> Result<Grid1D> {
        Grid1D::with_spacing(0.0, self.dx(), self.halfline_nodes())
    }

    pub fn time_step(&self) -> f64 {
        self.t_final / (self.n_t - 1) as f64
    }

    pub fn time_grid(&self) -> Result<Grid1D> {
        Grid1D::time(self.time_step(), self.n_t)
    }

    pub fn plan(&self) -> Result<PropagatorPlan> {
        let sponge = (self.sponge_width > 0.0 && self.sponge_strength > 0.0).then_some(Sponge {
            width: self.sponge_width,
            strength: self.sponge_strength,
        });
        PropagatorPlan::with_options(self.box_grid()?, PlanOptions { sponge, ..Default::default() })
    }

    /// Number of time steps in a window of length `t0`.
    pub fn window_steps(&self, t0: f64) -> Result<usize> {
        let steps = (t0 / self.time_step()).round() as usize;
        if steps < 4 {
            return Err(invalid(format!(
                "window length {t0} covers fewer than 4 time steps of {}",
                self.time_step()
            )));
        }
        Ok(steps)
    }

    /// Warnings for parameters outside the range of the local theory.
    pub fn warnings(&self) -> Vec<String> {
        let threshold = regularity_threshold(self.k);
        if self.s < threshold {
            vec![format!(
                "s = {} is below {threshold} for k = {}; local well-posedness is not covered",
                self.s, self.k
            )]
        } else {
            Vec::new()
        }
    }
}

/// Initial data `φ` on `[0, x_max]` and boundary data `f` on `[0, t_final]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryProblem {
    pub phi: SampledFunction,
    pub f: SampledFunction,
    pub config: SolverConfig,
}

impl BoundaryProblem {
    pub fn new(phi: SampledFunction, f: SampledFunction, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        if phi.grid() != &config.halfline_grid()? {
            return Err(Error::GridMismatch(format!(
                "initial data on {:?}, expected {:?}",
                phi.grid(),
                config.halfline_grid()?
            )));
        }
        if f.grid() != &config.time_grid()? {
            return Err(Error::GridMismatch(format!(
                "boundary data on {:?}, expected {:?}",
                f.grid(),
                config.time_grid()?
            )));
        }
        let problem = Self { phi, f, config };
        problem.check_compatibility()?;
        Ok(problem)
    }

    /// Samples `φ` and `f` on the grids of `config`.
    pub fn from_fns(config: SolverConfig, phi: impl Fn(f64) -> f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        config.validate()?;
        let phi = SampledFunction::from_real_fn(config.halfline_grid()?, DomainTag::Space, phi)?;
        let f = SampledFunction::from_real_fn(config.time_grid()?, DomainTag::Time, f)?;
        Self::new(phi, f, config)
    }

    /// `|φ(0) - f(0)|` and the tolerance it is held to.
    pub fn compatibility_gap(&self) -> (f64, f64) {
        let gap = (self.phi.values()[0] - self.f.values()[0]).norm();
        (gap, self.config.compat_tol * (1.0 + self.phi.max_abs()))
    }

    /// The corner condition `φ(0) = f(0)`.
    ///
    /// It is needed for `s > 1/2`; the forcing construction here also needs
    /// it below, since the boundary residual must vanish at `t = 0`.
    pub fn check_compatibility(&self) -> Result<()> {
        let (mismatch, tolerance) = self.compatibility_gap();
        if mismatch > tolerance {
            return Err(Error::Compatibility { mismatch, tolerance });
        }
        Ok(())
    }
}
