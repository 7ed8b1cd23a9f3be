//! Named test problems: solitons with closed-form solutions, data whose
//! boundary values are the free trace, and the standard runs used by the
//! verification suites and the CLI.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{pde_residual, Patch};
use crate::discrete::{extend_halfline, DomainTag, Grid1D, SampledFunction, SpaceTimeField};
use crate::linear::evolved_trace;
use crate::solver::{BoundaryProblem, SolverConfig};
use crate::{Complex64, Error, Result};

/// Closed-form solutions of `u_t + u_xxx + u^k u_x = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactSolution {
    /// `3c sech²((√c/2)(x - ct - x0))`, for `k = 1`.
    SolitonK1 { c: f64, x0: f64 },
    /// `√(6c) sech(√c (x - ct - x0))`, for `k = 2`.
    SolitonK2 { c: f64, x0: f64 },
}

impl ExactSolution {
    pub fn k(&self) -> u32 {
        match self {
            Self::SolitonK1 { .. } => 1,
            Self::SolitonK2 { .. } => 2,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        match *self {
            Self::SolitonK1 { c, x0 } => 3.0 * c / (0.5 * c.sqrt() * (x - c * t - x0)).cosh().powi(2),
            Self::SolitonK2 { c, x0 } => (6.0 * c).sqrt() / (c.sqrt() * (x - c * t - x0)).cosh(),
        }
    }

    /// Samples on `xgrid × tgrid`.
    pub fn field(&self, xgrid: Grid1D, tgrid: Grid1D) -> Result<SpaceTimeField> {
        SpaceTimeField::from_fn(xgrid, tgrid, |x, t| Complex64::new(self.value(x, t), 0.0))
    }

    /// PDE residual of the profile on a fine grid around the crest.
    pub fn residual(&self) -> Result<f64> {
        let (c, x0) = match *self {
            Self::SolitonK1 { c, x0 } | Self::SolitonK2 { c, x0 } => (c, x0),
        };
        let width = 10.0 / c.sqrt();
        let xgrid = Grid1D::new(x0.max(0.0) + 0.5, x0.max(0.0) + 0.5 + 2.0 * width, 4001)?;
        let tgrid = Grid1D::new(0.0, 0.1, 201)?;
        let patch = Patch {
            x_min: xgrid.node(4),
            x_max: xgrid.node(xgrid.len() - 5),
            t_min: tgrid.node(3),
            t_max: tgrid.node(tgrid.len() - 4),
        };
        // shift so that the crest crosses the patch
        let shifted = match *self {
            Self::SolitonK1 { c, .. } => Self::SolitonK1 { c, x0: xgrid.node(2000) },
            Self::SolitonK2 { c, .. } => Self::SolitonK2 { c, x0: xgrid.node(2000) },
        };
        pde_residual(&shifted.field(xgrid, tgrid)?, Some(self.k()), &patch)
    }
}

/// Initial data on `[0, x_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    /// `amplitude · exp(-((x - center)/width)²)`.
    Gaussian { amplitude: f64, center: f64, width: f64 },
    /// `amplitude · x² exp(-x²/2)`, which vanishes at the corner.
    CornerBump { amplitude: f64 },
    /// The `t = 0` restriction of the exact solution.
    Exact,
    /// Samples on the half-line grid of the configuration.
    Samples { values: Vec<f64> },
}

/// Boundary data on `[0, t_final]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryData {
    Zero,
    /// `φ(0) + amplitude · sin(frequency · t)`.
    Sine { amplitude: f64, frequency: f64 },
    /// The `x = 0` restriction of the exact solution.
    Exact,
    /// The trace `S(t)φ̃(0)` of the free evolution of the extended data.
    FreeTrace,
}

/// A named problem with its grids and expected accuracy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub config: SolverConfig,
    pub initial: InitialData,
    pub boundary: BoundaryData,
    pub exact: Option<ExactSolution>,
    /// Relative `L²_x` tolerance against `exact`, or the boundary error
    /// tolerance when there is no exact solution.
    pub tolerance: f64,
}

fn check_soliton(c: f64, x0: f64) -> Result<()> {
    if !(c > 0.0 && c <= 4.0) {
        return Err(Error::InvalidArgument(format!("soliton speed must lie in (0, 4], got {c}")));
    }
    if !(x0 < 0.0) {
        return Err(Error::InvalidArgument(format!("soliton crest must start at x0 < 0, got {x0}")));
    }
    Ok(())
}

fn soliton(name: &str, exact: ExactSolution) -> Scenario {
    Scenario {
        name: name.into(),
        config: SolverConfig { k: exact.k(), ..Default::default() },
        initial: InitialData::Exact,
        boundary: BoundaryData::Exact,
        exact: Some(exact),
        tolerance: 1e-2,
    }
}

/// KdV soliton `3c sech²((√c/2)(x - ct - x0))` entering through the boundary.
pub fn soliton_k1(c: f64, x0: f64) -> Result<Scenario> {
    check_soliton(c, x0)?;
    Ok(soliton("soliton_k1", ExactSolution::SolitonK1 { c, x0 }))
}

/// mKdV soliton `√(6c) sech(√c (x - ct - x0))`.
pub fn soliton_k2(c: f64, x0: f64) -> Result<Scenario> {
    check_soliton(c, x0)?;
    Ok(soliton("soliton_k2", ExactSolution::SolitonK2 { c, x0 }))
}

/// Data `φ` on the default half-line grid with `f` set to the free trace, so
/// that the linear forcing vanishes.
pub fn compatible_trace_scenario(phi: &SampledFunction, k: u32, s: f64) -> Result<Scenario> {
    let config = SolverConfig { k, s, ..Default::default() };
    config.validate()?;
    if phi.grid() != &config.halfline_grid()? {
        return Err(Error::GridMismatch("data must be sampled on the default half-line grid".into()));
    }
    if phi.values().iter().any(|v| !v.re.is_finite()) {
        return Err(Error::InvalidArgument("initial data must be finite".into()));
    }
    Ok(Scenario {
        name: "compatible_trace".into(),
        config,
        initial: InitialData::Samples { values: phi.real_parts() },
        boundary: BoundaryData::FreeTrace,
        exact: None,
        tolerance: 1e-3,
    })
}

/// Gaussian data with homogeneous boundary values adjusted to the corner.
pub fn gaussian(k: u32, amplitude: f64) -> Scenario {
    Scenario {
        name: "gaussian".into(),
        config: SolverConfig { k, ..Default::default() },
        initial: InitialData::Gaussian { amplitude, center: 3.0, width: 1.0 },
        boundary: BoundaryData::Sine { amplitude: 0.0, frequency: 0.0 },
        exact: None,
        tolerance: 1e-3,
    }
}

/// `φ = A x² e^{-x²/2}`, `f ≡ 0`.
pub fn mass_decay(amplitude: f64) -> Scenario {
    Scenario {
        name: "mass_decay".into(),
        config: SolverConfig { t_final: 0.5, ..Default::default() },
        initial: InitialData::CornerBump { amplitude },
        boundary: BoundaryData::Zero,
        exact: None,
        tolerance: 1e-3,
    }
}

/// `φ = 0`, `f = sin(2t)`.
pub fn boundary_sine() -> Scenario {
    Scenario {
        name: "boundary_sine".into(),
        config: SolverConfig { t_final: 0.5, ..Default::default() },
        initial: InitialData::Zero,
        boundary: BoundaryData::Sine { amplitude: 1.0, frequency: 2.0 },
        exact: None,
        tolerance: 1e-3,
    }
}

pub fn zero() -> Scenario {
    Scenario {
        name: "zero".into(),
        config: SolverConfig::default(),
        initial: InitialData::Zero,
        boundary: BoundaryData::Zero,
        exact: None,
        tolerance: 1e-12,
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] = [
    "zero",
    "soliton_k1",
    "soliton_k2",
    "gaussian_k1",
    "gaussian_k2",
    "mass_decay",
    "boundary_sine",
];

/// The registry of standard scenarios.
pub fn by_name(name: &str) -> Result<Scenario> {
    let scenario = match name {
        "zero" => zero(),
        "soliton_k1" => soliton_k1(1.0, -10.0)?,
        "soliton_k2" => soliton_k2(1.0, -10.0)?,
        "gaussian_k1" => Scenario { name: "gaussian_k1".into(), ..gaussian(1, 0.5) },
        "gaussian_k2" => Scenario { name: "gaussian_k2".into(), ..gaussian(2, 0.5) },
        "mass_decay" => mass_decay(0.5),
        "boundary_sine" => boundary_sine(),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown scenario '{name}', expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(scenario)
}

impl Scenario {
    /// Rejects exact solutions that fail the residual gate.
    pub fn check(&self) -> Result<()> {
        self.config.validate()?;
        if let Some(exact) = &self.exact {
            if exact.k() != self.config.k {
                return Err(Error::InvalidArgument(format!(
                    "exact solution is for k = {}, scenario has k = {}",
                    exact.k(),
                    self.config.k
                )));
            }
            let residual = exact.residual()?;
            if !(residual < 1e-6) {
                return Err(Error::InvalidArgument(format!(
                    "exact solution fails the residual gate: {residual:.3e}"
                )));
            }
        }
        Ok(())
    }

    fn exact(&self) -> Result<ExactSolution> {
        self.exact
            .ok_or_else(|| Error::InvalidArgument(format!("scenario '{}' has no exact solution", self.name)))
    }

    pub fn initial_data(&self) -> Result<SampledFunction> {
        let grid = self.config.halfline_grid()?;
        match &self.initial {
            InitialData::Zero => Ok(SampledFunction::zeros(grid, DomainTag::Space)),
            InitialData::Gaussian { amplitude, center, width } => {
                SampledFunction::from_real_fn(grid, DomainTag::Space, |x| amplitude * (-((x - center) / width).powi(2)).exp())
            }
            InitialData::CornerBump { amplitude } => {
                SampledFunction::from_real_fn(grid, DomainTag::Space, |x| amplitude * x * x * (-0.5 * x * x).exp())
            }
            InitialData::Exact => {
                let exact = self.exact()?;
                SampledFunction::from_real_fn(grid, DomainTag::Space, |x| exact.value(x, 0.0))
            }
            InitialData::Samples { values } => SampledFunction::from_real(grid, values.clone(), DomainTag::Space),
        }
    }

    pub fn boundary_data(&self, phi: &SampledFunction) -> Result<SampledFunction> {
        let grid = self.config.time_grid()?;
        let corner = phi.values()[0].re;
        match &self.boundary {
            BoundaryData::Zero => Ok(SampledFunction::zeros(grid, DomainTag::Time)),
            BoundaryData::Sine { amplitude, frequency } => {
                SampledFunction::from_real_fn(grid, DomainTag::Time, |t| corner + amplitude * (frequency * t).sin())
            }
            BoundaryData::Exact => {
                let exact = self.exact()?;
                SampledFunction::from_real_fn(grid, DomainTag::Time, |t| exact.value(0.0, t))
            }
            BoundaryData::FreeTrace => {
                let plan = self.config.plan()?;
                let ext = extend_halfline(phi, self.config.s.min(1.0), plan.grid())?;
                let trace = evolved_trace(&plan, &ext, &grid)?;
                SampledFunction::from_real(grid, trace.real_parts(), DomainTag::Time)
            }
        }
    }

    /// The boundary value problem on the scenario's grids.
    pub fn problem(&self) -> Result<BoundaryProblem> {
        self.check()?;
        let phi = self.initial_data()?;
        let f = self.boundary_data(&phi)?;
        BoundaryProblem::new(phi, f, self.config.clone())
    }

    /// `max_n ‖u_n - u_exact‖ / ‖u_exact‖` in `L²(0, x_max)` for a field on
    /// the half-line grid.
    pub fn relative_error(&self, u: &SpaceTimeField) -> Result<Vec<f64>> {
        let exact = self.exact()?;
        let xg = *u.xgrid();
        Ok((0..u.tgrid().len())
            .map(|n| {
                let t = u.tgrid().node(n);
                let (mut diff, mut size) = (0.0, 0.0);
                for i in 0..xg.len() {
                    let e = exact.value(xg.node(i), t);
                    diff += (u.at(n, i).re - e).powi(2);
                    size += e * e;
                }
                (diff / size).sqrt()
            })
            .collect())
    }
}
