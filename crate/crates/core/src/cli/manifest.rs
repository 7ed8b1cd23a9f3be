use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::scenarios::{self, BoundaryData, InitialData, Scenario};
use crate::solver::SolverConfig;
use crate::{Error, Result};

/// A run description: a named scenario or explicit data, with optional grid
/// and tolerance overrides. Flat TOML; unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunManifest {
    /// Registered scenario name; the data keys below are then ignored
    /// except `c` and `x0` for solitons.
    pub scenario: Option<String>,
    pub c: Option<f64>,
    pub x0: Option<f64>,

    pub k: Option<u32>,
    pub s: Option<f64>,
    /// `zero`, `gaussian` or `corner_bump`.
    pub phi: Option<String>,
    pub phi_amplitude: Option<f64>,
    pub phi_center: Option<f64>,
    pub phi_width: Option<f64>,
    /// `zero`, `sine` or `free_trace`.
    pub f: Option<String>,
    pub f_amplitude: Option<f64>,
    pub f_frequency: Option<f64>,

    pub t_final: Option<f64>,
    pub half_width: Option<f64>,
    pub x_max: Option<f64>,
    pub n_x: Option<usize>,
    pub n_t: Option<usize>,
    pub window_t0: Option<f64>,
    pub window_constant: Option<f64>,
    pub window_power: Option<f64>,
    pub max_retries: Option<usize>,
    pub nonlinearity: Option<f64>,
    pub sponge_width: Option<f64>,
    pub sponge_strength: Option<f64>,

    pub picard_tol: Option<f64>,
    pub picard_max_iter: Option<usize>,
    pub compat_tol: Option<f64>,

    pub out: Option<PathBuf>,
    /// Number of evenly spaced field snapshots written to `field.tsv`.
    pub snapshots: Option<usize>,
    pub emit_field: Option<bool>,
    pub emit_boundary: Option<bool>,
    pub emit_mass: Option<bool>,
    pub emit_ledger: Option<bool>,
}

/// Which output files to write.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Emit {
    pub field: bool,
    pub boundary: bool,
    pub mass: bool,
    pub ledger: bool,
}

impl RunManifest {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("manifest: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read manifest {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> Emit {
        Emit {
            field: self.emit_field.unwrap_or(true),
            boundary: self.emit_boundary.unwrap_or(true),
            mass: self.emit_mass.unwrap_or(true),
            ledger: self.emit_ledger.unwrap_or(true),
        }
    }

    pub fn snapshots(&self) -> Result<usize> {
        match self.snapshots.unwrap_or(11) {
            0 => Err(Error::InvalidArgument("snapshots must be at least 1".into())),
            n => Ok(n),
        }
    }

    fn base(&self) -> Result<Scenario> {
        if let Some(name) = &self.scenario {
            let explicit = [self.phi.is_some(), self.f.is_some(), self.phi_amplitude.is_some(), self.f_amplitude.is_some()];
            if explicit.iter().any(|&b| b) {
                return Err(Error::InvalidArgument("give either a scenario or explicit phi/f data, not both".into()));
            }
            return match name.as_str() {
                "soliton_k1" => scenarios::soliton_k1(self.c.unwrap_or(1.0), self.x0.unwrap_or(-10.0)),
                "soliton_k2" => scenarios::soliton_k2(self.c.unwrap_or(1.0), self.x0.unwrap_or(-10.0)),
                other => {
                    if self.c.is_some() || self.x0.is_some() {
                        return Err(Error::InvalidArgument(format!("c and x0 only apply to solitons, not '{other}'")));
                    }
                    scenarios::by_name(other)
                }
            };
        }
        let amplitude = self.phi_amplitude.unwrap_or(1.0);
        let initial = match self.phi.as_deref().unwrap_or("zero") {
            "zero" => InitialData::Zero,
            "gaussian" => InitialData::Gaussian {
                amplitude,
                center: self.phi_center.unwrap_or(3.0),
                width: self.phi_width.unwrap_or(1.0),
            },
            "corner_bump" => InitialData::CornerBump { amplitude },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown phi '{other}', expected zero, gaussian or corner_bump"
                )))
            }
        };
        let boundary = match self.f.as_deref().unwrap_or("zero") {
            "zero" => BoundaryData::Zero,
            "sine" => BoundaryData::Sine {
                amplitude: self.f_amplitude.unwrap_or(1.0),
                frequency: self.f_frequency.unwrap_or(1.0),
            },
            "free_trace" => BoundaryData::FreeTrace,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown f '{other}', expected zero, sine or free_trace"
                )))
            }
        };
        Ok(Scenario {
            name: "explicit".into(),
            config: SolverConfig::default(),
            initial,
            boundary,
            exact: None,
            tolerance: 1e-3,
        })
    }

    /// The scenario with all overrides applied and the configuration
    /// validated.
    pub fn scenario(&self) -> Result<Scenario> {
        let mut scenario = self.base()?;
        let c = &mut scenario.config;
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { c.$field = v; })*
            };
        }
        apply!(
            k, s, t_final, half_width, x_max, n_x, n_t, window_t0, window_constant, window_power, max_retries,
            nonlinearity, sponge_width, sponge_strength, picard_tol, picard_max_iter, compat_tol
        );
        if self.t_final.is_some() && self.window_t0.is_none() {
            c.window_t0 = c.window_t0.min(c.t_final);
        }
        scenario.check()?;
        self.snapshots()?;
        Ok(scenario)
    }
}
