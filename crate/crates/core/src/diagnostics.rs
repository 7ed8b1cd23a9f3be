//! Checks on computed fields: PDE residuals, the mass series, the energy
//! identity and empirical convergence orders.
//!
//! The energy identity for `u_t + u_xxx + u^k u_x = 0` on `x > 0` with
//! `u(0, t) = f(t)` reads
//!
//! ```text
//! ∫ u²(t) + ∫_0^t u_x(0)² - 2 ∫_0^t u_xx(0) f - (2/(k+2)) ∫_0^t f^{k+2} = ∫ φ².
//! ```

use serde::{Deserialize, Serialize};

use crate::discrete::{SampledFunction, SpaceTimeField};
use crate::{Error, Result};

/// Rectangle `[x_min, x_max] × [t_min, t_max]` of a space-time field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

/// Both sides of an identity per time node and their relative imbalance
/// `|lhs - rhs| / (1 + max(|lhs|, |rhs|))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityLedger {
    pub name: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub relative_imbalance: Vec<f64>,
}

impl IdentityLedger {
    pub fn new(name: &str, lhs: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        if lhs.len() != rhs.len() {
            return Err(Error::InvalidArgument("identity sides of different lengths".into()));
        }
        let relative_imbalance = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| (l - r).abs() / (1.0 + l.abs().max(r.abs())))
            .collect();
        Ok(Self {
            name: name.to_string(),
            lhs,
            rhs,
            relative_imbalance,
        })
    }

    pub fn max_imbalance(&self) -> f64 {
        self.relative_imbalance.iter().copied().fold(0.0, f64::max)
    }
}

fn index_range(nodes: &[f64], lo: f64, hi: f64) -> (usize, usize) {
    let first = nodes.iter().position(|&v| v >= lo - 1e-12).unwrap_or(nodes.len());
    let last = nodes.iter().rposition(|&v| v <= hi + 1e-12).unwrap_or(0);
    (first, last)
}

/// Max-norm residual of `u_t + u_xxx + u^k u_x` on `patch` with fourth-order
/// central differences, divided by the largest of the three term magnitudes.
///
/// `k = None` drops the nonlinear term. The patch must keep `x > 0` and stay
/// three nodes inside the grid in `x` and two in `t`.
pub fn pde_residual(u: &SpaceTimeField, k: Option<u32>, patch: &Patch) -> Result<f64> {
    if patch.x_min <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "residual patch must exclude the boundary line x = 0, x_min = {}",
            patch.x_min
        )));
    }
    let (xg, tg) = (u.xgrid(), u.tgrid());
    let (i0, i1) = index_range(&xg.nodes(), patch.x_min, patch.x_max);
    let (n0, n1) = index_range(&tg.nodes(), patch.t_min, patch.t_max);
    if i0 < 3 || i1 + 3 >= xg.len() || n0 < 2 || n1 + 2 >= tg.len() || i0 > i1 || n0 > n1 {
        return Err(Error::InvalidArgument(format!(
            "residual patch {patch:?} is not inside the field's stencil interior"
        )));
    }
    let (dx, dt) = (xg.spacing(), tg.spacing());
    let v = |n: usize, i: usize| u.at(n, i).re;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for n in n0..=n1 {
        for i in i0..=i1 {
            let ut = (-v(n + 2, i) + 8.0 * v(n + 1, i) - 8.0 * v(n - 1, i) + v(n - 2, i)) / (12.0 * dt);
            let ux = (-v(n, i + 2) + 8.0 * v(n, i + 1) - 8.0 * v(n, i - 1) + v(n, i - 2)) / (12.0 * dx);
            let uxxx = (-v(n, i + 3) + 8.0 * v(n, i + 2) - 13.0 * v(n, i + 1) + 13.0 * v(n, i - 1)
                - 8.0 * v(n, i - 2)
                + v(n, i - 3))
                / (8.0 * dx * dx * dx);
            let nonlinear = k.map_or(0.0, |k| v(n, i).powi(k as i32) * ux);
            worst = worst.max((ut + uxxx + nonlinear).abs());
            scale = scale.max(ut.abs()).max(uxxx.abs()).max(nonlinear.abs());
        }
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

fn origin_index(u: &SpaceTimeField) -> Result<usize> {
    u.xgrid()
        .index_of(0.0)
        .ok_or_else(|| Error::InvalidGrid("x = 0 is not a node of the field's grid".into()))
}

/// `∫_{x>0} u²(x, t) dx` per time node, by the trapezoidal rule over the
/// nodes with `x >= 0`.
pub fn mass_series(u: &SpaceTimeField) -> Result<Vec<f64>> {
    let origin = origin_index(u)?;
    let dx = u.xgrid().spacing();
    Ok((0..u.tgrid().len())
        .map(|n| {
            let row = &u.row(n)[origin..];
            let sum: f64 = row.iter().map(|v| v.re * v.re).sum();
            let ends = 0.5 * (row[0].re.powi(2) + row[row.len() - 1].re.powi(2));
            (sum - ends) * dx
        })
        .collect())
}

/// `∫ φ²` over `x >= 0` by the trapezoidal rule.
pub fn halfline_mass(phi: &SampledFunction) -> f64 {
    let vals: Vec<f64> = phi.values().iter().map(|v| v.re).collect();
    let start = phi.grid().nonnegative_range().map_or(vals.len(), |r| r.start);
    let row = &vals[start..];
    if row.is_empty() {
        return 0.0;
    }
    let sum: f64 = row.iter().map(|v| v * v).sum();
    (sum - 0.5 * (row[0].powi(2) + row[row.len() - 1].powi(2))) * phi.grid().spacing()
}

/// One-sided third-order `u_x(0, t)` and second-order `u_xx(0, t)`.
pub fn boundary_derivatives(u: &SpaceTimeField) -> Result<(Vec<f64>, Vec<f64>)> {
    let origin = origin_index(u)?;
    if u.xgrid().len() < origin + 4 {
        return Err(Error::InvalidGrid(
            "boundary stencils need four nodes with x >= 0".into(),
        ));
    }
    let dx = u.xgrid().spacing();
    let mut ux = Vec::with_capacity(u.tgrid().len());
    let mut uxx = Vec::with_capacity(u.tgrid().len());
    for n in 0..u.tgrid().len() {
        let r = &u.row(n)[origin..origin + 4];
        let (a, b, c, d) = (r[0].re, r[1].re, r[2].re, r[3].re);
        ux.push((-11.0 * a + 18.0 * b - 9.0 * c + 2.0 * d) / (6.0 * dx));
        uxx.push((2.0 * a - 5.0 * b + 4.0 * c - d) / (dx * dx));
    }
    Ok((ux, uxx))
}

fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (n, v) in values.iter().enumerate() {
        if n > 0 {
            acc += 0.5 * (values[n - 1] + v) * step;
        }
        out.push(acc);
    }
    out
}

/// Ledger of the energy identity for a field on a grid containing `x = 0`,
/// boundary data `f` sampled from `t = 0` on the field's time spacing, and
/// initial data `φ` on `x >= 0`.
pub fn energy_identity(u: &SpaceTimeField, f: &SampledFunction, phi: &SampledFunction, k: u32) -> Result<IdentityLedger> {
    energy_identity_with(u, f, phi, k, 1.0)
}

/// [`energy_identity`] for `u_t + u_xxx + c u^k u_x = 0`.
pub fn energy_identity_with(
    u: &SpaceTimeField,
    f: &SampledFunction,
    phi: &SampledFunction,
    k: u32,
    coefficient: f64,
) -> Result<IdentityLedger> {
    let tg = u.tgrid();
    if !f.grid().same_spacing(tg) || f.grid().len() < tg.len() {
        return Err(Error::GridMismatch("boundary data does not cover the field's time grid".into()));
    }
    let mass = mass_series(u)?;
    let (ux, uxx) = boundary_derivatives(u)?;
    let fv: Vec<f64> = f.values()[..tg.len()].iter().map(|v| v.re).collect();
    let dt = tg.spacing();
    let flux = cumulative_trapezoid(&ux.iter().map(|v| v * v).collect::<Vec<_>>(), dt);
    let work = cumulative_trapezoid(&uxx.iter().zip(&fv).map(|(a, b)| a * b).collect::<Vec<_>>(), dt);
    let power = cumulative_trapezoid(&fv.iter().map(|v| v.powi(k as i32 + 2)).collect::<Vec<_>>(), dt);
    let kf = k as f64;
    let lhs = (0..tg.len())
        .map(|n| mass[n] + flux[n] - 2.0 * work[n] - 2.0 * coefficient / (kf + 2.0) * power[n])
        .collect();
    let rhs = vec![halfline_mass(phi); tg.len()];
    IdentityLedger::new("energy", lhs, rhs)
}

/// Least-squares slope of `log error` against `log step`.
pub fn convergence_order(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "convergence order needs at least 3 refinement levels, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(h, e)| !(h > 0.0) || !(e > 0.0) || !h.is_finite() || !e.is_finite()) {
        return Err(Error::InvalidArgument("convergence samples must be positive and finite".into()));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("refinement levels must use distinct steps".into()));
    }
    Ok(sxy / sxx)
}
