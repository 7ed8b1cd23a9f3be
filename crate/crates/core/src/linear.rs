//! The linear Airy group `S(t)`, the boundary-forcing term and the
//! inhomogeneous Duhamel term on a periodic box `[-L, L)`.
//!
//! `S(t)` acts by the multiplier `e^{itξ³}`. The boundary-forcing term is
//!
//! ```text
//! w(x, t) = ∫_0^t (t - t')^{-1/3} A(x (t - t')^{-1/3}) h(t') dt',
//! ```
//!
//! which solves `w_t + w_xxx = 2π δ_0(x) h(t)`, `w(·, 0) = 0`; on the box each
//! Fourier mode obeys `ŵ' = iξ³ ŵ + h`. Time integration in spectral space is
//! exponential: the source is interpolated linearly in time and integrated
//! exactly against the propagator.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::airy::{constant_ca, AiryEvaluator};
use crate::discrete::{DomainTag, Grid1D, SampledFunction, SpaceTimeField, Transformer};
use crate::fractional::{gamma_function, RlWeights};
use crate::{Complex64, Error, Result};

/// Wraparound guard for a plan.
///
/// With a band limit `ξ_max` and a region of interest `|x| <= region`, energy
/// moves at most `3 ξ_max² t`, so times up to `(L - region) / (3 ξ_max²)` are
/// free of periodic images. Without a band limit no guard is applied.
///
/// Dispersed waves all travel left and re-enter the box from the right. A
/// sponge damps them near the seam in [`boundary_forcing`], [`group_field`]
/// and [`duhamel_inhomogeneous`]; [`group_apply`] and [`group_trace`] stay
/// exact phase multipliers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanOptions {
    pub band_limit: Option<f64>,
    pub region: f64,
    pub allow_beyond_horizon: bool,
    pub sponge: Option<Sponge>,
}

/// Absorbing layer of the given width at the seam `x = ±L` of the box,
/// with damping rate rising smoothly to `strength`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sponge {
    pub width: f64,
    pub strength: f64,
}

/// Reusable transform plan for the box grid.
#[derive(Clone, Debug)]
pub struct PropagatorPlan {
    transformer: Transformer,
    options: PlanOptions,
}

impl PropagatorPlan {
    pub fn new(base_grid: Grid1D) -> Result<Self> {
        Self::with_options(base_grid, PlanOptions::default())
    }

    pub fn with_options(base_grid: Grid1D, options: PlanOptions) -> Result<Self> {
        if base_grid.len() % 2 != 0 || base_grid.len() < 4 {
            return Err(Error::InvalidGrid(format!(
                "propagator grid needs an even node count >= 4, got {}",
                base_grid.len()
            )));
        }
        if let Some(b) = options.band_limit {
            if !(b > 0.0) || !(options.region >= 0.0 && options.region < base_grid.half_width()) {
                return Err(Error::InvalidArgument(format!(
                    "band limit {b} and region {} invalid for half-width {}",
                    options.region,
                    base_grid.half_width()
                )));
            }
        }
        Ok(Self {
            transformer: Transformer::new(base_grid),
            options,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        self.transformer.grid()
    }

    pub fn transformer(&self) -> &Transformer {
        &self.transformer
    }

    pub fn wavenumbers(&self) -> &[f64] {
        self.transformer.wavenumbers()
    }

    pub fn options(&self) -> &PlanOptions {
        &self.options
    }

    /// Largest wraparound-safe `|t|`, if a band limit is configured.
    pub fn horizon(&self) -> Option<f64> {
        self.options
            .band_limit
            .map(|b| (self.grid().half_width() - self.options.region) / (3.0 * b * b))
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if let Some(horizon) = self.horizon() {
            if t.abs() > horizon && !self.options.allow_beyond_horizon {
                return Err(Error::BeyondHorizon { t, horizon });
            }
        }
        Ok(())
    }

    /// Per-step damping factors `e^{-σ(x) Δt}` of the sponge, if any.
    fn damping(&self, step: f64) -> Option<Vec<f64>> {
        let sponge = self.options.sponge?;
        let half = self.grid().half_width();
        Some(
            self.grid()
                .nodes()
                .into_iter()
                .map(|x| {
                    let d = (x + half).min(half - x);
                    let r = ((sponge.width - d) / sponge.width).max(0.0);
                    (-sponge.strength * r * r * step).exp()
                })
                .collect(),
        )
    }

    /// Samples of the coefficients `c`, damped by `factors` if given; `c` is
    /// updated to the damped state.
    fn damp(&self, c: &mut Vec<Complex64>, factors: Option<&[f64]>) -> Vec<Complex64> {
        let mut row = self.transformer.inverse(c);
        if let Some(d) = factors {
            for (v, d) in row.iter_mut().zip(d) {
                *v *= d;
            }
            *c = self.transformer.forward(&row);
        }
        row
    }

    fn check_space(&self, f: &SampledFunction) -> Result<()> {
        if f.grid() != self.grid() {
            return Err(Error::GridMismatch(format!(
                "data on {:?}, plan on {:?}",
                f.grid(),
                self.grid()
            )));
        }
        Ok(())
    }

    fn origin_index(&self) -> Result<usize> {
        self.grid()
            .index_of(0.0)
            .ok_or_else(|| Error::InvalidGrid("x = 0 is not a node of the box grid".into()))
    }
}

/// `S(t) φ̃`.
pub fn group_apply(plan: &PropagatorPlan, phi: &SampledFunction, t: f64) -> Result<SampledFunction> {
    plan.check_space(phi)?;
    plan.check_time(t)?;
    let mut c = plan.transformer.forward(phi.values());
    for (c, xi) in c.iter_mut().zip(plan.wavenumbers()) {
        *c *= Complex64::from_polar(1.0, t * xi * xi * xi);
    }
    SampledFunction::new(*plan.grid(), plan.transformer.inverse(&c), phi.tag())
}

/// `S(t_n) φ̃` for every node of `tgrid`, which must start at 0.
///
/// With a sponge configured, the evolution is damped in the layer after each
/// step of `tgrid`.
pub fn group_field(plan: &PropagatorPlan, phi: &SampledFunction, tgrid: &Grid1D) -> Result<SpaceTimeField> {
    plan.check_space(phi)?;
    check_time_grid(plan, tgrid)?;
    let mut c = plan.transformer.forward(phi.values());
    let mut field = SpaceTimeField::zeros(*plan.grid(), *tgrid);
    field.row_mut(0).copy_from_slice(phi.values());
    let step = tgrid.spacing();
    let rotation: Vec<Complex64> = plan
        .wavenumbers()
        .iter()
        .map(|xi| Complex64::from_polar(1.0, step * xi * xi * xi))
        .collect();
    let damping = plan.damping(step);
    for n in 1..tgrid.len() {
        if damping.is_none() {
            let t = tgrid.node(n);
            let rotated: Vec<Complex64> = c
                .iter()
                .zip(plan.wavenumbers())
                .map(|(c, xi)| c * Complex64::from_polar(1.0, t * xi * xi * xi))
                .collect();
            field.row_mut(n).copy_from_slice(&plan.transformer.inverse(&rotated));
            continue;
        }
        for (c, r) in c.iter_mut().zip(&rotation) {
            *c *= r;
        }
        let row = plan.damp(&mut c, damping.as_deref());
        field.row_mut(n).copy_from_slice(&row);
    }
    Ok(field)
}

/// The origin column of [`group_field`] without storing the field.
pub fn evolved_trace(plan: &PropagatorPlan, phi: &SampledFunction, tgrid: &Grid1D) -> Result<SampledFunction> {
    plan.check_space(phi)?;
    check_time_grid(plan, tgrid)?;
    let origin = plan.origin_index()?;
    let step = tgrid.spacing();
    let damping = plan.damping(step);
    let mut c = plan.transformer.forward(phi.values());
    let mut values = vec![phi.values()[origin]];
    let rotation: Vec<Complex64> = plan
        .wavenumbers()
        .iter()
        .map(|xi| Complex64::from_polar(1.0, step * xi * xi * xi))
        .collect();
    for n in 1..tgrid.len() {
        if damping.is_none() {
            let t = tgrid.node(n);
            let rotated: Vec<Complex64> = c
                .iter()
                .zip(plan.wavenumbers())
                .map(|(c, xi)| c * Complex64::from_polar(1.0, t * xi * xi * xi))
                .collect();
            values.push(plan.transformer.inverse(&rotated)[origin]);
            continue;
        }
        for (c, r) in c.iter_mut().zip(&rotation) {
            *c *= r;
        }
        values.push(plan.damp(&mut c, damping.as_deref())[origin]);
    }
    SampledFunction::new(*tgrid, values, DomainTag::Time)
}

/// The boundary trace `t ↦ S(t)φ̃(0) = Σ_j e^{itξ_j³} φ̂(ξ_j) Δξ` on `tgrid`.
pub fn group_trace(plan: &PropagatorPlan, phi: &SampledFunction, tgrid: &Grid1D) -> Result<SampledFunction> {
    plan.check_space(phi)?;
    plan.origin_index()?;
    plan.check_time(tgrid.start())?;
    plan.check_time(tgrid.end())?;
    let c = plan.transformer.forward(phi.values());
    let dxi = plan.transformer.dxi();
    let values = tgrid
        .nodes()
        .into_iter()
        .map(|t| {
            c.iter()
                .zip(plan.wavenumbers())
                .map(|(c, xi)| c * Complex64::from_polar(1.0, t * xi * xi * xi))
                .sum::<Complex64>()
                * dxi
        })
        .collect();
    SampledFunction::new(*tgrid, values, DomainTag::Time)
}

/// Per-mode coefficients of one exponential step of length `Δ`:
/// `ŵ_{n+1} = e^z ŵ_n + a h_n + b h_{n+1}` with `z = iξ³Δ`.
struct ExponentialStep {
    propagator: Vec<Complex64>,
    old: Vec<Complex64>,
    new: Vec<Complex64>,
}

/// `φ1(z) = (e^z - 1)/z` and `φ2(z) = (e^z - 1 - z)/z²`.
fn phi_functions(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let mut p1 = Complex64::new(0.0, 0.0);
        let mut p2 = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..20 {
            fact *= (k + 1) as f64;
            p1 += power / fact;
            p2 += power / (fact * (k + 2) as f64);
            power *= z;
        }
        (p1, p2)
    } else {
        let ez = z.exp();
        let p1 = (ez - 1.0) / z;
        (p1, (ez - 1.0 - z) / (z * z))
    }
}

impl ExponentialStep {
    fn new(wavenumbers: &[f64], step: f64) -> Self {
        let mut propagator = Vec::with_capacity(wavenumbers.len());
        let mut old = Vec::with_capacity(wavenumbers.len());
        let mut new = Vec::with_capacity(wavenumbers.len());
        for xi in wavenumbers {
            let z = Complex64::new(0.0, xi * xi * xi * step);
            let (p1, p2) = phi_functions(z);
            propagator.push(Complex64::from_polar(1.0, z.im));
            old.push((p1 - p2) * step);
            new.push(p2 * step);
        }
        Self { propagator, old, new }
    }
}

fn check_time_grid(plan: &PropagatorPlan, tgrid: &Grid1D) -> Result<()> {
    if tgrid.start().abs() > 1e-9 * tgrid.spacing() {
        return Err(Error::InvalidArgument(format!(
            "time grid must start at t = 0, starts at {}",
            tgrid.start()
        )));
    }
    plan.check_time(tgrid.end())
}

/// Boundary-forcing term on the box, computed mode by mode.
///
/// `h` is sampled on a grid starting at `t = 0` with the spacing of `tgrid`
/// and at least as many nodes.
pub fn boundary_forcing(plan: &PropagatorPlan, h: &SampledFunction, tgrid: &Grid1D) -> Result<SpaceTimeField> {
    check_time_grid(plan, tgrid)?;
    check_source(h, tgrid)?;
    let nx = plan.grid().len();
    let step = ExponentialStep::new(plan.wavenumbers(), tgrid.spacing());
    let mut w = vec![Complex64::new(0.0, 0.0); nx];
    let mut field = SpaceTimeField::zeros(*plan.grid(), *tgrid);
    let hv = h.values();
    let damping = plan.damping(tgrid.spacing());
    for n in 1..tgrid.len() {
        let (h0, h1) = (hv[n - 1], hv[n]);
        for j in 0..nx {
            w[j] = step.propagator[j] * w[j] + step.old[j] * h0 + step.new[j] * h1;
        }
        let row = plan.damp(&mut w, damping.as_deref());
        field.row_mut(n).copy_from_slice(&row);
    }
    Ok(field)
}

fn check_source(h: &SampledFunction, tgrid: &Grid1D) -> Result<()> {
    let g = h.grid();
    if g.start().abs() > 1e-9 * g.spacing() {
        return Err(Error::InvalidArgument(format!(
            "forcing must be sampled from t = 0, starts at {}",
            g.start()
        )));
    }
    if !g.same_spacing(tgrid) || g.len() < tgrid.len() {
        return Err(Error::GridMismatch(format!(
            "forcing sampled on {g:?} does not cover {tgrid:?}"
        )));
    }
    Ok(())
}

/// `ŵ(ξ, t_n) = ∫_0^{t_n} e^{i(t_n - t')ξ³} ĥ(ξ, t') dt'` with `ĥ` linear in
/// time between nodes.
pub fn duhamel_inhomogeneous(plan: &PropagatorPlan, h: &SpaceTimeField, tgrid: &Grid1D) -> Result<SpaceTimeField> {
    if h.xgrid() != plan.grid() || h.tgrid() != tgrid {
        return Err(Error::GridMismatch("Duhamel source not on the plan grid and time grid".into()));
    }
    check_time_grid(plan, tgrid)?;
    let nx = plan.grid().len();
    let step = ExponentialStep::new(plan.wavenumbers(), tgrid.spacing());
    let mut w = vec![Complex64::new(0.0, 0.0); nx];
    let mut field = SpaceTimeField::zeros(*plan.grid(), *tgrid);
    let damping = plan.damping(tgrid.spacing());
    let mut prev = plan.transformer.forward(h.row(0));
    for n in 1..tgrid.len() {
        let next = plan.transformer.forward(h.row(n));
        for j in 0..nx {
            w[j] = step.propagator[j] * w[j] + step.old[j] * prev[j] + step.new[j] * next[j];
        }
        let row = plan.damp(&mut w, damping.as_deref());
        field.row_mut(n).copy_from_slice(&row);
        prev = next;
    }
    Ok(field)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Boundary-forcing term evaluated directly from the Airy kernel, on any
/// spatial grid.
///
/// `h` is interpolated linearly between the nodes of `tgrid`. At `x = 0` the
/// weights are exact; elsewhere each step is integrated in `σ = (t - t')^{2/3}`
/// with Gauss–Legendre quadrature, which is accurate for `x >= 0`.
pub fn forcing_term(h: &SampledFunction, xgrid: &Grid1D, tgrid: &Grid1D) -> Result<SpaceTimeField> {
    check_source(h, tgrid)?;
    if tgrid.start().abs() > 1e-9 * tgrid.spacing() {
        return Err(Error::InvalidArgument("time grid must start at t = 0".into()));
    }
    let nt = tgrid.len();
    let dt = tgrid.spacing();
    let hv = &h.values()[..nt];
    let ev = AiryEvaluator::default();
    let (gx, gw) = gauss_legendre(8);
    let mut field = SpaceTimeField::zeros(*xgrid, *tgrid);
    let trace_scale = constant_ca() * gamma_function(2.0 / 3.0)?;
    let rl = RlWeights::new(2.0 / 3.0, dt, nt)?;

    for i in 0..xgrid.len() {
        let x = xgrid.node(i);
        let column: Vec<Complex64> = if x == 0.0 {
            rl.apply(hv).into_iter().map(|v| v * trace_scale).collect()
        } else {
            // weights on h_{n-k} and h_{n-k-1} for the step τ ∈ [kΔ, (k+1)Δ]
            let mut w_near = vec![0.0; nt];
            let mut w_far = vec![0.0; nt];
            for k in 0..nt.saturating_sub(1) {
                let lo = (k as f64 * dt).powf(2.0 / 3.0);
                let hi = ((k + 1) as f64 * dt).powf(2.0 / 3.0);
                let half = 0.5 * (hi - lo);
                for (z, wq) in gx.iter().zip(&gw) {
                    let sigma = lo + half * (1.0 + z);
                    let tau = sigma.powf(1.5);
                    let theta = tau / dt - k as f64;
                    let kernel = 1.5 * ev.airy_a(x / sigma.sqrt())? * wq * half;
                    w_near[k] += kernel * (1.0 - theta);
                    w_far[k] += kernel * theta;
                }
            }
            (0..nt)
                .map(|n| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += hv[n - k] * w_near[k] + hv[n - k - 1] * w_far[k];
                    }
                    acc
                })
                .collect()
        };
        for (n, v) in column.into_iter().enumerate() {
            field.row_mut(n)[i] = v;
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::airy_a;
    use crate::discrete::l2_norm;
    use crate::fractional::riemann_liouville;
    use proptest::prelude::*;

    fn gaussian_plan(half: f64, n: usize) -> (PropagatorPlan, SampledFunction) {
        let g = Grid1D::periodic_box(half, n).unwrap();
        let phi = SampledFunction::from_real_fn(g, DomainTag::Space, |x| (-x * x / 4.0).exp()).unwrap();
        (PropagatorPlan::new(g).unwrap(), phi)
    }

    #[test]
    fn group_is_identity_at_zero_and_a_phase_on_lattice_modes() {
        let (plan, phi) = gaussian_plan(10.0, 128);
        let same = group_apply(&plan, &phi, 0.0).unwrap();
        for (a, b) in same.values().iter().zip(phi.values()) {
            assert!((a - b).norm() < 1e-13);
        }
        let xi0 = plan.wavenumbers()[3];
        let mode = SampledFunction::from_fn(*plan.grid(), DomainTag::Space, |x| Complex64::from_polar(1.0, xi0 * x)).unwrap();
        let t = 0.37;
        let moved = group_apply(&plan, &mode, t).unwrap();
        for (k, v) in moved.values().iter().enumerate() {
            let x = plan.grid().node(k);
            assert!((v - Complex64::from_polar(1.0, xi0 * x + t * xi0.powi(3))).norm() < 1e-12);
        }
        let trace = group_trace(&plan, &mode, &Grid1D::time(0.1, 11).unwrap()).unwrap();
        for (n, v) in trace.values().iter().enumerate() {
            let t = 0.1 * n as f64;
            assert!((v - Complex64::from_polar(1.0, t * xi0.powi(3))).norm() < 1e-12);
        }
    }

    #[test]
    fn group_law_holds() {
        let (plan, phi) = gaussian_plan(10.0, 128);
        let a = group_apply(&plan, &group_apply(&plan, &phi, 0.3).unwrap(), 0.45).unwrap();
        let b = group_apply(&plan, &phi, 0.75).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn group_matches_direct_airy_convolution() {
        let (plan, phi) = gaussian_plan(40.0, 2048);
        let t = 0.5_f64;
        let got = group_apply(&plan, &phi, t).unwrap();
        let g = plan.grid();
        let scale = t.powf(-1.0 / 3.0);
        let mut err = 0.0;
        let mut norm = 0.0;
        for i in (0..g.len()).step_by(8) {
            let x = g.node(i);
            if x.abs() > 10.0 {
                continue;
            }
            let direct: f64 = (0..g.len())
                .map(|k| {
                    let y = g.node(k);
                    scale * airy_a((x - y) * scale).unwrap() * phi.values()[k].re
                })
                .sum::<f64>()
                * g.spacing()
                / (2.0 * PI);
            err += (got.values()[i] - direct).norm_sqr();
            norm += direct * direct;
        }
        let rel = (err / norm).sqrt();
        assert!(rel < 1e-4, "relative L2 mismatch {rel:e}");
    }

    #[test]
    fn trace_agrees_with_the_field_at_the_origin() {
        let (plan, phi) = gaussian_plan(20.0, 256);
        let tg = Grid1D::time(0.05, 21).unwrap();
        let trace = group_trace(&plan, &phi, &tg).unwrap();
        let field = group_field(&plan, &phi, &tg).unwrap();
        let origin = plan.grid().index_of(0.0).unwrap();
        for n in 0..tg.len() {
            assert!((trace.values()[n] - field.at(n, origin)).norm() < 1e-12);
        }
        let damped = PropagatorPlan::with_options(*plan.grid(), PlanOptions { sponge: Some(Sponge { width: 5.0, strength: 100.0 }), ..Default::default() }).unwrap();
        let column = group_field(&damped, &phi, &tg).unwrap().column(origin);
        let evolved = evolved_trace(&damped, &phi, &tg).unwrap();
        assert_eq!(evolved.values(), &column[..]);
        let evolved = evolved_trace(&plan, &phi, &tg).unwrap();
        assert_eq!(evolved.values(), &field.column(origin)[..]);
        let zero = SampledFunction::zeros(*plan.grid(), DomainTag::Space);
        assert_eq!(group_trace(&plan, &zero, &tg).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn horizon_guard_refuses_late_times() {
        let g = Grid1D::periodic_box(20.0, 64).unwrap();
        let options = PlanOptions {
            band_limit: Some(2.0),
            region: 8.0,
            allow_beyond_horizon: false,
            sponge: None,
        };
        let plan = PropagatorPlan::with_options(g, options).unwrap();
        assert!((plan.horizon().unwrap() - 1.0).abs() < 1e-15);
        let phi = SampledFunction::zeros(g, DomainTag::Space);
        assert!(group_apply(&plan, &phi, 0.9).is_ok());
        assert!(matches!(group_apply(&plan, &phi, 1.1), Err(Error::BeyondHorizon { .. })));
        let lenient = PropagatorPlan::with_options(g, PlanOptions { allow_beyond_horizon: true, ..options }).unwrap();
        assert!(group_apply(&lenient, &phi, 1.1).is_ok());
        let other = SampledFunction::zeros(Grid1D::periodic_box(10.0, 64).unwrap(), DomainTag::Space);
        assert!(matches!(group_apply(&plan, &other, 0.1), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn direct_forcing_term_on_constant_source() {
        let tg = Grid1D::time(0.01, 101).unwrap();
        let xg = Grid1D::new(0.0, 1.0, 3).unwrap();
        let zero = SampledFunction::zeros(tg, DomainTag::Time);
        assert_eq!(forcing_term(&zero, &xg, &tg).unwrap().max_abs(), 0.0);
        let one = SampledFunction::from_real_fn(tg, DomainTag::Time, |_| 1.0).unwrap();
        let w = forcing_term(&one, &xg, &tg).unwrap();
        for n in 0..tg.len() {
            let t = tg.node(n);
            let want = 1.5 * constant_ca() * t.powf(2.0 / 3.0);
            assert!((w.at(n, 0).re - want).abs() < 1e-12);
            assert!((w.at(n, 0).re - 2.32003 * t.powf(2.0 / 3.0)).abs() < 1e-5);
        }
        for i in 0..3 {
            assert_eq!(w.at(0, i).norm(), 0.0);
        }
        // continuity in x at the source
        let near = forcing_term(&one, &Grid1D::new(1e-4, 2e-4, 2).unwrap(), &tg).unwrap();
        assert!((near.at(100, 0).re - w.at(100, 0).re).abs() < 1e-3);
    }

    fn third_derivative_residual(w: &SpaceTimeField, from_x: f64, from_t: f64) -> f64 {
        let (xg, tg) = (w.xgrid(), w.tgrid());
        let (dx, dt) = (xg.spacing(), tg.spacing());
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for n in 1..tg.len() - 1 {
            if tg.node(n) < from_t {
                continue;
            }
            for i in 2..xg.len() - 2 {
                if xg.node(i) < from_x {
                    continue;
                }
                let wt = (w.at(n + 1, i) - w.at(n - 1, i)) / (2.0 * dt);
                let wxxx = (w.at(n, i + 2) - w.at(n, i + 1) * 2.0 + w.at(n, i - 1) * 2.0 - w.at(n, i - 2)) / (2.0 * dx.powi(3));
                worst = worst.max((wt + wxxx).norm());
                scale = scale.max(wt.norm()).max(wxxx.norm());
            }
        }
        worst / scale
    }

    #[test]
    fn direct_forcing_term_solves_airy_equation_away_from_the_source() {
        let tg = Grid1D::time(0.004, 251).unwrap();
        let xg = Grid1D::new(0.4, 2.0, 33).unwrap();
        let h = SampledFunction::from_real_fn(tg, DomainTag::Time, |t| (3.0 * t).sin() + t).unwrap();
        let w = forcing_term(&h, &xg, &tg).unwrap();
        let rel = third_derivative_residual(&w, 0.5, 0.2);
        assert!(rel < 1e-2, "relative residual {rel:e}");
    }

    #[test]
    fn spectral_and_direct_forcing_agree_on_the_right() {
        let g = Grid1D::periodic_box(40.0, 2048).unwrap();
        let plan = PropagatorPlan::new(g).unwrap();
        let tg = Grid1D::time(0.0025, 201).unwrap();
        let h = SampledFunction::from_real_fn(tg, DomainTag::Time, |t| t * (2.0 * t).cos()).unwrap();
        let spectral = boundary_forcing(&plan, &h, &tg).unwrap();
        let origin = g.index_of(0.0).unwrap();
        let picks: Vec<usize> = (0..6).map(|m| origin + 4 * m).collect();
        let xg = Grid1D::with_spacing(0.0, 4.0 * g.spacing(), picks.len()).unwrap();
        let direct = forcing_term(&h, &xg, &tg).unwrap();
        let scale = direct.max_abs();
        for n in 0..tg.len() {
            for (m, &i) in picks.iter().enumerate() {
                let d = (spectral.at(n, i) - direct.at(n, m)).norm();
                assert!(d < 1e-3 * scale, "t = {}, x = {}: {d:e}", tg.node(n), xg.node(m));
            }
        }
    }

    #[test]
    fn spectral_forcing_trace_matches_fractional_integral() {
        use rand::{Rng, SeedableRng};
        let g = Grid1D::periodic_box(40.0, 2048).unwrap();
        let sponge = Some(Sponge { width: 10.0, strength: 1000.0 });
        let plan = PropagatorPlan::with_options(g, PlanOptions { sponge, ..Default::default() }).unwrap();
        let tg = Grid1D::time(0.005, 201).unwrap();
        let origin = g.index_of(0.0).unwrap();
        let scale = constant_ca() * gamma_function(2.0 / 3.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let h = SampledFunction::from_real_fn(tg, DomainTag::Time, |t| {
                a[0] + a[1] * t + a[2] * (3.0 * t).sin() + a[3] * (-t * t).exp()
            })
            .unwrap();
            let w = boundary_forcing(&plan, &h, &tg).unwrap();
            let want = riemann_liouville(&h, 2.0 / 3.0).unwrap();
            let top = (0..tg.len()).map(|n| w.at(n, origin).norm()).fold(0.0, f64::max);
            let err = (0..tg.len())
                .map(|n| (w.at(n, origin) - want.values()[n] * scale).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-3 * top, "trace mismatch {:e}", err / top);
        }
    }

    #[test]
    fn sponge_removes_wrapped_waves() {
        let g = Grid1D::periodic_box(40.0, 2048).unwrap();
        let tg = Grid1D::time(0.005, 201).unwrap();
        let origin = g.index_of(0.0).unwrap();
        let h = SampledFunction::from_real_fn(tg, DomainTag::Time, |t| t.cbrt()).unwrap();
        let want = riemann_liouville(&h, 2.0 / 3.0).unwrap().scale(constant_ca() * gamma_function(2.0 / 3.0).unwrap());
        let error = |sponge| {
            let plan = PropagatorPlan::with_options(g, PlanOptions { sponge, ..Default::default() }).unwrap();
            let w = boundary_forcing(&plan, &h, &tg).unwrap();
            (0..tg.len()).map(|n| (w.at(n, origin) - want.values()[n]).norm()).fold(0.0, f64::max) / want.max_abs()
        };
        let bare = error(None);
        let damped = error(Some(Sponge { width: 10.0, strength: 1000.0 }));
        assert!(bare > 1e-4, "{bare:e}");
        assert!(damped < 1e-6, "{damped:e}");
    }

    #[test]
    fn damped_group_field_matches_the_group_away_from_the_seam() {
        let g = Grid1D::periodic_box(40.0, 1024).unwrap();
        let sponge = Some(Sponge { width: 10.0, strength: 1000.0 });
        let plan = PropagatorPlan::with_options(g, PlanOptions { sponge, ..Default::default() }).unwrap();
        let phi = SampledFunction::from_real_fn(g, DomainTag::Space, |x| (-x * x / 4.0).exp()).unwrap();
        let tg = Grid1D::time(0.01, 31).unwrap();
        let field = group_field(&plan, &phi, &tg).unwrap();
        let exact = group_apply(&plan, &phi, 0.3).unwrap();
        for i in 0..g.len() {
            if g.node(i).abs() < 15.0 {
                assert!((field.at(30, i) - exact.values()[i]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn duhamel_reproduces_the_closed_form_per_mode() {
        let g = Grid1D::periodic_box(8.0, 64).unwrap();
        let plan = PropagatorPlan::new(g).unwrap();
        let tg = Grid1D::time(0.01, 51).unwrap();
        let xi0 = plan.wavenumbers()[2];
        let src = SpaceTimeField::from_fn(g, tg, |x, _| Complex64::from_polar(1.0, xi0 * x)).unwrap();
        let w = duhamel_inhomogeneous(&plan, &src, &tg).unwrap();
        let a = xi0.powi(3);
        for n in 0..tg.len() {
            let t = tg.node(n);
            let factor = (Complex64::new(0.0, a * t).exp() - 1.0) / Complex64::new(0.0, a);
            for i in 0..g.len() {
                let want = Complex64::from_polar(1.0, xi0 * g.node(i)) * factor;
                assert!((w.at(n, i) - want).norm() < 1e-12);
            }
        }
        let zero = SpaceTimeField::zeros(g, tg);
        assert_eq!(duhamel_inhomogeneous(&plan, &zero, &tg).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn duhamel_is_second_order_in_time() {
        let g = Grid1D::periodic_box(8.0, 64).unwrap();
        let plan = PropagatorPlan::new(g).unwrap();
        let xi0 = plan.wavenumbers()[3];
        let a = xi0.powi(3);
        // ∫_0^T e^{ia(T-s)} cos(s) ds
        let exact = |t: f64| {
            let i = Complex64::new(0.0, 1.0);
            let e = (i * a * t).exp();
            (i * a * e - i * a * t.cos() + t.sin()) / (1.0 - a * a)
        };
        let mut samples = Vec::new();
        for steps in [20usize, 40, 80, 160] {
            let tg = Grid1D::time(1.0 / steps as f64, steps + 1).unwrap();
            let src = SpaceTimeField::from_fn(g, tg, |x, t| Complex64::from_polar(t.cos(), xi0 * x)).unwrap();
            let w = duhamel_inhomogeneous(&plan, &src, &tg).unwrap();
            let origin = g.index_of(0.0).unwrap();
            samples.push((1.0 / steps as f64, (w.at(steps, origin) - exact(1.0)).norm()));
        }
        let order = crate::diagnostics::convergence_order(&samples).unwrap();
        assert!(order >= 1.9, "order {order}: {samples:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn group_preserves_l2(values in prop::collection::vec(-1.0f64..1.0, 64), t in -3.0f64..3.0) {
            let g = Grid1D::periodic_box(5.0, 64).unwrap();
            let plan = PropagatorPlan::new(g).unwrap();
            let phi = SampledFunction::from_real(g, values, DomainTag::Space).unwrap();
            let moved = group_apply(&plan, &phi, t).unwrap();
            let (a, b) = (l2_norm(&phi), l2_norm(&moved));
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
        }

        #[test]
        fn duhamel_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = Grid1D::periodic_box(5.0, 32).unwrap();
            let tg = Grid1D::time(0.05, 9).unwrap();
            let plan = PropagatorPlan::new(g).unwrap();
            let r1: Vec<Complex64> = (0..32 * 9).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
            let r2: Vec<Complex64> = (0..32 * 9).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
            let h1 = SpaceTimeField::new(g, tg, r1).unwrap();
            let h2 = SpaceTimeField::new(g, tg, r2).unwrap();
            let combo = h1.axpby(a, &h2, b).unwrap();
            let lhs = duhamel_inhomogeneous(&plan, &combo, &tg).unwrap();
            let rhs = duhamel_inhomogeneous(&plan, &h1, &tg).unwrap()
                .axpby(a, &duhamel_inhomogeneous(&plan, &h2, &tg).unwrap(), b).unwrap();
            for (x, y) in lhs.values().iter().zip(rhs.values()) {
                prop_assert!((x - y).norm() < 1e-13);
            }
        }
    }
}
