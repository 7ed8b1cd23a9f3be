//! Riemann–Liouville fractional integrals
//!
//! ```text
//! I_α(h)(t) = (1/Γ(α)) ∫_0^t (t - s)^{α-1} h(s) ds,   0 < α <= 1,
//! ```
//!
//! for time series supported in `t >= 0`, and the negative orders
//! `I_{-α} = (d/dt) ∘ I_{1-α}` that invert them on data with zero trace.
//!
//! The integral uses the product trapezoidal rule: the kernel
//! `(t - s)^{α-1}` is integrated exactly against the piecewise-linear
//! interpolant of `h`, which is second-order accurate for smooth `h` and needs
//! no special treatment of the endpoint singularity.

use serde::{Deserialize, Serialize};

use crate::discrete::{DomainTag, SampledFunction};
use crate::{Complex64, Error, Result};

/// An order `α ∈ [-1, 1]` of the Riemann–Liouville family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("fractional order {alpha} outside [-1, 1]")));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    /// Applies `I_α`: integral for `α > 0`, identity at 0, derivative below.
    pub fn apply(self, h: &SampledFunction) -> Result<SampledFunction> {
        let alpha = self.0;
        if alpha > 0.0 {
            riemann_liouville(h, alpha)
        } else if alpha == 0.0 {
            Ok(h.clone())
        } else if alpha > -1.0 {
            fractional_derivative(h, -alpha)
        } else {
            check_time_series(h, 5)?;
            let values: Vec<f64> = h.values().iter().map(|v| v.re).collect();
            let im: Vec<f64> = h.values().iter().map(|v| v.im).collect();
            let re_d = differentiate(&values, h.grid().spacing());
            let im_d = differentiate(&im, h.grid().spacing());
            SampledFunction::new(
                *h.grid(),
                re_d.into_iter().zip(im_d).map(|(a, b)| Complex64::new(a, b)).collect(),
                DomainTag::Time,
            )
        }
    }
}

/// `Γ(x)` for `x > 0`, relative error below `1e-12` on `(0, 10]`.
pub fn gamma_function(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma function needs x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

fn check_time_series(h: &SampledFunction, min_nodes: usize) -> Result<()> {
    let g = h.grid();
    if g.start().abs() > 1e-9 * g.spacing() {
        return Err(Error::InvalidArgument(format!(
            "time series must start at t = 0, starts at {}",
            g.start()
        )));
    }
    if g.len() < min_nodes {
        return Err(Error::InvalidArgument(format!(
            "need at least {min_nodes} time nodes, got {}",
            g.len()
        )));
    }
    Ok(())
}

/// `(k+1)^p - 2k^p + (k-1)^p` without cancellation for large `k`.
fn second_difference(k: usize, p: f64) -> f64 {
    let kf = k as f64;
    if k < 8 {
        (kf + 1.0).powf(p) - 2.0 * kf.powf(p) + (kf - 1.0).powf(p)
    } else {
        let u = 1.0 / kf;
        kf.powf(p) * ((p * u.ln_1p()).exp_m1() + (p * (-u).ln_1p()).exp_m1())
    }
}

/// `(n-1)^p - (n-p) n^{p-1}`, the weight of the first node.
fn first_weight(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if n < 8 {
        (nf - 1.0).powf(p) - (nf - p) * nf.powf(p - 1.0)
    } else {
        nf.powf(p - 1.0) * (nf * (p * (-1.0 / nf).ln_1p()).exp_m1() + p)
    }
}

/// Product-trapezoid weights for order `alpha` on `n` nodes: the Toeplitz
/// part `interior[k]` multiplies `h_{m}` with `k = n - m`, and `first[n]`
/// multiplies `h_0`.
pub(crate) struct RlWeights {
    interior: Vec<f64>,
    first: Vec<f64>,
    scale: f64,
}

impl RlWeights {
    pub(crate) fn new(alpha: f64, step: f64, n: usize) -> Result<Self> {
        let p = alpha + 1.0;
        let interior = (0..n).map(|k| if k == 0 { 1.0 } else { second_difference(k, p) }).collect();
        let first = (0..n).map(|k| if k == 0 { 0.0 } else { first_weight(k, p) }).collect();
        Ok(Self {
            interior,
            first,
            scale: step.powf(alpha) / gamma_function(alpha + 2.0)?,
        })
    }

    pub(crate) fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        (0..h.len())
            .map(|n| {
                if n == 0 {
                    return zero;
                }
                let mut acc = h[0] * self.first[n];
                for m in 1..=n {
                    acc += h[m] * self.interior[n - m];
                }
                acc * self.scale
            })
            .collect()
    }

    /// Solves `apply(h) = r` by forward substitution with `h_0 = 0`.
    pub(crate) fn solve(&self, r: &[Complex64]) -> Vec<Complex64> {
        let mut h = vec![Complex64::new(0.0, 0.0); r.len()];
        let pivot = self.interior[0] * self.scale;
        for n in 1..r.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 1..n {
                acc += h[m] * self.interior[n - m];
            }
            h[n] = (r[n] - acc * self.scale) / pivot;
        }
        h
    }
}

/// `I_α(h)` for `0 < α <= 1` on the grid of `h`, which must start at `t = 0`.
pub fn riemann_liouville(h: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !(alpha > 0.0) || alpha > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "fractional integral order must lie in (0, 1], got {alpha}; use fractional_derivative for negative orders"
        )));
    }
    check_time_series(h, 2)?;
    let weights = RlWeights::new(alpha, h.grid().spacing(), h.grid().len())?;
    SampledFunction::new(*h.grid(), weights.apply(h.values()), DomainTag::Time)
}

/// Inverse of the discrete [`riemann_liouville`] map of order `alpha`: the
/// samples `h` with `h(0) = 0` whose product-trapezoid integral reproduces
/// `r` at every node. For smooth `r` with `r(0) = 0` this is a second
/// alternative to [`fractional_derivative`] and agrees with it to the
/// discretization error.
pub fn invert_riemann_liouville(r: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !(alpha > 0.0) || alpha > 1.0 {
        return Err(Error::InvalidArgument(format!("inversion order must lie in (0, 1], got {alpha}")));
    }
    check_time_series(r, 2)?;
    let limit = 1e-8 * r.max_abs();
    let trace = r.values()[0].norm();
    if trace > limit {
        return Err(Error::NonZeroTrace { value: trace, limit });
    }
    let weights = RlWeights::new(alpha, r.grid().spacing(), r.grid().len())?;
    SampledFunction::new(*r.grid(), weights.solve(r.values()), DomainTag::Time)
}

/// Derivative of uniformly sampled data: fourth-order one-sided at the first
/// node, centred inside, second-order backward at the last node.
fn differentiate(g: &[f64], step: f64) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * g[0] + 48.0 * g[1] - 36.0 * g[2] + 16.0 * g[3] - 3.0 * g[4]) / (12.0 * step);
    for i in 1..n - 1 {
        d[i] = (g[i + 1] - g[i - 1]) / (2.0 * step);
    }
    d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * step);
    d
}

/// `I_{-α}(f) = (d/dt) I_{1-α}(f)` for `0 < α < 1`.
///
/// `f(0)` must vanish (within `1e-8 max|f|`): on data with a nonzero trace
/// the result is singular at the origin.
pub fn fractional_derivative(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fractional derivative order must lie in (0, 1), got {alpha}"
        )));
    }
    check_time_series(f, 5)?;
    let limit = 1e-8 * f.max_abs();
    let trace = f.values()[0].norm();
    if trace > limit {
        return Err(Error::NonZeroTrace { value: trace, limit });
    }
    let integral = riemann_liouville(f, 1.0 - alpha)?;
    let step = f.grid().spacing();
    let re: Vec<f64> = integral.values().iter().map(|v| v.re).collect();
    let im: Vec<f64> = integral.values().iter().map(|v| v.im).collect();
    let values = differentiate(&re, step)
        .into_iter()
        .zip(differentiate(&im, step))
        .map(|(a, b)| Complex64::new(a, b))
        .collect();
    SampledFunction::new(*f.grid(), values, DomainTag::Time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::Grid1D;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn series(step: f64, t_end: f64, f: impl Fn(f64) -> f64) -> SampledFunction {
        let n = (t_end / step).round() as usize + 1;
        SampledFunction::from_real_fn(Grid1D::time(step, n).unwrap(), DomainTag::Time, f).unwrap()
    }

    fn sup_diff(a: &SampledFunction, b: impl Fn(f64) -> f64, from: f64) -> f64 {
        (0..a.grid().len())
            .filter(|&i| a.grid().node(i) >= from)
            .map(|i| (a.values()[i].re - b(a.grid().node(i))).abs())
            .fold(0.0, f64::max)
    }

    // ln Γ by the Stirling series after shifting the argument past 20.
    fn gamma_oracle(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut z = x;
        while z < 20.0 {
            shift += z.ln();
            z += 1.0;
        }
        let z2 = z * z;
        let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z2 * z2 * z)
            - 1.0 / (1680.0 * z2 * z2 * z2 * z)
            + 1.0 / (1188.0 * z2 * z2 * z2 * z2 * z);
        ((z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift).exp()
    }

    #[test]
    fn gamma_matches_classical_values_and_stirling_oracle() {
        assert!((gamma_function(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gamma_function(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        let g23 = gamma_function(2.0 / 3.0).unwrap();
        assert!((g23 - 1.354117939426400).abs() < 1e-13);
        for i in 1..=100 {
            let x = 0.1 * i as f64;
            let want = gamma_oracle(x);
            let got = gamma_function(x).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "x = {x}: {got} vs {want}");
        }
        assert!(gamma_function(0.0).is_err());
        assert!(gamma_function(-1.5).is_err());
    }

    #[test]
    fn order_one_is_the_cumulative_trapezoid() {
        let h = series(1e-3, 2.0, f64::cos);
        let got = riemann_liouville(&h, 1.0).unwrap();
        let mut acc = 0.0;
        for i in 1..h.grid().len() {
            acc += 0.5 * (h.values()[i - 1].re + h.values()[i].re) * 1e-3;
            assert!((got.values()[i].re - acc).abs() < 1e-13);
        }
        assert!(sup_diff(&got, f64::sin, 0.0) < 1e-6);
    }

    #[test]
    fn constant_and_linear_data_are_integrated_exactly() {
        let g53 = gamma_function(5.0 / 3.0).unwrap();
        let one = series(1e-2, 3.0, |_| 1.0);
        let got = riemann_liouville(&one, 2.0 / 3.0).unwrap();
        assert!(sup_diff(&got, |t| t.powf(2.0 / 3.0) / g53, 0.0) < 1e-12);
        assert!((1.0 / g53 - 1.10774).abs() < 1e-5);

        // I_{1/2}(t) = (4 / (3√π)) t^{3/2}; direct singular quadrature at t = 1.3 with s = t - u²
        let t = 1.3_f64;
        let m = 200_000;
        let du = t.sqrt() / m as f64;
        let direct: f64 = (0..m)
            .map(|i| {
                let u = (i as f64 + 0.5) * du;
                2.0 * (t - u * u)
            })
            .sum::<f64>()
            * du
            / PI.sqrt();
        let closed = 4.0 / (3.0 * PI.sqrt()) * t.powf(1.5);
        assert!((direct - closed).abs() < 1e-9);
        let lin = series(1e-2, 2.0, |t| t);
        let got = riemann_liouville(&lin, 0.5).unwrap();
        assert!(sup_diff(&got, |t| 4.0 / (3.0 * PI.sqrt()) * t.powf(1.5), 0.0) < 1e-12);
        assert!((got.values()[130].re - direct).abs() < 1e-8);
    }

    #[test]
    fn power_law_derivatives() {
        let g53 = gamma_function(5.0 / 3.0).unwrap();
        let g43 = gamma_function(4.0 / 3.0).unwrap();
        assert!((g53 - 0.90275).abs() < 1e-5);
        assert!((1.0 / g43 - 1.11985).abs() < 1e-5);
        let f = series(1e-3, 1.0, |t| t.powf(2.0 / 3.0));
        let d = fractional_derivative(&f, 2.0 / 3.0).unwrap();
        assert!(sup_diff(&d, |_| g53, 0.2) < 1e-3);
        let f = series(1e-3, 1.0, |t| t);
        let d = fractional_derivative(&f, 2.0 / 3.0).unwrap();
        assert!(sup_diff(&d, |t| t.powf(1.0 / 3.0) / g43, 0.1) < 1e-5);
    }

    #[test]
    fn derivative_inverts_the_integral() {
        let h = |t: f64| t * t * (-t).exp();
        let s = series(1e-3, 2.0, h);
        let back = fractional_derivative(&riemann_liouville(&s, 2.0 / 3.0).unwrap(), 2.0 / 3.0).unwrap();
        let err = sup_diff(&back, h, 0.0);
        assert!(err < 5e-4, "round trip error {err}");
    }

    #[test]
    fn discrete_inversion_is_exact_and_matches_power_laws() {
        let h = |t: f64| t * (2.0 * t).cos();
        let s = series(2e-3, 1.0, h);
        let r = riemann_liouville(&s, 2.0 / 3.0).unwrap();
        let back = invert_riemann_liouville(&r, 2.0 / 3.0).unwrap();
        assert!(sup_diff(&back, h, 0.0) < 1e-12);
        let f = series(1e-3, 1.0, |t| t);
        let g43 = gamma_function(4.0 / 3.0).unwrap();
        let d = invert_riemann_liouville(&f, 2.0 / 3.0).unwrap();
        assert!(sup_diff(&d, |t| t.powf(1.0 / 3.0) / g43, 0.1) < 1e-4);
        assert!(invert_riemann_liouville(&series(0.1, 1.0, |t| 1.0 + t), 0.5).is_err());
    }

    #[test]
    fn semigroup_and_left_inverse_converge_under_refinement() {
        let h = |t: f64| t * t * (-t).exp();
        let mut semi = Vec::new();
        let mut inv = Vec::new();
        for step in [4e-3, 2e-3, 1e-3, 5e-4] {
            let s = series(step, 2.0, h);
            let twice = riemann_liouville(&riemann_liouville(&s, 1.0 / 3.0).unwrap(), 1.0 / 3.0).unwrap();
            let once = riemann_liouville(&s, 2.0 / 3.0).unwrap();
            let e = twice.values().iter().zip(once.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            semi.push((step, e));
            let back = fractional_derivative(&riemann_liouville(&s, 0.5).unwrap(), 0.5).unwrap();
            inv.push((step, sup_diff(&back, h, 0.0)));
        }
        let semi_order = crate::diagnostics::convergence_order(&semi).unwrap();
        let inv_order = crate::diagnostics::convergence_order(&inv).unwrap();
        assert!(semi_order >= 1.9, "semigroup order {semi_order}: {semi:?}");
        assert!(inv_order >= 1.0, "left-inverse order {inv_order}: {inv:?}");
    }

    #[test]
    fn rejects_invalid_orders_and_nonzero_trace() {
        let s = series(0.1, 1.0, |t| 1.0 + t);
        assert!(riemann_liouville(&s, 0.0).is_err());
        assert!(riemann_liouville(&s, -0.3).is_err());
        assert!(riemann_liouville(&s, 1.2).is_err());
        assert!(fractional_derivative(&s, 1.0).is_err());
        assert!(matches!(fractional_derivative(&s, 0.5), Err(Error::NonZeroTrace { .. })));
        assert!(FractionalOrder::new(1.5).is_err());
    }

    #[test]
    fn order_dispatch() {
        let s = series(1e-3, 1.0, |t| t * t);
        let plus = FractionalOrder::new(1.0).unwrap().apply(&s).unwrap();
        assert!(sup_diff(&plus, |t| t.powi(3) / 3.0, 0.0) < 1e-6);
        assert_eq!(FractionalOrder::new(0.0).unwrap().apply(&s).unwrap(), s);
        let minus = FractionalOrder::new(-1.0).unwrap().apply(&s).unwrap();
        assert!(sup_diff(&minus, |t| 2.0 * t, 0.0) < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn positivity_and_linearity(
            a in prop::collection::vec(0.0f64..1.0, 40),
            b in prop::collection::vec(-1.0f64..1.0, 40),
            alpha in 0.05f64..1.0,
            ca in -3.0f64..3.0,
            cb in -3.0f64..3.0,
        ) {
            let g = Grid1D::time(0.05, 40).unwrap();
            let fa = SampledFunction::from_real(g, a.clone(), DomainTag::Time).unwrap();
            let fb = SampledFunction::from_real(g, b.clone(), DomainTag::Time).unwrap();
            let ia = riemann_liouville(&fa, alpha).unwrap();
            prop_assert!(ia.values().iter().all(|v| v.re >= 0.0));
            let ib = riemann_liouville(&fb, alpha).unwrap();
            let combo = SampledFunction::from_real(g, a.iter().zip(&b).map(|(x, y)| ca * x + cb * y).collect(), DomainTag::Time).unwrap();
            let ic = riemann_liouville(&combo, alpha).unwrap();
            for i in 0..40 {
                let want = ia.values()[i] * ca + ib.values()[i] * cb;
                prop_assert!((ic.values()[i] - want).norm() <= 1e-14 * (1.0 + want.norm()) * 10.0);
            }
        }
    }
}
