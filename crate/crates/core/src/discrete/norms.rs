use std::f64::consts::PI;

use super::{forward_transform, SampledFunction};
use crate::{Error, Result};

/// Discrete `H^s` (or `Ḣ^s` when `homogeneous`) norm,
/// `(2π Σ_j w(ξ_j)^{2s} |f̂_j|² Δξ)^{1/2}` with `w = 1 + |ξ|` or `|ξ|`.
///
/// The factor `2π` makes `s = 0` agree with the discrete `L²` norm.
pub fn sobolev_norm(f: &SampledFunction, s: f64, homogeneous: bool) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("Sobolev index must be finite, got {s}")));
    }
    let spec = forward_transform(f)?;
    let dxi = spec.dxi();
    let total: f64 = spec.coefficients().iter().map(|c| c.norm_sqr()).sum();
    let mut acc = 0.0;
    for (&xi, c) in spec.wavenumbers().iter().zip(spec.coefficients()) {
        let power = c.norm_sqr();
        let weight = if homogeneous {
            if xi == 0.0 {
                if s < 0.0 {
                    if power > 1e-24 * total {
                        return Err(Error::InvalidArgument(format!(
                            "homogeneous norm with s = {s} < 0 is undefined for data with a nonzero mean"
                        )));
                    }
                    continue;
                }
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                xi.abs().powf(2.0 * s)
            }
        } else {
            (1.0 + xi.abs()).powf(2.0 * s)
        };
        acc += weight * power;
    }
    Ok((2.0 * PI * acc * dxi).sqrt())
}

/// Discrete `L²` norm `(Σ |f_k|² Δx)^{1/2}`.
pub fn l2_norm(f: &SampledFunction) -> f64 {
    (f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * f.grid().spacing()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{DomainTag, Grid1D};
    use num_complex::Complex64;

    #[test]
    fn order_zero_is_the_l2_norm() {
        let g = Grid1D::periodic_box(10.0, 256).unwrap();
        let f = SampledFunction::from_real_fn(g, DomainTag::Space, |x| (-(x - 1.0) * (x - 1.0)).exp() + 0.1).unwrap();
        let l2 = l2_norm(&f);
        assert!((sobolev_norm(&f, 0.0, false).unwrap() - l2).abs() < 1e-12 * l2);
        assert!((sobolev_norm(&f, 0.0, true).unwrap() - l2).abs() < 1e-12 * l2);
    }

    #[test]
    fn single_mode_scales_by_frequency_power() {
        let g = Grid1D::periodic_box(4.0, 128).unwrap();
        let xi0 = 2.0 * PI * 5.0 / g.period();
        let f = SampledFunction::from_fn(g, DomainTag::Space, |x| Complex64::from_polar(1.0, xi0 * x)).unwrap();
        let l2 = l2_norm(&f);
        for s in [-1.5, -0.3, 0.5, 1.0, 2.0] {
            let got = sobolev_norm(&f, s, true).unwrap();
            let want = xi0.powf(s) * l2;
            assert!((got - want).abs() < 1e-11 * want, "s = {s}: {got} vs {want}");
        }
    }

    #[test]
    fn negative_homogeneous_order_rejects_mean() {
        let g = Grid1D::periodic_box(4.0, 32).unwrap();
        let f = SampledFunction::from_real_fn(g, DomainTag::Space, |_| 1.0).unwrap();
        assert!(sobolev_norm(&f, -0.5, true).is_err());
        assert!(sobolev_norm(&f, -0.5, false).is_ok());
    }

    #[test]
    fn gaussian_h1_norm_matches_quadrature_of_the_analytic_transform() {
        // f̂(ξ) = e^{-ξ²/2}/√(2π); ‖f‖²_{H¹} = ∫ (1+|ξ|)² e^{-ξ²} dξ by midpoint quadrature
        let m = 400_000;
        let h = 20.0 / m as f64;
        let oracle: f64 = (0..m)
            .map(|i| {
                let xi = -10.0 + (i as f64 + 0.5) * h;
                (1.0 + xi.abs()).powi(2) * (-xi * xi).exp()
            })
            .sum::<f64>()
            * h;
        assert!((oracle - (1.5 * PI.sqrt() + 2.0)).abs() < 1e-8);
        let g = Grid1D::periodic_box(20.0, 1024).unwrap();
        let f = SampledFunction::from_real_fn(g, DomainTag::Space, |x| (-0.5 * x * x).exp()).unwrap();
        let got = sobolev_norm(&f, 1.0, false).unwrap().powi(2);
        // the lattice sum sees the kink of |ξ| at 0: Euler–Maclaurin corrections
        let dxi = PI / 20.0;
        let lattice = oracle - dxi.powi(2) / 3.0 - dxi.powi(4) / 30.0;
        assert!((got - lattice).abs() < 1e-6 * oracle, "{got} vs {lattice}");
    }
}
