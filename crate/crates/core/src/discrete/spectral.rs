use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{DomainTag, Grid1D, SampledFunction};
use crate::{Error, Result};

/// Discrete Fourier coefficients `f̂(ξ_j)` of a sampled function, in FFT
/// order: `j = 0, 1, .., n/2 - 1, -n/2, .., -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    base_grid: Grid1D,
    tag: DomainTag,
    wavenumbers: Vec<f64>,
    coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn base_grid(&self) -> &Grid1D {
        &self.base_grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// Lattice spacing `Δξ = 2π / period`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.base_grid.period()
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }
}

/// Cached forward/inverse FFT plans for one grid size, applying the
/// library's Fourier convention.
#[derive(Clone)]
pub struct Transformer {
    grid: Grid1D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    // e^{-i x_0 ξ_j}
    shift: Vec<Complex64>,
}

impl std::fmt::Debug for Transformer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transformer").field("grid", &self.grid).finish()
    }
}

/// Signed lattice index of FFT slot `j`.
pub(crate) fn signed_index(j: usize, n: usize) -> i64 {
    if j < n.div_ceil(2) {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

impl Transformer {
    pub fn new(grid: Grid1D) -> Self {
        let n = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let period = grid.period();
        let offset = grid.start() / period;
        let mut wavenumbers = Vec::with_capacity(n);
        let mut shift = Vec::with_capacity(n);
        for j in 0..n {
            let m = signed_index(j, n);
            wavenumbers.push(2.0 * PI * m as f64 / period);
            // phase -2π m x_0 / period reduced to one turn before exponentiating
            let turns = (m as f64 * offset).rem_euclid(1.0);
            shift.push(Complex64::from_polar(1.0, -2.0 * PI * turns));
        }
        Self {
            grid,
            forward,
            inverse,
            wavenumbers,
            shift,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.grid.period()
    }

    /// Coefficients `c_j` of raw samples.
    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward.process(&mut buf);
        let scale = self.grid.spacing() / (2.0 * PI);
        for (c, s) in buf.iter_mut().zip(&self.shift) {
            *c *= s * scale;
        }
        buf
    }

    /// Samples from coefficients.
    pub fn inverse(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let dxi = self.dxi();
        let mut buf: Vec<Complex64> = coefficients
            .iter()
            .zip(&self.shift)
            .map(|(c, s)| c * s.conj() * dxi)
            .collect();
        self.inverse.process(&mut buf);
        buf
    }

    pub fn transform(&self, f: &SampledFunction) -> Result<SpectralField> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch("transform plan built for a different grid".into()));
        }
        Ok(SpectralField {
            base_grid: self.grid,
            tag: f.tag(),
            wavenumbers: self.wavenumbers.clone(),
            coefficients: self.forward(f.values()),
        })
    }

    pub fn synthesize(&self, field: &SpectralField) -> Result<SampledFunction> {
        if field.base_grid != self.grid {
            return Err(Error::GridMismatch("transform plan built for a different grid".into()));
        }
        SampledFunction::new(self.grid, self.inverse(&field.coefficients), field.tag)
    }
}

/// Fourier coefficients of `f`, treating its grid as one period.
///
/// Any node count is accepted; the FFT backend handles non-power-of-two sizes.
pub fn forward_transform(f: &SampledFunction) -> Result<SpectralField> {
    Transformer::new(*f.grid()).transform(f)
}

pub fn inverse_transform(field: &SpectralField) -> Result<SampledFunction> {
    Transformer::new(field.base_grid).synthesize(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // O(n²) reference DFT in the library convention.
    fn reference_dft(grid: &Grid1D, values: &[Complex64]) -> Vec<Complex64> {
        let n = grid.len();
        let period = grid.period();
        (0..n)
            .map(|j| {
                let xi = 2.0 * PI * signed_index(j, n) as f64 / period;
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * Complex64::from_polar(1.0, -grid.node(k) * xi))
                    .sum::<Complex64>()
                    * (grid.spacing() / (2.0 * PI))
            })
            .collect()
    }

    fn box_grid(n: usize) -> Grid1D {
        Grid1D::periodic_box(5.0, n).unwrap()
    }

    #[test]
    fn constant_goes_to_the_zero_mode() {
        let g = box_grid(32);
        let f = SampledFunction::from_real_fn(g, DomainTag::Space, |_| 1.0).unwrap();
        let c = forward_transform(&f).unwrap();
        // ∫ e^{i x ξ} c dξ = 1 on the lattice means c_0 Δξ = 1
        assert!((c.coefficients()[0] * c.dxi() - 1.0).norm() < 1e-14);
        assert!(c.coefficients()[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn lattice_mode_has_a_single_coefficient() {
        let g = box_grid(64);
        let xi0 = 2.0 * PI * 3.0 / g.period();
        let f = SampledFunction::from_fn(g, DomainTag::Space, |x| Complex64::from_polar(1.0, xi0 * x)).unwrap();
        let c = forward_transform(&f).unwrap();
        for (j, v) in c.coefficients().iter().enumerate() {
            if j == 3 {
                assert!((v * c.dxi() - 1.0).norm() < 1e-13);
            } else {
                assert!(v.norm() < 1e-13, "mode {j}: {v}");
            }
        }
    }

    #[test]
    fn fast_path_matches_reference_dft_for_odd_and_even_sizes() {
        for n in [12usize, 15, 64] {
            let g = Grid1D::with_spacing(-1.3, 0.17, n).unwrap();
            let f = SampledFunction::from_fn(g, DomainTag::Space, |x| {
                Complex64::new((3.0 * x).sin() + x * x, (x - 0.2).cos())
            })
            .unwrap();
            let fast = forward_transform(&f).unwrap();
            let slow = reference_dft(&g, f.values());
            for (a, b) in fast.coefficients().iter().zip(&slow) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    fn random_samples(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip_and_plancherel(values in random_samples(64)) {
            let g = box_grid(64);
            let f = SampledFunction::new(g, values.clone(), DomainTag::Space).unwrap();
            let spec = forward_transform(&f).unwrap();
            let back = inverse_transform(&spec).unwrap();
            let scale = f.max_abs();
            for (a, b) in back.values().iter().zip(&values) {
                prop_assert!((a - b).norm() <= 1e-12 * scale);
            }
            let physical: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.spacing();
            let spectral: f64 = 2.0 * PI * spec.coefficients().iter().map(|v| v.norm_sqr()).sum::<f64>() * spec.dxi();
            prop_assert!((physical - spectral).abs() <= 1e-12 * physical);
        }
    }
}
