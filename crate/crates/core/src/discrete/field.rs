use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Grid1D;
use crate::{Error, Result};

/// Whether a sampled function lives on a space or a time axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainTag {
    Space,
    Time,
}

/// Complex samples of a function of one variable on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid1D,
    values: Vec<Complex64>,
    tag: DomainTag,
}

fn check_finite(what: &'static str, values: &[Complex64]) -> Result<()> {
    match values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}

impl SampledFunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, tag: DomainTag) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        check_finite("sampled function", &values)?;
        Ok(Self { grid, values, tag })
    }

    pub fn from_real(grid: Grid1D, values: Vec<f64>, tag: DomainTag) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), tag)
    }

    pub fn from_fn(grid: Grid1D, tag: DomainTag, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect(), tag)
    }

    pub fn from_real_fn(grid: Grid1D, tag: DomainTag, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_real(grid, grid.nodes().into_iter().map(f).collect(), tag)
    }

    pub fn zeros(grid: Grid1D, tag: DomainTag) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            tag,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn tag(&self) -> DomainTag {
        self.tag
    }

    pub fn with_tag(mut self, tag: DomainTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Node-wise map producing a new function on the same grid.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.node(i), v))
            .collect();
        Self::new(self.grid, values, self.tag)
    }

    /// Node-wise product with another function on the same grid.
    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            tag: self.tag,
        }
    }

    fn zip(&self, other: &SampledFunction, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("node-wise operation on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Self::new(self.grid, values, self.tag)
    }

    /// The first `m` samples, on the corresponding prefix grid.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        let grid = self.grid.prefix(m)?;
        Ok(Self {
            grid,
            values: self.values[..m].to_vec(),
            tag: self.tag,
        })
    }
}

/// Values `u(x_i, t_n)` stored row-major as `[time][space]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    xgrid: Grid1D,
    tgrid: Grid1D,
    values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn new(xgrid: Grid1D, tgrid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != xgrid.len() * tgrid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {} x {} space-time grid",
                values.len(),
                tgrid.len(),
                xgrid.len()
            )));
        }
        check_finite("space-time field", &values)?;
        Ok(Self { xgrid, tgrid, values })
    }

    pub fn zeros(xgrid: Grid1D, tgrid: Grid1D) -> Self {
        Self {
            xgrid,
            tgrid,
            values: vec![Complex64::new(0.0, 0.0); xgrid.len() * tgrid.len()],
        }
    }

    /// Builds a field from one row per time node.
    pub fn from_rows(xgrid: Grid1D, tgrid: Grid1D, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        if rows.len() != tgrid.len() || rows.iter().any(|r| r.len() != xgrid.len()) {
            return Err(Error::GridMismatch("row shape does not match the grids".into()));
        }
        Self::new(xgrid, tgrid, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(xgrid: Grid1D, tgrid: Grid1D, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(xgrid.len() * tgrid.len());
        for n in 0..tgrid.len() {
            let t = tgrid.node(n);
            values.extend((0..xgrid.len()).map(|i| f(xgrid.node(i), t)));
        }
        Self::new(xgrid, tgrid, values)
    }

    pub fn xgrid(&self) -> &Grid1D {
        &self.xgrid
    }

    pub fn tgrid(&self) -> &Grid1D {
        &self.tgrid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, n: usize) -> &[Complex64] {
        let nx = self.xgrid.len();
        &self.values[n * nx..(n + 1) * nx]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [Complex64] {
        let nx = self.xgrid.len();
        &mut self.values[n * nx..(n + 1) * nx]
    }

    pub fn at(&self, n: usize, i: usize) -> Complex64 {
        self.values[n * self.xgrid.len() + i]
    }

    /// The time series at spatial node `i`.
    pub fn column(&self, i: usize) -> Vec<Complex64> {
        (0..self.tgrid.len()).map(|n| self.at(n, i)).collect()
    }

    /// The snapshot at time node `n` as a sampled function of space.
    pub fn snapshot(&self, n: usize) -> SampledFunction {
        SampledFunction {
            grid: self.xgrid,
            values: self.row(n).to_vec(),
            tag: DomainTag::Space,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            xgrid: self.xgrid,
            tgrid: self.tgrid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `a * self + b * other` on identical grids.
    pub fn axpby(&self, a: f64, other: &SpaceTimeField, b: f64) -> Result<Self> {
        if self.xgrid != other.xgrid || self.tgrid != other.tgrid {
            return Err(Error::GridMismatch("combining fields on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| u * a + v * b)
            .collect();
        Ok(Self {
            xgrid: self.xgrid,
            tgrid: self.tgrid,
            values,
        })
    }

    /// Multiplies row `n` by `weights[n]`.
    pub fn scale_rows(&mut self, weights: &[f64]) {
        let nx = self.xgrid.len();
        for (row, &w) in self.values.chunks_mut(nx).zip(weights) {
            row.iter_mut().for_each(|v| *v *= w);
        }
    }
}
