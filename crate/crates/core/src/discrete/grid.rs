use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform grid `start + i * spacing`, `i = 0..n`.
///
/// A periodic box is represented by the grid of its `n` distinct nodes: the
/// right end of the period is not a node, so `period() = n * spacing`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    start: f64,
    end: f64,
    n: usize,
    spacing: f64,
}

impl Grid1D {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        if !start.is_finite() || !end.is_finite() || end <= start {
            return Err(Error::InvalidGrid(format!(
                "need finite start < end, got [{start}, {end}]"
            )));
        }
        Ok(Self {
            start,
            end,
            n,
            spacing: (end - start) / (n - 1) as f64,
        })
    }

    pub fn with_spacing(start: f64, spacing: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        if !start.is_finite() || !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "need finite start and positive spacing, got {start}, {spacing}"
            )));
        }
        Ok(Self {
            start,
            end: start + (n - 1) as f64 * spacing,
            n,
            spacing,
        })
    }

    /// The `n` nodes of the periodic box `[-L, L)`; `n` must be even so that
    /// `x = 0` is the node `n / 2`.
    pub fn periodic_box(half_width: f64, n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "periodic box needs an even node count >= 4, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!("box half-width must be positive, got {half_width}")));
        }
        Self::with_spacing(-half_width, 2.0 * half_width / n as f64, n)
    }

    /// `n` nodes starting at 0 with the given step.
    pub fn time(step: f64, n: usize) -> Result<Self> {
        Self::with_spacing(0.0, step, n)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Length of one period when the grid is read as a periodic box.
    pub fn period(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.period()
    }

    /// Index of the node at `x`, if `x` is a node up to a relative tolerance
    /// of `1e-9` of the spacing.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let r = (x - self.start) / self.spacing;
        let i = r.round();
        if i < 0.0 || i >= self.n as f64 || (r - i).abs() > 1e-9 {
            return None;
        }
        Some(i as usize)
    }

    /// First node with `x >= 0` (up to node tolerance) and the node count from there.
    pub fn nonnegative_range(&self) -> Option<std::ops::Range<usize>> {
        let first = (0..self.n).find(|&i| self.node(i) >= -1e-9 * self.spacing)?;
        Some(first..self.n)
    }

    /// Same spacing up to relative tolerance `1e-12`.
    pub fn same_spacing(&self, other: &Grid1D) -> bool {
        (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing.max(other.spacing)
    }

    /// The first `m` nodes of this grid.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m > self.n {
            return Err(Error::InvalidGrid(format!("prefix of {m} nodes from a {}-node grid", self.n)));
        }
        Self::with_spacing(self.start, self.spacing, m)
    }
}
