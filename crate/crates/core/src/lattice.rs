//! Real functions sampled on a uniform arc-length grid.
//!
//! `SampledFunction` is the lattice element everything else manipulates:
//! squared-speed profiles, envelopes, acceleration bounds and curvature.
//! Meet and join are the pointwise `min`/`max`, which are exact in floating
//! point, so the lattice laws hold bit-for-bit.

use std::fmt;

use crate::error::{Error, Result};

/// Uniform grid `s_i = i·h`, `i = 0..=n`, over `[0, s_f]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    s_f: f64,
    n: usize,
}

impl Grid {
    pub fn new(s_f: f64, n: usize) -> Result<Self> {
        if !(s_f.is_finite() && s_f > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {s_f}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 intervals, got {n}"
            )));
        }
        Ok(Self { s_f, n })
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.s_f
    }

    /// Number of intervals.
    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.s_f / self.n as f64
    }

    /// Arc-length coordinate of point `i`. The last point is exactly `s_f`.
    pub fn point(&self, i: usize) -> f64 {
        if i == self.n {
            self.s_f
        } else {
            i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.point(i))
    }

    fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[0, {}] with {} intervals", self.s_f, self.n)
    }
}

/// A function sampled at every point of a [`Grid`]. All samples are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `‖f‖∞` over the samples.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Default comparison tolerance, `1e-9 · max(1, ‖f‖∞)`.
    pub fn default_tolerance(&self) -> f64 {
        1e-9 * self.sup_norm().max(1.0)
    }

    /// Errors unless both functions live on the same grid.
    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)
    }

    /// Pointwise minimum `f ∧ g`.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    /// Pointwise maximum `f ∨ g`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    /// `f ≤ g + eps` at every grid point.
    pub fn leq(&self, other: &Self, eps: f64) -> Result<bool> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| *a <= *b + eps))
    }

    /// `max_i |f(s_i) − g(s_i)|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Forward differences `(f_{i+1} − f_i)/h`; the last entry repeats the
    /// one before it.
    pub fn derivative(&self) -> Self {
        let h = self.grid.step();
        let mut d: Vec<f64> = self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        d.push(d[d.len() - 1]);
        Self {
            grid: self.grid,
            values: d,
        }
    }

    /// Piecewise-linear interpolation; `s` is clamped to `[0, s_f]`.
    pub fn interpolate(&self, s: f64) -> f64 {
        let h = self.grid.step();
        let x = (s / h).clamp(0.0, self.grid.n as f64);
        let i = (x.floor() as usize).min(self.grid.n - 1);
        let t = x - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().copied().map(f).collect())
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for SampledFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}
