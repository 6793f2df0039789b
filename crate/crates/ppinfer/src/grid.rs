//! Parameter grids for set-valued estimators.
//!
//! Confidence sets for gridded estimands are reported as the retained subset
//! of an explicit lattice; behavior between grid points is intentionally
//! unspecified.

use crate::error::{Error, Result};

/// One grid axis: `resolution` evenly spaced points including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub low: f64,
    pub high: f64,
    pub resolution: usize,
}

impl GridAxis {
    pub fn new(low: f64, high: f64, resolution: usize) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) {
            return Err(Error::domain("grid bounds must be finite"));
        }
        if low >= high {
            return Err(Error::domain(format!(
                "grid axis low {low} must be below high {high}"
            )));
        }
        if resolution < 2 {
            return Err(Error::domain("grid resolution must be at least 2"));
        }
        Ok(GridAxis { low, high, resolution })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.low + (self.high - self.low) * i as f64 / (self.resolution - 1) as f64
    }

    /// Spacing between adjacent points.
    pub fn cell(&self) -> f64 {
        (self.high - self.low) / (self.resolution - 1) as f64
    }
}

/// A rectangular lattice over one or more coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
}

impl GridSpec {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::domain("grid needs at least one axis"));
        }
        Ok(GridSpec { axes })
    }

    /// One-dimensional grid.
    pub fn linear(low: f64, high: f64, resolution: usize) -> Result<Self> {
        Ok(GridSpec { axes: vec![GridAxis::new(low, high, resolution)?] })
    }

    /// One-dimensional grid spanning the observed predictions, inclusive of
    /// both extremes. Falls back to a small symmetric window when all
    /// predictions coincide.
    pub fn spanning(values: &[f64], resolution: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("cannot build a grid from no values"));
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            return GridSpec::linear(lo - 0.5, hi + 0.5, resolution);
        }
        GridSpec::linear(lo, hi, resolution)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Total number of lattice points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.resolution).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decode a flat lattice index into a point (row-major, first axis
    /// slowest).
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (j, axis) in self.axes.iter().enumerate().rev() {
            out[j] = axis.point(index % axis.resolution);
            index /= axis.resolution;
        }
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
}

/// Retained subset of a grid, carrying the level it was built at.
///
/// An empty retained set is statistically legitimate at level alpha and
/// usually signals a model/assumption conflict; check
/// [`GridSet::is_empty_warning`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridSet {
    pub grid: GridSpec,
    /// Flat lattice indices of retained points, ascending.
    pub retained: Vec<usize>,
    pub level: f64,
}

impl GridSet {
    pub fn new(grid: GridSpec, retained: Vec<usize>, level: f64) -> Self {
        GridSet { grid, retained, level }
    }

    pub fn is_empty_warning(&self) -> bool {
        self.retained.is_empty()
    }

    pub fn retained_points(&self) -> Vec<Vec<f64>> {
        self.retained.iter().map(|&i| self.grid.point(i)).collect()
    }

    /// Retained scalars for one-dimensional grids.
    pub fn retained_scalars(&self) -> Result<Vec<f64>> {
        if self.grid.dim() != 1 {
            return Err(Error::domain("retained_scalars requires a 1-d grid"));
        }
        Ok(self.retained.iter().map(|&i| self.grid.axes[0].point(i)).collect())
    }

    /// Convex hull (min, max) of the retained points of a 1-d grid.
    pub fn hull_1d(&self) -> Result<Option<(f64, f64)>> {
        let pts = self.retained_scalars()?;
        Ok(match (pts.first(), pts.last()) {
            (Some(&lo), Some(&hi)) => Some((lo, hi)),
            _ => None,
        })
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.retained.binary_search(&index).is_ok()
    }
}
