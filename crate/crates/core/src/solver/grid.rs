use serde::{Deserialize, Serialize};

use super::SolverError;

/// Staggered radial mesh: cell centres `r_j = (j + 1/2) h`, `j = 0..cells`, on `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    h: f64,
    cells: usize,
}

impl RadialGrid {
    pub fn new(h: f64, cells: usize) -> Result<Self, SolverError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(SolverError::InvalidGrid(format!("cell width must be positive, got {h}")));
        }
        if cells < 8 {
            return Err(SolverError::InvalidGrid(format!("need at least 8 cells, got {cells}")));
        }
        Ok(RadialGrid { h, cells })
    }

    /// Grid of width `h` covering `[0, radius]`; `radius / h` must be (close to) an integer.
    pub fn with_radius(radius: f64, h: f64) -> Result<Self, SolverError> {
        let cells = (radius / h).round();
        if (cells * h - radius).abs() > 1e-9 * radius {
            return Err(SolverError::InvalidGrid(format!(
                "radius {radius} is not a whole number of cells of width {h}"
            )));
        }
        Self::new(h, cells as usize)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn radius(&self) -> f64 {
        self.cells as f64 * self.h
    }

    #[inline]
    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.cells).map(|j| self.r(j)).collect()
    }

    /// Index of the last cell centre `<= r`, if any.
    pub fn last_index_within(&self, r: f64) -> Option<usize> {
        if r < 0.5 * self.h {
            return None;
        }
        Some((((r / self.h) - 0.5 + 1e-9).floor() as usize).min(self.cells - 1))
    }
}
