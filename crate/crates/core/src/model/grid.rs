use alloc::vec::Vec;

use super::Vec2;
use crate::error::{require_finite, require_positive, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

/// Uniform detector scan grid.
///
/// One-dimensional grids lie on the x axis. Two-dimensional grids are square
/// and stored row-major with row 0 at the largest y, so they print like
/// images. `offset` shifts the grid center along x.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub dim: Dim,
    /// Half-width per axis, meters.
    pub extent: f64,
    pub samples: usize,
    pub offset: f64,
}

impl ScanGrid {
    pub fn new(dim: Dim, extent: f64, samples: usize, offset: f64) -> Result<Self> {
        let g = ScanGrid {
            dim,
            extent,
            samples,
            offset,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn line(extent: f64, samples: usize) -> Result<Self> {
        Self::new(Dim::One, extent, samples, 0.0)
    }

    pub fn square(extent: f64, samples: usize) -> Result<Self> {
        Self::new(Dim::Two, extent, samples, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("grid extent", self.extent)?;
        require_finite("grid offset", self.offset)?;
        if self.samples < 2 {
            return Err(Error::invalid("grid samples", "need at least 2 samples per axis"));
        }
        Ok(())
    }

    /// `2·extent / (samples − 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.samples - 1) as f64
    }

    /// Coordinate of sample `i` along x.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.offset - self.extent + i as f64 * self.spacing()
    }

    /// Coordinate of row `j` (descending).
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.extent - j as f64 * self.spacing()
    }

    /// Sample coordinates along x.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.x(i)).collect()
    }

    pub fn len(&self) -> usize {
        match self.dim {
            Dim::One => self.samples,
            Dim::Two => self.samples * self.samples,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of flat index `k`.
    pub fn point(&self, k: usize) -> Vec2 {
        match self.dim {
            Dim::One => [self.x(k), 0.0],
            Dim::Two => [self.x(k % self.samples), self.y(k / self.samples)],
        }
    }

    pub fn points(&self) -> Vec<Vec2> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Flat indices of the row through y = 0 (the whole grid in 1-D).
    pub fn central_row(&self) -> Vec<usize> {
        match self.dim {
            Dim::One => (0..self.samples).collect(),
            Dim::Two => {
                let j = self.samples / 2;
                (0..self.samples).map(|i| j * self.samples + i).collect()
            }
        }
    }

    /// Largest |ρ| on the grid.
    pub fn max_radius(&self) -> f64 {
        let x = self.offset.abs() + self.extent;
        match self.dim {
            Dim::One => x,
            Dim::Two => libm::hypot(x, self.extent),
        }
    }

    /// Same axes, checked with a relative tolerance.
    pub fn same_axes(&self, other: &ScanGrid) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-12);
        self.dim == other.dim
            && self.samples == other.samples
            && close(self.extent, other.extent)
            && (self.offset - other.offset).abs() <= 1e-12 * self.extent
    }
}
