//! Periodic one-dimensional grids and physical constants.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Uniform periodic grid on `[x_min, x_max)`; point `n` is identified with
/// point `0`. The point count must be a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1 {
    n: usize,
    x_min: f64,
    x_max: f64,
    spacing: f64,
}

impl Grid1 {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo { n });
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidDomain { min: x_min, max: x_max });
        }
        let spacing = (x_max - x_min) / n as f64;
        Ok(Self { n, x_min, x_max, spacing })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Coordinate of grid point `j`.
    pub fn point(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing
    }

    /// All grid coordinates.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x < self.x_max
    }

    /// Index of the grid point nearest to `x` (periodic wrap at the seam).
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = libm::round((x - self.x_min) / self.spacing) as i64;
        j.rem_euclid(self.n as i64) as usize
    }

    /// Cell index and fractional offset for interpolation, periodic.
    pub fn cell_fraction(&self, x: f64) -> (usize, f64) {
        let t = (x - self.x_min) / self.spacing;
        let j = libm::floor(t) as i64;
        let frac = t - j as f64;
        (j.rem_euclid(self.n as i64) as usize, frac)
    }
}

/// Planck constant and particle masses. Defaults to natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass_x: f64,
    pub mass_y: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { hbar: 1.0, mass_x: 1.0, mass_y: 1.0 }
    }
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass_x: f64, mass_y: f64) -> Result<Self> {
        for (name, value) in [("hbar", hbar), ("mass_x", mass_x), ("mass_y", mass_y)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParam { name, value });
            }
        }
        Ok(Self { hbar, mass_x, mass_y })
    }
}
