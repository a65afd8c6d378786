use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest node count on an active axis (width of the one-sided stencils).
pub const MIN_AXIS_NODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dims: [usize; 3],
    spacing: [f64; 3],
    origin: [f64; 3],
}

impl Grid {
    /// Axes with one node are inactive; every other axis needs at least
    /// [`MIN_AXIS_NODES`] nodes.
    pub fn new(dims: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Result<Grid> {
        for axis in 0..3 {
            let n = dims[axis];
            if n == 0 || (n > 1 && n < MIN_AXIS_NODES) {
                return Err(Error::Config(format!(
                    "axis {axis} has {n} nodes; active axes need at least {MIN_AXIS_NODES}"
                )));
            }
            if !(spacing[axis] > 0.0 && spacing[axis].is_finite()) {
                return Err(Error::Config(format!(
                    "axis {axis} spacing must be positive, got {}",
                    spacing[axis]
                )));
            }
            if !origin[axis].is_finite() {
                return Err(Error::Config(format!("axis {axis} origin is not finite")));
            }
        }
        if dims.iter().all(|&n| n == 1) {
            return Err(Error::Config("grid has no active axis".into()));
        }
        Ok(Grid { dims, spacing, origin })
    }

    /// Grid whose active axes span `[lo[a], hi[a]]` inclusively.
    pub fn spanning(dims: [usize; 3], lo: [f64; 3], hi: [f64; 3]) -> Result<Grid> {
        let mut spacing = [1.0; 3];
        let mut origin = [0.0; 3];
        for a in 0..3 {
            if dims[a] > 1 {
                if !(hi[a] > lo[a]) {
                    return Err(Error::Config(format!("axis {a}: empty extent [{}, {}]", lo[a], hi[a])));
                }
                spacing[a] = (hi[a] - lo[a]) / (dims[a] - 1) as f64;
                origin[a] = lo[a];
            }
        }
        Grid::new(dims, spacing, origin)
    }

    pub fn line(n: usize, lo: f64, hi: f64) -> Result<Grid> {
        Grid::spanning([n, 1, 1], [lo, 0.0, 0.0], [hi, 0.0, 0.0])
    }

    pub fn square(n: usize, lo: f64, hi: f64) -> Result<Grid> {
        Grid::spanning([n, n, 1], [lo, lo, 0.0], [hi, hi, 0.0])
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Grid> {
        Grid::spanning([n, n, n], [lo; 3], [hi; 3])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_active(&self, axis: usize) -> bool {
        self.dims[axis] > 1
    }

    pub fn ndim(&self) -> usize {
        (0..3).filter(|&a| self.is_active(a)).count()
    }

    /// Largest spacing among the active axes.
    pub fn max_spacing(&self) -> f64 {
        (0..3)
            .filter(|&a| self.is_active(a))
            .map(|a| self.spacing[a])
            .fold(0.0, f64::max)
    }

    /// Volume element over the active axes.
    pub fn cell_volume(&self) -> f64 {
        (0..3).filter(|&a| self.is_active(a)).map(|a| self.spacing[a]).product()
    }

    pub fn strides(&self) -> [usize; 3] {
        [self.dims[1] * self.dims[2], self.dims[2], 1]
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        [i, j, k]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        [
            self.origin[0] + c[0] as f64 * self.spacing[0],
            self.origin[1] + c[1] as f64 * self.spacing[1],
            self.origin[2] + c[2] as f64 * self.spacing[2],
        ]
    }

    /// Node index nearest the geometric centre.
    pub fn center_index(&self) -> usize {
        self.index(self.dims[0] / 2, self.dims[1] / 2, self.dims[2] / 2)
    }

    /// True when the node is at least `width` nodes away from every boundary
    /// of an active axis.
    pub fn is_interior(&self, idx: usize, width: usize) -> bool {
        let c = self.coords(idx);
        (0..3).all(|a| !self.is_active(a) || (c[a] >= width && c[a] + width < self.dims[a]))
    }

    /// True when the node lies on the outer face of an active axis.
    pub fn is_boundary(&self, idx: usize) -> bool {
        !self.is_interior(idx, 1)
    }

    pub fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{what}: grids differ ({:?} vs {:?})",
                self.dims, other.dims
            )))
        }
    }
}
