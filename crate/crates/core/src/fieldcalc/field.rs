use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use super::Grid;
use crate::numeric::compensated_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: Grid,
    values: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexScalarField {
    grid: Grid,
    values: Vec<Complex64>,
}

fn check_len(grid: &Grid, len: usize, what: &str) -> Result<()> {
    if grid.len() != len {
        return Err(Error::Shape(format!(
            "{what}: {len} values for a grid of {} nodes",
            grid.len()
        )));
    }
    Ok(())
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len(), "scalar field")?;
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        ScalarField { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField {
            values: vec![c; grid.len()],
            grid,
        }
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

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "scalar zip")?;
        Ok(ScalarField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Riemann sum of the field over the active axes.
    pub fn integral(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) * self.grid.cell_volume()
    }
}

impl VectorField3 {
    pub fn new(grid: Grid, values: Vec<Vector3<f64>>) -> Result<Self> {
        check_len(&grid, values.len(), "vector field")?;
        Ok(VectorField3 { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Vector3<f64>) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        VectorField3 { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        VectorField3::constant(grid, Vector3::zeros())
    }

    pub fn constant(grid: Grid, v: Vector3<f64>) -> Self {
        VectorField3 {
            values: vec![v; grid.len()],
            grid,
        }
    }

    pub(crate) fn from_components(grid: Grid, c: [Vec<f64>; 3]) -> Self {
        let values = (0..grid.len())
            .map(|i| Vector3::new(c[0][i], c[1][i], c[2][i]))
            .collect();
        VectorField3 { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Vector3<f64>] {
        &self.values
    }

    pub fn component(&self, axis: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[axis]).collect()
    }

    pub fn map(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Self {
        VectorField3 {
            grid: self.grid,
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn zip_with(
        &self,
        other: &VectorField3,
        f: impl Fn(&Vector3<f64>, &Vector3<f64>) -> Vector3<f64>,
    ) -> Result<Self> {
        self.grid.ensure_same(&other.grid, "vector zip")?;
        Ok(VectorField3 {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Node-wise product with a scalar field.
    pub fn scaled_by(&self, s: &ScalarField) -> Result<Self> {
        self.grid.ensure_same(s.grid(), "vector scaling")?;
        Ok(VectorField3 {
            grid: self.grid,
            values: self.values.iter().zip(s.values()).map(|(v, &c)| v * c).collect(),
        })
    }

    /// Node-wise Euclidean norm.
    pub fn magnitude(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|v| v.norm()).collect(),
        }
    }
}

impl ComplexScalarField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        check_len(&grid, values.len(), "complex field")?;
        if let Some(i) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::Domain(format!("non-finite wavefunction value at node {i}")));
        }
        Ok(ComplexScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        ComplexScalarField::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn density(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// `sum |psi|^2 * dV`.
    pub fn norm_sqr(&self) -> f64 {
        compensated_sum(self.values.iter().map(|z| z.norm_sqr())) * self.grid.cell_volume()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexScalarField {
            grid: self.grid,
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }
}

/// Per-node validity flags (`true` = evaluated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMask {
    valid: Vec<bool>,
}

impl NodeMask {
    pub fn all(grid: &Grid) -> Self {
        NodeMask {
            valid: vec![true; grid.len()],
        }
    }

    pub fn from_flags(valid: Vec<bool>) -> Self {
        NodeMask { valid }
    }

    /// Nodes at least `width` away from every active boundary.
    pub fn interior(grid: &Grid, width: usize) -> Self {
        NodeMask {
            valid: (0..grid.len()).map(|i| grid.is_interior(i, width)).collect(),
        }
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid[idx]
    }

    pub fn flags(&self) -> &[bool] {
        &self.valid
    }

    pub fn count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn and(&self, other: &NodeMask) -> NodeMask {
        NodeMask {
            valid: self.valid.iter().zip(&other.valid).map(|(&a, &b)| a && b).collect(),
        }
    }

    /// Keeps a node only if every node within `radius` steps along each
    /// active axis is valid, i.e. all stencil neighbours are trustworthy.
    pub fn eroded(&self, grid: &Grid, radius: usize) -> NodeMask {
        let mut out = self.valid.clone();
        let strides = grid.strides();
        let dims = grid.dims();
        for (idx, flag) in out.iter_mut().enumerate() {
            if !*flag {
                continue;
            }
            let c = grid.coords(idx);
            'axes: for a in 0..3 {
                if !grid.is_active(a) {
                    continue;
                }
                for d in 1..=radius {
                    if c[a] >= d && !self.valid[idx - d * strides[a]] {
                        *flag = false;
                        break 'axes;
                    }
                    if c[a] + d < dims[a] && !self.valid[idx + d * strides[a]] {
                        *flag = false;
                        break 'axes;
                    }
                }
            }
        }
        NodeMask { valid: out }
    }
}

/// Max and L2 norms over the valid nodes of a mask.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub max: f64,
    pub l2: f64,
    pub nodes: usize,
}

impl Norms {
    pub fn of(values: &[f64], mask: &NodeMask, cell_volume: f64) -> Norms {
        let mut max = 0.0_f64;
        let mut nodes = 0;
        for (v, _) in values.iter().zip(mask.flags()).filter(|(_, &m)| m) {
            max = max.max(v.abs());
            nodes += 1;
        }
        let sq = compensated_sum(values.iter().zip(mask.flags()).filter(|(_, &m)| m).map(|(v, _)| v * v));
        Norms {
            max,
            l2: (sq * cell_volume).sqrt(),
            nodes,
        }
    }

    pub fn of_scalar(field: &ScalarField, mask: &NodeMask) -> Norms {
        Norms::of(field.values(), mask, field.grid().cell_volume())
    }

    pub fn of_vector(field: &VectorField3, mask: &NodeMask) -> Norms {
        Norms::of_scalar(&field.magnitude(), mask)
    }
}
