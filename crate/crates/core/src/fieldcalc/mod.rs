//! Uniform Cartesian grids in one to three dimensions and second-order
//! finite-difference vector calculus.
//!
//! Fields are stored flat in row-major order (`x` slowest, `z` fastest).
//! Axes with a single node are inactive: derivatives along them vanish, which
//! is how 1D and 2D problems are embedded in three dimensions.

mod field;
mod grid;
mod io;
mod ops;

pub use field::{ComplexScalarField, NodeMask, Norms, ScalarField, VectorField3};
pub use grid::{Grid, MIN_AXIS_NODES};
pub use io::{read_container, FieldData};
pub use ops::{curl, divergence, gradient, laplacian, partial, second_partial};

/// Width of the boundary layer excluded from identity checks.
pub const BOUNDARY_LAYER: usize = 2;
