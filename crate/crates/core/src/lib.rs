//! Ahlfors map of doubly connected regions by boundary integral equations.
//!
//! The pipeline, for a region bounded by a counterclockwise outer curve and a
//! clockwise inner curve with one prescribed zero `a0`:
//!
//! 1. [`geometry`] samples both curves on a trapezoidal grid.
//! 2. [`szego`] solves the Kerzman–Stein equation for the Szegő kernel,
//!    differentiates it, and forms the boundary values of the Ahlfors map and
//!    the derivative θ′ of its boundary correspondence.
//! 3. [`zerofinder`] feeds θ′ back through the Neumann-kernel equation to get
//!    a linear system for the second zero `a1`.
//! 4. [`evaluate`] checks the result by evaluating the map at `a1`.
//!
//! ```
//! use ahlfors::{presets, Grid, Mode};
//!
//! let region = presets::example1(0.1, 0.5.into())?;
//! let grid = Grid::new(&region, 64)?;
//! let est = ahlfors::solve_second_zero(&grid, &Mode::LeastSquares)?;
//! assert!((est.a1 - (-0.2)).norm() < 1e-10);
//! # Ok::<(), ahlfors::Error>(())
//! ```

// `!(x < tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluate;
pub mod geometry;
pub mod kernels;
pub mod nystrom;
pub mod presets;
pub mod szego;
pub mod zerofinder;

pub use error::{Error, ErrorKind, Result};
pub use geometry::{Boundary, Curve, CurveSpec, Grid, Node, Orientation, Region, RegionSpec};
pub use szego::SzegoSolution;
pub use zerofinder::{solve_second_zero, BoundaryParameter, Mode, ZeroEstimate};
