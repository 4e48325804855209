//! Boundary kernels evaluated at grid nodes.
//!
//! The index-based functions read cached jets from a [`Grid`] and apply the
//! diagonal limits. The `*_between` functions take two arbitrary [`Node`]s and
//! always use the off-diagonal formula; they serve Nyström interpolation at
//! off-grid parameters and the finite-difference checks in the tests.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, Grid, Node};

const TWO_PI_I: Complex64 = Complex64 {
    re: 0.0,
    im: 2.0 * PI,
};

/// Which kernel a [`KernelSample`] was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    KerzmanStein,
    KerzmanSteinDt,
    NeumannAdjoint,
}

/// One kernel entry with its location. Real kernels store a zero imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub kernel: Kernel,
    pub value: Complex64,
    /// Row parameter `t` and its boundary.
    pub row_t: f64,
    pub row_boundary: Boundary,
    /// Column parameter `s` and its boundary.
    pub col_t: f64,
    pub col_boundary: Boundary,
}

pub fn sample(grid: &Grid, kernel: Kernel, i: usize, j: usize) -> Result<KernelSample> {
    let value = match kernel {
        Kernel::KerzmanStein => kerzman_stein(grid, i, j)?,
        Kernel::KerzmanSteinDt => kerzman_stein_dt(grid, i, j)?,
        Kernel::NeumannAdjoint => Complex64::new(neumann_adjoint(grid, i, j)?, 0.0),
    };
    let (row, col) = (grid.node(i), grid.node(j));
    Ok(KernelSample {
        kernel,
        value,
        row_t: row.t,
        row_boundary: row.boundary,
        col_t: col.t,
        col_boundary: col.boundary,
    })
}

/// `z_i - z_j`, rejecting distinct nodes that land on the same point.
fn separation(grid: &Grid, i: usize, j: usize) -> Result<Complex64> {
    let (zi, zj) = (grid.node(i).z(), grid.node(j).z());
    let dz = zi - zj;
    if dz.norm() <= 1e-14 * (1.0 + zi.norm().max(zj.norm())) {
        return Err(Error::CoincidentNodes { i, j });
    }
    Ok(dz)
}

/// Kerzman–Stein kernel `A(z(t), z(s))` for `t ≠ s`.
pub fn kerzman_stein_between(row: &Node, col: &Node) -> Complex64 {
    let dz = row.z() - col.z();
    (col.tangent / dz - row.tangent.conj() / dz.conj()) / TWO_PI_I
}

/// Kerzman–Stein kernel at nodes `(i, j)`; zero on the diagonal.
///
/// Skew-Hermitian: `A(i, j) = -conj(A(j, i))`. Vanishes identically when both
/// nodes lie on the same circle.
pub fn kerzman_stein(grid: &Grid, i: usize, j: usize) -> Result<Complex64> {
    if i == j {
        return Ok(Complex64::new(0.0, 0.0));
    }
    separation(grid, i, j)?;
    Ok(kerzman_stein_between(grid.node(i), grid.node(j)))
}

/// `d/dt A(z(t), z(s))` for `t ≠ s`, with every chain-rule factor included.
pub fn kerzman_stein_dt_between(row: &Node, col: &Node) -> Complex64 {
    let dz = row.z() - col.z();
    let dzc = dz.conj();
    let d1 = row.jet.d1;
    (-d1 * col.tangent / (dz * dz) - row.tangent_rate.conj() / dzc
        + row.tangent.conj() * d1.conj() / (dzc * dzc))
        / TWO_PI_I
}

/// Limit of `d/dt A(z(t), z(s))` as `s → t`:
/// `[Im(z‴/z′)/12 − Im((z″/z′)²)/8] / (π|z′|)`.
///
/// The second term vanishes on circles and arcs of constant curvature only.
pub fn kerzman_stein_dt_diagonal(node: &Node) -> Complex64 {
    let jet = &node.jet;
    let r2 = jet.d2 / jet.d1;
    let r3 = jet.d3 / jet.d1;
    Complex64::new((r3.im / 12.0 - (r2 * r2).im / 8.0) / (PI * node.speed), 0.0)
}

pub fn kerzman_stein_dt(grid: &Grid, i: usize, j: usize) -> Result<Complex64> {
    if i == j {
        return Ok(kerzman_stein_dt_diagonal(grid.node(i)));
    }
    separation(grid, i, j)?;
    Ok(kerzman_stein_dt_between(grid.node(i), grid.node(j)))
}

/// Adjoint Neumann kernel `N*(t, s) = (1/π) Im(z′(t) / (z(t) − z(s)))` for `t ≠ s`.
pub fn neumann_adjoint_between(row: &Node, col: &Node) -> f64 {
    (row.jet.d1 / (row.z() - col.z())).im / PI
}

/// `N*(t, t) = (1/2π) Im(z″(t)/z′(t))`.
pub fn neumann_adjoint_diagonal(node: &Node) -> f64 {
    (node.jet.d2 / node.jet.d1).im / (2.0 * PI)
}

pub fn neumann_adjoint(grid: &Grid, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Ok(neumann_adjoint_diagonal(grid.node(i)));
    }
    separation(grid, i, j)?;
    Ok(neumann_adjoint_between(grid.node(i), grid.node(j)))
}

/// Classical Neumann kernel `N(t, s) = N*(s, t)`.
pub fn neumann(grid: &Grid, i: usize, j: usize) -> Result<f64> {
    neumann_adjoint(grid, j, i)
}

/// The rank correction `J`: zero on the outer boundary, and on every inner
/// node the mean `(1/2π) ∫_{J₁} v(s) ds` of `v` over the inner boundary.
pub fn apply_j(grid: &Grid, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: v.len(),
        });
    }
    let inner = grid.range(Boundary::Inner);
    let mean = v[inner.clone()].iter().sum::<f64>() * grid.weight() / (2.0 * PI);
    let mut out = vec![0.0; v.len()];
    out[inner].iter_mut().for_each(|x| *x = mean);
    Ok(out)
}
