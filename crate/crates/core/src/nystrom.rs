//! Periodic trapezoidal quadrature, Nyström assembly and dense solves.
//!
//! Second-kind equations `u(t) + ∫ K(t, s) u(s) dμ(s) = b(t)` are discretized
//! by collocating at the grid nodes and replacing the integral by the
//! trapezoidal rule. The measure matters: the Szegő equation integrates
//! against arc length `|dw| = |z′(s)| ds`, the θ′ equation against plain
//! `ds`. [`WeightMode`] is a required argument everywhere so the two cannot be
//! mixed up silently.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};

use faer::linalg::solvers::{Solve, SolveLstsq};
use faer::{Col, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, Grid};

/// Pivot ratio beyond which an LU factorization is treated as singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e14;

/// Condition number beyond which a least-squares problem is rank deficient.
const RANK_CONDITION: f64 = 1e12;

/// Field elements the solvers work with: `f64` and `Complex64`.
pub trait Scalar:
    faer::traits::ComplexField
    + Copy
    + Default
    + Send
    + Sync
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Sum
{
    fn modulus(self) -> f64;
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Which boundary intervals a quadrature runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Outer,
    Inner,
    Both,
}

/// Integration measure for kernel assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// `|dw| = |z′(s)| ds`: column `j` carries `w·|z′(t_j)|`.
    ArcLength,
    /// Plain `ds`: column `j` carries `w`.
    Parameter,
}

fn check_len(grid: &Grid, actual: usize) -> Result<()> {
    if actual != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual,
        });
    }
    Ok(())
}

/// `Σ w·samples` over the selected interval(s), `w = 2π/n`.
pub fn trapezoid<T: Scalar>(grid: &Grid, samples: &[T], selection: Selection) -> Result<T> {
    check_len(grid, samples.len())?;
    let range = match selection {
        Selection::Outer => grid.range(Boundary::Outer),
        Selection::Inner => grid.range(Boundary::Inner),
        Selection::Both => 0..grid.len(),
    };
    Ok(samples[range].iter().copied().sum::<T>() * grid.weight())
}

/// Quadrature weight of every column under `mode`.
pub fn column_weights(grid: &Grid, mode: WeightMode) -> Vec<f64> {
    let w = grid.weight();
    grid.nodes()
        .iter()
        .map(|node| match mode {
            WeightMode::ArcLength => w * node.speed,
            WeightMode::Parameter => w,
        })
        .collect()
}

/// A collocated linear system with one row and column per grid node.
#[derive(Debug, Clone)]
pub struct DenseSystem<T> {
    pub matrix: Mat<T>,
    pub rhs: Vec<T>,
}

impl<T: Scalar> DenseSystem<T> {
    pub fn new(matrix: Mat<T>, rhs: Vec<T>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        if rhs.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: rhs.len(),
            });
        }
        Ok(DenseSystem { matrix, rhs })
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// `‖Mx − b‖∞ / ‖b‖∞` (absolute when `b = 0`).
    pub fn relative_residual(&self, x: &[T]) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut acc = T::default();
            for (j, xj) in x.iter().enumerate() {
                acc += self.matrix[(i, j)] * *xj;
            }
            worst = worst.max((acc - self.rhs[i]).modulus());
        }
        let scale = self.rhs.iter().fold(0.0f64, |m, b| m.max(b.modulus()));
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }
}

/// `M[i][j] = δ_ij + weight_j·kernel(i, j)` for the second-kind equation.
pub fn assemble_second_kind<T, K>(grid: &Grid, kernel: K, mode: WeightMode) -> Result<Mat<T>>
where
    T: Scalar,
    K: Fn(usize, usize) -> Result<T>,
{
    let weights = column_weights(grid, mode);
    let n = grid.len();
    let mut matrix = Mat::<T>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let mut entry = kernel(i, j)? * weights[j];
            if i == j {
                entry += T::from_real(1.0);
            }
            matrix[(i, j)] = entry;
        }
    }
    Ok(matrix)
}

/// Trapezoidal discretization of `∫ K(t_i, s) v(s) dμ(s)` at every node.
pub fn apply_integral_operator<T, K>(
    grid: &Grid,
    kernel: K,
    mode: WeightMode,
    density: &[T],
) -> Result<Vec<T>>
where
    T: Scalar,
    K: Fn(usize, usize) -> Result<T>,
{
    check_len(grid, density.len())?;
    let weights = column_weights(grid, mode);
    (0..grid.len())
        .map(|i| {
            let mut acc = T::default();
            for (j, (v, w)) in density.iter().zip(&weights).enumerate() {
                acc += kernel(i, j)? * *v * *w;
            }
            Ok(acc)
        })
        .collect()
}

/// Dense LU with partial pivoting.
///
/// Fails with [`Error::Singular`] when the ratio of the largest to the smallest
/// pivot (a cheap lower bound on the condition number) exceeds `1e14`.
pub fn solve_dense<T: Scalar>(system: &DenseSystem<T>) -> Result<Vec<T>> {
    let n = system.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lu = system.matrix.partial_piv_lu();
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let p = u[(i, i)].modulus();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let ratio = hi / lo;
    if !(ratio.is_finite() && ratio < SINGULAR_PIVOT_RATIO) {
        return Err(Error::Singular { condition: ratio });
    }
    let rhs = Col::<T>::from_fn(n, |i| system.rhs[i]);
    let x = lu.solve(&rhs);
    let out: Vec<T> = (0..n).map(|i| x[i]).collect();
    if out.iter().any(|v| !v.modulus().is_finite()) {
        return Err(Error::Singular { condition: ratio });
    }
    Ok(out)
}

/// Result of a three-unknown least-squares solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquares {
    pub solution: [f64; 3],
    /// `‖rows·u + rhs‖₂` at the minimizer.
    pub residual_norm: f64,
    /// 2-norm condition number of the column-equilibrated matrix.
    pub condition: f64,
}

/// Minimize `‖rows·u + rhs‖₂` by Householder QR on equilibrated columns.
///
/// The sign convention matches `k₂α + k₃β + k₁(α²+β²) = −k₄`: pass `k₄` as
/// `rhs` unchanged.
pub fn solve_least_squares(rows: &[[f64; 3]], rhs: &[f64]) -> Result<LeastSquares> {
    let m = rows.len();
    if rhs.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: rhs.len(),
        });
    }
    if m < 3 {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
        });
    }
    let mut scale = [0.0f64; 3];
    for row in rows {
        for k in 0..3 {
            scale[k] += row[k] * row[k];
        }
    }
    if scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
        });
    }
    let scale = scale.map(f64::sqrt);
    let a = Mat::<f64>::from_fn(m, 3, |i, k| rows[i][k] / scale[k]);
    let sv = a
        .singular_values()
        .map_err(|_| Error::RankDeficient {
            condition: f64::INFINITY,
        })?;
    let (hi, lo) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(h, l), s| (h.max(*s), l.min(*s)));
    let condition = hi / lo;
    if !(condition.is_finite() && condition < RANK_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }
    let b = Col::<f64>::from_fn(m, |i| -rhs[i]);
    let y = a.qr().solve_lstsq(&b);
    let solution = [y[0] / scale[0], y[1] / scale[1], y[2] / scale[2]];
    let residual_norm = rows
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let e = row[0] * solution[0] + row[1] * solution[1] + row[2] * solution[2] + r;
            e * e
        })
        .sum::<f64>()
        .sqrt();
    Ok(LeastSquares {
        solution,
        residual_norm,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Curve, Orientation, Region};
    use crate::kernels;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus(n: usize) -> Grid {
        let region = Region::doubly_connected(
            Curve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap(),
            Curve::circle(c(0.0, 0.0), 0.1, Orientation::Clockwise).unwrap(),
            c(0.5, 0.0),
        )
        .unwrap();
        Grid::new(&region, n).unwrap()
    }

    fn disk(n: usize) -> Grid {
        let region = Region::simply_connected(
            Curve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap(),
            c(0.0, 0.0),
        )
        .unwrap();
        Grid::new(&region, n).unwrap()
    }

    /// Deterministic pseudo-random numbers in [-1, 1).
    fn noise(seed: u64) -> impl Iterator<Item = f64> {
        let mut state = seed;
        std::iter::repeat_with(move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn trapezoid_on_trigonometric_polynomials() {
        let grid = disk(16);
        let sin2: Vec<f64> = grid.nodes().iter().map(|n| n.t.sin().powi(2)).collect();
        assert!((trapezoid(&grid, &sin2, Selection::Outer).unwrap() - PI).abs() < 1e-14);

        let grid = annulus(16);
        let ones = vec![1.0; 32];
        assert!((trapezoid(&grid, &ones, Selection::Both).unwrap() - 2.0 * TAU).abs() < 1e-13);
        assert!((trapezoid(&grid, &ones, Selection::Inner).unwrap() - TAU).abs() < 1e-13);

        for k in 1..8 {
            let wave: Vec<Complex64> = grid
                .nodes()
                .iter()
                .map(|n| c(0.0, k as f64 * n.t).exp())
                .collect();
            assert!(trapezoid(&grid, &wave, Selection::Both).unwrap().norm() < 1e-14);
        }
        assert!(matches!(
            trapezoid(&grid, &ones[..5], Selection::Both),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kerzman_stein_system_on_disk_is_identity() {
        for n in [8, 16, 64] {
            let grid = disk(n);
            let m = assemble_second_kind(&grid, |i, j| kernels::kerzman_stein(&grid, i, j), WeightMode::ArcLength)
                .unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((m[(i, j)] - c(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn annulus_system_shape() {
        let grid = annulus(8);
        let m = assemble_second_kind(&grid, |i, j| kernels::kerzman_stein(&grid, i, j), WeightMode::ArcLength)
            .unwrap();
        assert_eq!((m.nrows(), m.ncols()), (16, 16));
        for i in 0..16 {
            assert_eq!(m[(i, i)], c(1.0, 0.0));
        }
        // same-circle blocks vanish; the cross blocks do not, except where
        // the two nodes share a ray from the center
        assert!(m[(0, 1)].norm() < 1e-15);
        assert!(m[(0, 8)].norm() < 1e-15);
        assert!(m[(0, 9)].norm() > 1e-3);
    }

    #[test]
    fn weight_modes_differ_by_speed() {
        let grid = annulus(8);
        let arc = column_weights(&grid, WeightMode::ArcLength);
        let plain = column_weights(&grid, WeightMode::Parameter);
        assert!((arc[0] - plain[0]).abs() < 1e-15);
        assert!((arc[9] - 0.1 * plain[9]).abs() < 1e-15);
    }

    #[test]
    fn identity_system_returns_rhs() {
        let rhs: Vec<Complex64> = (0..6).map(|k| c(k as f64, -1.0)).collect();
        let system = DenseSystem::new(Mat::<Complex64>::identity(6, 6), rhs.clone()).unwrap();
        assert_eq!(solve_dense(&system).unwrap(), rhs);
    }

    #[test]
    fn random_complex_system_residual() {
        let mut r = noise(7);
        let n = 16;
        let entries: Vec<Complex64> = (0..n * n).map(|_| c(r.next().unwrap(), r.next().unwrap())).collect();
        let matrix = Mat::<Complex64>::from_fn(n, n, |i, j| {
            entries[i * n + j] * 0.2 + if i == j { c(3.0, 0.0) } else { c(0.0, 0.0) }
        });
        let rhs: Vec<Complex64> = (0..n).map(|_| c(r.next().unwrap(), r.next().unwrap())).collect();
        let system = DenseSystem::new(matrix, rhs).unwrap();
        let x = solve_dense(&system).unwrap();
        assert!(system.relative_residual(&x) <= 1e-12);
    }

    #[test]
    fn singular_system_fails() {
        let matrix = Mat::<f64>::from_fn(4, 4, |i, j| (i + 1) as f64 * (j + 1) as f64);
        let system = DenseSystem::new(matrix, vec![1.0; 4]).unwrap();
        assert!(matches!(solve_dense(&system), Err(Error::Singular { .. })));
        assert!(DenseSystem::new(Mat::<f64>::zeros(3, 3), vec![0.0; 2]).is_err());
    }

    fn planted_rows(a1: Complex64, ts: &[f64]) -> (Vec<[f64; 3]>, Vec<f64>) {
        // rows of k2·α + k3·β + k1·(α²+β²) = −k4 on a circle of radius 3
        ts.iter()
            .map(|&t| {
                let z = Complex64::from_polar(3.0, t);
                let dz = c(0.0, 1.0) * z;
                let k1 = (dz / (z - a1)).im;
                let (x, y, xp, yp) = (z.re, z.im, dz.re, dz.im);
                ([yp - 2.0 * k1 * x, -2.0 * k1 * y - xp, k1], k1 * (x * x + y * y) + xp * y - yp * x)
            })
            .unzip()
    }

    #[test]
    fn least_squares_exact_three_rows() {
        let a1 = c(1.0, 2.0);
        let (rows, rhs) = planted_rows(a1, &[0.3, 2.0, 4.1]);
        let ls = solve_least_squares(&rows, &rhs).unwrap();
        assert!((ls.solution[0] - 1.0).abs() < 1e-12);
        assert!((ls.solution[1] - 2.0).abs() < 1e-12);
        assert!((ls.solution[2] - 5.0).abs() < 1e-11);
        assert!(ls.residual_norm < 1e-12);
    }

    #[test]
    fn least_squares_many_rows() {
        let a1 = c(-0.7, 0.4);
        let ts: Vec<f64> = (0..200).map(|k| TAU * k as f64 / 200.0).collect();
        let (rows, rhs) = planted_rows(a1, &ts);
        let ls = solve_least_squares(&rows, &rhs).unwrap();
        let expected = [-0.7, 0.4, 0.65];
        for (got, want) in ls.solution.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{:?}", ls.solution);
        }
    }

    #[test]
    fn least_squares_rank_deficient() {
        let (rows, rhs) = planted_rows(c(1.0, 2.0), &[1.0, 1.0, 1.0]);
        assert!(matches!(
            solve_least_squares(&rows, &rhs),
            Err(Error::RankDeficient { .. })
        ));
        assert!(matches!(
            solve_least_squares(&rows[..2], &rhs[..2]),
            Err(Error::RankDeficient { .. })
        ));
    }
}
