//! Boundary Szegő kernel, its parameter derivative, the Ahlfors boundary
//! values and the boundary correspondence derivative θ′.
//!
//! `S(·, a₀)` solves the Kerzman–Stein equation
//!
//! ```text
//! S(z) + ∫_Γ A(z, w) S(w) |dw| = g(z),   g(z) = −(1/2πi) conj(T(z)) / conj(z − a₀)
//! ```
//!
//! Differentiating the equation in `t` gives `S_p = dS(z(t))/dt` without
//! another solve. The Ahlfors map on the boundary is `f = S·T / (i·conj(S))`,
//! and taking the logarithmic derivative gives
//! `θ′ = 2 Im(S_p/S) + Im(z″/z′)`.
//!
//! θ′ also satisfies the real equation `(I + N* + J) θ′ = φ + ψ`, whose right
//! side needs both zeros. [`theta_prime_operator`] solves that system; it is
//! the cross-check once the second zero is known.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, Grid, Node};
use crate::kernels;
use crate::nystrom::{self, DenseSystem, WeightMode};

const TWO_PI_I: Complex64 = Complex64 {
    re: 0.0,
    im: 2.0 * PI,
};
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Threshold on `|S| / max|S|` below which division by `S` is refused.
const VANISHING_SZEGO: f64 = 1e-13;

fn off_boundary(grid: &Grid, p: Complex64) -> Result<()> {
    for (node_idx, node) in grid.nodes().iter().enumerate() {
        let d = (node.z() - p).norm();
        if d <= 1e-14 * (1.0 + p.norm()) {
            return Err(Error::PointOnBoundary { point: p, node: node_idx });
        }
    }
    Ok(())
}

/// `g(z(t)) = −(1/2πi) conj(T) / conj(z − a₀)` at one node.
pub fn rhs_g_at(node: &Node, a0: Complex64) -> Complex64 {
    -(node.tangent.conj() / (node.z() - a0).conj()) / TWO_PI_I
}

/// `d/dt g(z(t)) = −(1/2πi) [conj(T′z′)/conj(z − a₀) − conj(z′)·conj(T)/conj((z − a₀)²)]`.
pub fn rhs_g_dt_at(node: &Node, a0: Complex64) -> Complex64 {
    let d = (node.z() - a0).conj();
    -(node.tangent_rate.conj() / d - node.jet.d1.conj() * node.tangent.conj() / (d * d)) / TWO_PI_I
}

pub fn rhs_g(grid: &Grid, a0: Complex64) -> Result<Vec<Complex64>> {
    off_boundary(grid, a0)?;
    Ok(grid.nodes().iter().map(|node| rhs_g_at(node, a0)).collect())
}

/// Solve `(I + A·|dw|) S = g` at the grid nodes, with `a₀` from the grid's region.
pub fn solve_szego(grid: &Grid) -> Result<Vec<Complex64>> {
    let g = rhs_g(grid, grid.region().a0())?;
    let matrix = nystrom::assemble_second_kind(
        grid,
        |i, j| kernels::kerzman_stein(grid, i, j),
        WeightMode::ArcLength,
    )?;
    nystrom::solve_dense(&DenseSystem::new(matrix, g)?)
}

/// `S_p(t_i) = g′z′(t_i) − Σ_j w·∂_tA(t_i, t_j)·S_j·|z′(t_j)|`.
pub fn szego_derivative(grid: &Grid, s: &[Complex64]) -> Result<Vec<Complex64>> {
    let a0 = grid.region().a0();
    off_boundary(grid, a0)?;
    let integral = nystrom::apply_integral_operator(
        grid,
        |i, j| kernels::kerzman_stein_dt(grid, i, j),
        WeightMode::ArcLength,
        s,
    )?;
    Ok(grid
        .nodes()
        .iter()
        .zip(integral)
        .map(|(node, k)| rhs_g_dt_at(node, a0) - k)
        .collect())
}

fn check_nonvanishing(s: &[Complex64]) -> Result<()> {
    let max = s.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    for (node, v) in s.iter().enumerate() {
        let ratio = if max > 0.0 { v.norm() / max } else { 0.0 };
        if !(ratio >= VANISHING_SZEGO) {
            return Err(Error::VanishingSzego { node, ratio });
        }
    }
    Ok(())
}

/// Ahlfors boundary values `f(z(t)) = S·T / (i·conj(S))`; unimodular by construction.
pub fn ahlfors_boundary(grid: &Grid, s: &[Complex64]) -> Result<Vec<Complex64>> {
    if s.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: s.len(),
        });
    }
    check_nonvanishing(s)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(s)
        .map(|(node, sz)| {
            // S/conj(S) = e^{2i arg S} keeps |f| = 1 to the last bit
            let phase = Complex64::from_polar(1.0, 2.0 * sz.arg());
            phase * node.tangent / I
        })
        .collect())
}

/// θ′ at one point from `S` and `S_p` there.
pub fn theta_prime_at(node: &Node, s: Complex64, s_p: Complex64) -> f64 {
    2.0 * (s_p / s).im + (node.jet.d2 / node.jet.d1).im
}

/// `θ′(t) = 2 Im(S_p/S) + Im(z″/z′)` at every node.
pub fn theta_prime_analytic(grid: &Grid, s: &[Complex64], s_p: &[Complex64]) -> Result<Vec<f64>> {
    for len in [s.len(), s_p.len()] {
        if len != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: len,
            });
        }
    }
    check_nonvanishing(s)?;
    Ok(grid
        .nodes()
        .iter()
        .zip(s.iter().zip(s_p))
        .map(|(node, (sz, sp))| theta_prime_at(node, *sz, *sp))
        .collect())
}

/// Right-hand side pieces of `(I + N* + J) θ′ = φ + ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRhs {
    /// `φ = 2 Im[z′/(z − a₀) + z′/(z − a₁)]`.
    pub phi: Vec<f64>,
    /// 0 on the outer boundary, 1 on the inner one.
    pub psi: Vec<f64>,
}

pub fn psi(grid: &Grid) -> Vec<f64> {
    grid.nodes()
        .iter()
        .map(|node| match node.boundary {
            Boundary::Outer => 0.0,
            Boundary::Inner => 1.0,
        })
        .collect()
}

fn check_zeros(grid: &Grid, zeros: &[Complex64; 2]) -> Result<()> {
    if !grid.is_doubly_connected() {
        return Err(Error::NotDoublyConnected);
    }
    for &a in zeros {
        let (outer, inner) = grid.region().windings(a);
        if !((outer - 1.0).abs() < 0.4 && inner.abs() < 0.4) {
            return Err(Error::NotInterior {
                point: a,
                outer_winding: outer,
                inner_winding: inner,
            });
        }
        off_boundary(grid, a)?;
    }
    Ok(())
}

pub fn theta_rhs(grid: &Grid, zeros: [Complex64; 2]) -> Result<ThetaRhs> {
    check_zeros(grid, &zeros)?;
    let phi = grid
        .nodes()
        .iter()
        .map(|node| {
            let d1 = node.jet.d1;
            2.0 * zeros.iter().map(|a| (d1 / (node.z() - a)).im).sum::<f64>()
        })
        .collect();
    Ok(ThetaRhs {
        phi,
        psi: psi(grid),
    })
}

/// Solve `(I + N* + J) θ′ = φ + ψ` (plain `ds` weights) given both zeros.
pub fn theta_prime_operator(grid: &Grid, zeros: [Complex64; 2]) -> Result<Vec<f64>> {
    let rhs = theta_rhs(grid, zeros)?;
    let mut matrix = nystrom::assemble_second_kind(
        grid,
        |i, j| kernels::neumann_adjoint(grid, i, j),
        WeightMode::Parameter,
    )?;
    // J: every inner row picks up (1/2π)·w on every inner column
    let inner = grid.range(Boundary::Inner);
    let j_entry = grid.weight() / (2.0 * PI);
    for i in inner.clone() {
        for j in inner.clone() {
            matrix[(i, j)] += j_entry;
        }
    }
    let b = rhs.phi.iter().zip(&rhs.psi).map(|(p, q)| p + q).collect();
    nystrom::solve_dense(&DenseSystem::new(matrix, b)?)
}

/// Everything the zero finder needs from the Szegő route, at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoSolution {
    /// `S(z(t), a₀)`.
    pub s: Vec<Complex64>,
    /// `S′(z(t), a₀)·z′(t)`.
    pub s_p: Vec<Complex64>,
    pub f_boundary: Vec<Complex64>,
    pub theta_prime: Vec<f64>,
}

/// Nyström-interpolated boundary quantities at an arbitrary boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub s: Complex64,
    pub s_p: Complex64,
    pub theta_prime: f64,
}

impl SzegoSolution {
    pub fn compute(grid: &Grid) -> Result<SzegoSolution> {
        let s = solve_szego(grid)?;
        let s_p = szego_derivative(grid, &s)?;
        let f_boundary = ahlfors_boundary(grid, &s)?;
        let theta_prime = theta_prime_analytic(grid, &s, &s_p)?;
        Ok(SzegoSolution {
            s,
            s_p,
            f_boundary,
            theta_prime,
        })
    }

    /// Evaluate `S`, `S_p` and θ′ at `point` through the Nyström interpolant
    /// of the solved equation. Grid nodes return the stored values.
    pub fn interpolate(&self, grid: &Grid, point: &Node) -> Result<BoundaryValues> {
        if let Some(i) = grid.nodes().iter().position(|node| {
            node.boundary == point.boundary && (node.z() - point.z()).norm() <= 1e-13 * (1.0 + node.z().norm())
        }) {
            return Ok(BoundaryValues {
                s: self.s[i],
                s_p: self.s_p[i],
                theta_prime: self.theta_prime[i],
            });
        }
        let a0 = grid.region().a0();
        let w = grid.weight();
        let mut s = rhs_g_at(point, a0);
        let mut s_p = rhs_g_dt_at(point, a0);
        for (j, node) in grid.nodes().iter().enumerate() {
            if (node.z() - point.z()).norm() <= 1e-14 * (1.0 + node.z().norm()) {
                return Err(Error::CoincidentNodes { i: j, j });
            }
            let weight = w * node.speed;
            s -= kernels::kerzman_stein_between(point, node) * self.s[j] * weight;
            s_p -= kernels::kerzman_stein_dt_between(point, node) * self.s[j] * weight;
        }
        let max = self.s.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if !(s.norm() >= VANISHING_SZEGO * max) {
            return Err(Error::VanishingSzego {
                node: usize::MAX,
                ratio: s.norm() / max,
            });
        }
        Ok(BoundaryValues {
            s,
            s_p,
            theta_prime: theta_prime_at(point, s, s_p),
        })
    }
}
