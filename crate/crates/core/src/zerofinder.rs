//! Recovery of the second zero `a₁` of the Ahlfors map.
//!
//! With both zeros known, θ′ would satisfy `(I + N* + J) θ′ = φ + ψ` with
//! `φ = 2 Im[z′/(z − a₀) + z′/(z − a₁)]`. Running that identity backwards on
//! the θ′ obtained from the Szegő route yields φ, hence
//!
//! ```text
//! k₁(t) = ½[φ(t) − 2 Im(z′/(z − a₀))] = Im(z′/(z − a₁)).
//! ```
//!
//! Writing `z = x + iy`, `a₁ = α + iβ` and clearing the denominator gives one
//! linear equation per boundary point in the unknowns `(α, β, α² + β²)`:
//!
//! ```text
//! k₂ α + k₃ β + k₁ (α² + β²) = −k₄
//! k₂ = y′ − 2k₁x,  k₃ = −2k₁y − x′,  k₄ = k₁(x² + y²) + x′y − y′x
//! ```
//!
//! The third unknown is treated as independent; its mismatch with `α² + β²`
//! is reported as a diagnostic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::evaluate;
use crate::geometry::{Boundary, Grid, Node};
use crate::kernels;
use crate::nystrom::{self, LeastSquares, WeightMode};
use crate::szego::{self, SzegoSolution};

/// φ recovered from θ′, plus the `Jθ′ = ψ` consistency check.
#[derive(Debug, Clone, PartialEq)]
pub struct Phi {
    /// `(I + N* + J) θ′ − ψ`.
    pub phi: Vec<f64>,
    /// `(I + N*) θ′`.
    pub phi_simplified: Vec<f64>,
    /// `‖Jθ′ − ψ‖∞ = ‖φ − φ_simplified‖∞`.
    pub consistency: f64,
}

pub fn compute_phi(grid: &Grid, theta_prime: &[f64]) -> Result<Phi> {
    if !grid.is_doubly_connected() {
        return Err(Error::NotDoublyConnected);
    }
    let n_star = nystrom::apply_integral_operator(
        grid,
        |i, j| kernels::neumann_adjoint(grid, i, j),
        WeightMode::Parameter,
        theta_prime,
    )?;
    let j_theta = kernels::apply_j(grid, theta_prime)?;
    let psi = szego::psi(grid);
    let mut phi = Vec::with_capacity(grid.len());
    let mut phi_simplified = Vec::with_capacity(grid.len());
    let mut consistency = 0.0f64;
    for i in 0..grid.len() {
        let base = theta_prime[i] + n_star[i];
        let defect = j_theta[i] - psi[i];
        phi_simplified.push(base);
        phi.push(base + defect);
        consistency = consistency.max(defect.abs());
    }
    Ok(Phi {
        phi,
        phi_simplified,
        consistency,
    })
}

/// `k₁ = ½[φ − 2 Im(z′/(z − a₀))]` at one point.
pub fn k1_at(node: &Node, phi: f64, a0: Complex64) -> f64 {
    0.5 * (phi - 2.0 * (node.jet.d1 / (node.z() - a0)).im)
}

pub fn compute_k1(grid: &Grid, phi: &[f64], a0: Complex64) -> Result<Vec<f64>> {
    if phi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: phi.len(),
        });
    }
    Ok(grid
        .nodes()
        .iter()
        .zip(phi)
        .map(|(node, p)| k1_at(node, *p, a0))
        .collect())
}

/// Coefficients `([k₂, k₃, k₁], k₄)` of one equation.
pub fn zero_row(node: &Node, k1: f64) -> ([f64; 3], f64) {
    let (x, y) = (node.z().re, node.z().im);
    let (xp, yp) = (node.jet.d1.re, node.jet.d1.im);
    let k2 = yp - 2.0 * k1 * x;
    let k3 = -2.0 * k1 * y - xp;
    let k4 = k1 * x * x + k1 * y * y + xp * y - yp * x;
    ([k2, k3, k1], k4)
}

/// Equations `rows·u = −rhs`, one per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRows {
    pub rows: Vec<[f64; 3]>,
    pub rhs: Vec<f64>,
}

pub fn assemble_zero_rows(grid: &Grid, k1: &[f64]) -> Result<ZeroRows> {
    if k1.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: k1.len(),
        });
    }
    let (rows, rhs) = grid
        .nodes()
        .iter()
        .zip(k1)
        .map(|(node, k)| zero_row(node, *k))
        .unzip();
    Ok(ZeroRows { rows, rhs })
}

/// A parameter value on one boundary component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParameter {
    pub boundary: Boundary,
    pub t: f64,
}

/// How the three-unknown system is closed.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    /// Every grid node on both boundaries contributes one equation.
    LeastSquares,
    /// Exactly three equations at the given boundary parameters.
    ThreePoint([BoundaryParameter; 3]),
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::LeastSquares => "least-squares",
            Mode::ThreePoint(_) => "three-point",
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

fn serialize_complex<S: Serializer>(z: &Complex64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(serializer)
}

/// The recovered second zero and its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroEstimate {
    #[serde(serialize_with = "serialize_complex")]
    pub a1: Complex64,
    /// `|u₃ − (α² + β²)|`.
    pub s_defect: f64,
    pub ls_residual: f64,
    pub condition_estimate: f64,
    /// `|f(a₁)|` from the Cauchy evaluation.
    pub residual_f: f64,
    pub n: usize,
    pub mode: Mode,
}

/// Full pipeline: Szegő solve, θ′, φ, k₁, then the linear system for `a₁`.
pub fn solve_second_zero(grid: &Grid, mode: &Mode) -> Result<ZeroEstimate> {
    if !grid.is_doubly_connected() {
        return Err(Error::NotDoublyConnected);
    }
    let solution = SzegoSolution::compute(grid)?;
    solve_with_solution(grid, &solution, mode)
}

/// As [`solve_second_zero`], reusing an existing Szegő solution.
pub fn solve_with_solution(grid: &Grid, solution: &SzegoSolution, mode: &Mode) -> Result<ZeroEstimate> {
    let a0 = grid.region().a0();
    let ls = match mode {
        Mode::LeastSquares => {
            let phi = compute_phi(grid, &solution.theta_prime)?;
            let k1 = compute_k1(grid, &phi.phi, a0)?;
            let system = assemble_zero_rows(grid, &k1)?;
            nystrom::solve_least_squares(&system.rows, &system.rhs)?
        }
        Mode::ThreePoint(params) => {
            if !grid.is_doubly_connected() {
                return Err(Error::NotDoublyConnected);
            }
            let mut rows = Vec::with_capacity(3);
            let mut rhs = Vec::with_capacity(3);
            for p in params {
                let curve = grid
                    .region()
                    .curve(p.boundary)
                    .ok_or(Error::NotDoublyConnected)?;
                let node = Node::on(curve, p.boundary, p.t);
                let phi = phi_at(grid, solution, &node)?;
                let (row, r) = zero_row(&node, k1_at(&node, phi, a0));
                rows.push(row);
                rhs.push(r);
            }
            nystrom::solve_least_squares(&rows, &rhs)?
        }
    };
    finish(grid, solution, mode, ls)
}

fn finish(grid: &Grid, solution: &SzegoSolution, mode: &Mode, ls: LeastSquares) -> Result<ZeroEstimate> {
    let [alpha, beta, radius2] = ls.solution;
    let a1 = Complex64::new(alpha, beta);
    let residual_f = evaluate::residual_at(grid, solution, a1)?;
    Ok(ZeroEstimate {
        a1,
        s_defect: (radius2 - (alpha * alpha + beta * beta)).abs(),
        ls_residual: ls.residual_norm,
        condition_estimate: ls.condition,
        residual_f,
        n: grid.n(),
        mode: mode.clone(),
    })
}

/// φ at an arbitrary boundary point, with θ′ there from the Nyström interpolant.
pub fn phi_at(grid: &Grid, solution: &SzegoSolution, point: &Node) -> Result<f64> {
    let theta = solution.interpolate(grid, point)?.theta_prime;
    let w = grid.weight();
    let mut integral = 0.0;
    for (node, th) in grid.nodes().iter().zip(&solution.theta_prime) {
        let coincident = node.boundary == point.boundary
            && (node.z() - point.z()).norm() <= 1e-13 * (1.0 + node.z().norm());
        let kernel = if coincident {
            kernels::neumann_adjoint_diagonal(point)
        } else {
            kernels::neumann_adjoint_between(point, node)
        };
        integral += kernel * th * w;
    }
    let (j_term, psi) = match point.boundary {
        Boundary::Outer => (0.0, 0.0),
        Boundary::Inner => {
            let inner = grid.range(Boundary::Inner);
            let mean = solution.theta_prime[inner].iter().sum::<f64>() * w / (2.0 * PI);
            (mean, 1.0)
        }
    };
    Ok(theta + integral + j_term - psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Curve, Orientation, Region};
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus(a0: Complex64) -> Region {
        Region::doubly_connected(
            Curve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap(),
            Curve::circle(c(0.0, 0.0), 0.1, Orientation::Clockwise).unwrap(),
            a0,
        )
        .unwrap()
    }

    fn eccentric(a0: Complex64) -> Region {
        Region::doubly_connected(
            Curve::circle(c(0.0, 0.0), 2.0, Orientation::CounterClockwise).unwrap(),
            Curve::circle(c(0.2, 0.6), 0.3, Orientation::Clockwise).unwrap(),
            a0,
        )
        .unwrap()
    }

    #[test]
    fn phi_matches_exact_zeros_on_annulus() {
        let a0 = c(0.5, 0.0);
        let a1 = c(-0.2, 0.0);
        let grid = Grid::new(&annulus(a0), 64).unwrap();
        let sol = SzegoSolution::compute(&grid).unwrap();
        let phi = compute_phi(&grid, &sol.theta_prime).unwrap();
        assert!(phi.consistency <= 1e-6);
        let k1 = compute_k1(&grid, &phi.phi, a0).unwrap();
        for (i, node) in grid.nodes().iter().enumerate() {
            let d1 = node.jet.d1;
            let exact = 2.0 * ((d1 / (node.z() - a0)).im + (d1 / (node.z() - a1)).im);
            assert!((phi.phi[i] - exact).abs() <= 1e-9);
            assert!((k1[i] - (d1 / (node.z() - a1)).im).abs() <= 1e-9);
        }
    }

    #[test]
    fn k1_decomposition_identity() {
        // with φ built from a₀ twice, k₁ is Im(z′/(z − a₀))
        let a0 = c(0.5, 0.1);
        let grid = Grid::new(&annulus(a0), 16).unwrap();
        let phi: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|n| 4.0 * (n.jet.d1 / (n.z() - a0)).im)
            .collect();
        let k1 = compute_k1(&grid, &phi, a0).unwrap();
        for (node, k) in grid.nodes().iter().zip(k1) {
            assert!((k - (node.jet.d1 / (node.z() - a0)).im).abs() < 1e-14);
        }
    }

    #[test]
    fn planted_zero_recovery() {
        let a1 = c(1.0, 2.0);
        let region = Region::doubly_connected(
            Curve::circle(c(0.0, 0.0), 4.0, Orientation::CounterClockwise).unwrap(),
            Curve::circle(c(-1.0, -1.0), 0.5, Orientation::Clockwise).unwrap(),
            c(-2.0, 1.0),
        )
        .unwrap();
        let grid = Grid::new(&region, 32).unwrap();
        let k1: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|n| (n.jet.d1 / (n.z() - a1)).im)
            .collect();
        let system = assemble_zero_rows(&grid, &k1).unwrap();
        let ls = nystrom::solve_least_squares(&system.rows, &system.rhs).unwrap();
        for (got, want) in ls.solution.iter().zip([1.0, 2.0, 5.0]) {
            assert!((got - want).abs() <= 1e-10);
        }
        // three equal rows cannot determine three unknowns
        let rows = vec![system.rows[3]; 3];
        let rhs = vec![system.rhs[3]; 3];
        assert!(matches!(
            nystrom::solve_least_squares(&rows, &rhs),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn annulus_recovers_reflected_zero() {
        let grid = Grid::new(&annulus(c(0.5, 0.0)), 64).unwrap();
        let est = solve_second_zero(&grid, &Mode::LeastSquares).unwrap();
        assert!((est.a1 - c(-0.2, 0.0)).norm() <= 1e-10);
        assert!(est.residual_f <= 1e-10);
        assert_eq!(est.n, 64);
    }

    #[test]
    fn three_point_mode_agrees_with_least_squares() {
        let grid = Grid::new(&eccentric(c(-0.5, 0.2)), 64).unwrap();
        let sol = SzegoSolution::compute(&grid).unwrap();
        let ls = solve_with_solution(&grid, &sol, &Mode::LeastSquares).unwrap();
        let params = [
            BoundaryParameter { boundary: Boundary::Outer, t: 0.4 },
            BoundaryParameter { boundary: Boundary::Outer, t: 2.5 },
            BoundaryParameter { boundary: Boundary::Inner, t: 4.7 },
        ];
        let three = solve_with_solution(&grid, &sol, &Mode::ThreePoint(params)).unwrap();
        assert!((three.a1 - ls.a1).norm() <= 1e-9, "{} vs {}", three.a1, ls.a1);
        assert_eq!(three.mode.name(), "three-point");

        // exactly on grid nodes
        let on_nodes = [
            BoundaryParameter { boundary: Boundary::Outer, t: 0.0 },
            BoundaryParameter { boundary: Boundary::Outer, t: TAU / 4.0 },
            BoundaryParameter { boundary: Boundary::Outer, t: TAU / 2.0 },
        ];
        let three = solve_with_solution(&grid, &sol, &Mode::ThreePoint(on_nodes)).unwrap();
        assert!((three.a1 - ls.a1).norm() <= 1e-9);
    }

    #[test]
    fn three_point_mode_rejects_repeated_parameters() {
        let grid = Grid::new(&eccentric(c(-0.5, 0.2)), 32).unwrap();
        let p = BoundaryParameter { boundary: Boundary::Outer, t: 1.0 };
        assert!(matches!(
            solve_second_zero(&grid, &Mode::ThreePoint([p; 3])),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn simply_connected_input_is_rejected() {
        let region = Region::simply_connected(
            Curve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap(),
            c(0.0, 0.0),
        )
        .unwrap();
        let grid = Grid::new(&region, 16).unwrap();
        assert!(matches!(
            compute_phi(&grid, &[1.0; 16]),
            Err(Error::NotDoublyConnected)
        ));
        assert!(matches!(
            solve_second_zero(&grid, &Mode::LeastSquares),
            Err(Error::NotDoublyConnected)
        ));
    }

    #[test]
    fn estimate_serializes_to_record() {
        let grid = Grid::new(&annulus(c(0.5, 0.0)), 32).unwrap();
        let est = solve_second_zero(&grid, &Mode::LeastSquares).unwrap();
        let value = serde_json::to_value(&est).unwrap();
        assert_eq!(value["mode"], "least-squares");
        assert_eq!(value["n"], 32);
        assert!(value["a1"].as_array().unwrap().len() == 2);
        for key in ["s_defect", "ls_residual", "condition_estimate", "residual_f"] {
            assert!(value[key].is_f64(), "{key}");
        }
    }
}
