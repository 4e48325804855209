//! Interior evaluation of the Ahlfors map and convergence sweeps.
//!
//! The Cauchy integral is evaluated in ratio form
//!
//! ```text
//! f(z) = ∫_Γ f(w)/(w − z) dw  /  ∫_Γ 1/(w − z) dw
//! ```
//!
//! with both integrals discretized by the same trapezoidal rule. The
//! quadrature error of the denominator tracks that of the numerator, so the
//! ratio stays accurate much closer to the boundary than the plain formula.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Boundary, Grid, Region};
use crate::szego::SzegoSolution;
use crate::zerofinder::{self, Mode, ZeroEstimate};

const TWO_PI_I: Complex64 = Complex64 { re: 0.0, im: TAU };

/// One interior evaluation with its stability diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorSample {
    pub point: Complex64,
    pub value: Complex64,
    /// `|∫_Γ dw/(w − z)|` as discretized; `2π` for well-resolved interior points.
    pub denominator_magnitude: f64,
}

impl InteriorSample {
    /// The discrete denominator has collapsed, i.e. `z` sits on top of `Γ`
    /// relative to the node spacing.
    pub fn near_boundary(&self) -> bool {
        self.denominator_magnitude < 1e-3 * 2.0 * PI
    }
}

/// Reject points whose winding numbers are not (1, 0).
///
/// The grid's own quadrature is tried first; near the boundary, where it is
/// unreliable, the curves are resampled more finely.
pub fn check_interior(grid: &Grid, z: Complex64) -> Result<()> {
    for (i, node) in grid.nodes().iter().enumerate() {
        if (node.z() - z).norm() <= 1e-14 * (1.0 + z.norm()) {
            return Err(Error::PointOnBoundary { point: z, node: i });
        }
    }
    let winding = |b: Boundary| {
        let coarse = grid.winding_number(b, z);
        if (coarse - coarse.round()).abs() < 1e-3 {
            coarse
        } else {
            let curve = grid.region().curve(b).expect("boundary present in grid");
            curve.winding_number_resolved(z, 2 * grid.n())
        }
    };
    let outer = winding(Boundary::Outer);
    let inner = if grid.is_doubly_connected() {
        winding(Boundary::Inner)
    } else {
        0.0
    };
    if (outer - 1.0).abs() < 0.4 && inner.abs() < 0.4 {
        Ok(())
    } else {
        Err(Error::NotInterior {
            point: z,
            outer_winding: outer,
            inner_winding: inner,
        })
    }
}

fn sums(grid: &Grid, f_boundary: &[Complex64], z: Complex64) -> Result<(Complex64, Complex64)> {
    if f_boundary.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: f_boundary.len(),
        });
    }
    check_interior(grid, z)?;
    let (mut num, mut den) = (Complex64::default(), Complex64::default());
    for (node, f) in grid.nodes().iter().zip(f_boundary) {
        let kernel = node.jet.d1 / (node.z() - z);
        num += f * kernel;
        den += kernel;
    }
    let w = grid.weight();
    Ok((num * w, den * w))
}

pub fn cauchy_sample(grid: &Grid, f_boundary: &[Complex64], z: Complex64) -> Result<InteriorSample> {
    let (num, den) = sums(grid, f_boundary, z)?;
    Ok(InteriorSample {
        point: z,
        value: num / den,
        denominator_magnitude: den.norm(),
    })
}

/// Ratio-form Cauchy evaluation of the boundary data `f_boundary` at `z`.
pub fn cauchy_eval(grid: &Grid, f_boundary: &[Complex64], z: Complex64) -> Result<Complex64> {
    cauchy_sample(grid, f_boundary, z).map(|s| s.value)
}

/// Plain `(1/2πi) ∫_Γ f(w)/(w − z) dw`; kept for comparison with the ratio form.
pub fn cauchy_eval_plain(grid: &Grid, f_boundary: &[Complex64], z: Complex64) -> Result<Complex64> {
    let (num, _) = sums(grid, f_boundary, z)?;
    Ok(num / TWO_PI_I)
}

/// `|f(a₁)|` for a candidate zero; a point outside the region is a solve failure.
pub fn residual_at(grid: &Grid, solution: &SzegoSolution, a1: Complex64) -> Result<f64> {
    match cauchy_eval(grid, &solution.f_boundary, a1) {
        Ok(v) => Ok(v.norm()),
        Err(e @ (Error::NotInterior { .. } | Error::PointOnBoundary { .. })) => {
            Err(Error::ZeroOutsideRegion {
                point: a1,
                reason: e.to_string(),
            })
        }
        Err(e) => Err(e),
    }
}

/// One row of a convergence sweep; failures are recorded, not propagated.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(flatten)]
    pub estimate: Option<ZeroEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Run the full pipeline once per `n`.
pub fn convergence_sweep(region: &Region, n_list: &[usize], mode: &Mode) -> Vec<SweepRow> {
    n_list
        .iter()
        .map(|&n| {
            let outcome = Grid::new(region, n).and_then(|grid| zerofinder::solve_second_zero(&grid, mode));
            match outcome {
                Ok(estimate) => SweepRow {
                    n,
                    estimate: Some(estimate),
                    error: None,
                },
                Err(e) => SweepRow {
                    n,
                    estimate: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Curve, Orientation};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk_grid(n: usize) -> Grid {
        let region = Region::simply_connected(
            Curve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap(),
            c(0.0, 0.0),
        )
        .unwrap();
        Grid::new(&region, n).unwrap()
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
    fn identity_map_on_disk() {
        let grid = disk_grid(64);
        let f: Vec<Complex64> = grid.nodes().iter().map(|n| n.z()).collect();
        let v = cauchy_eval(&grid, &f, c(0.3, 0.1)).unwrap();
        assert!((v - c(0.3, 0.1)).norm() <= 1e-12);
    }

    #[test]
    fn rejects_exterior_and_hole_points() {
        let grid = Grid::new(&eccentric(c(-0.5, 0.2)), 64).unwrap();
        let f = vec![c(1.0, 0.0); grid.len()];
        assert!(matches!(cauchy_eval(&grid, &f, c(3.0, 0.0)), Err(Error::NotInterior { .. })));
        assert!(matches!(cauchy_eval(&grid, &f, c(0.2, 0.6)), Err(Error::NotInterior { .. })));
        assert!(matches!(
            cauchy_eval(&grid, &f, grid.node(5).z()),
            Err(Error::PointOnBoundary { node: 5, .. })
        ));
        let sample = cauchy_sample(&grid, &f, c(0.5, -0.5)).unwrap();
        assert!((sample.denominator_magnitude - TAU).abs() < 1e-10);
        assert!(!sample.near_boundary());
        assert!((sample.value - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn vanishes_at_prescribed_zero() {
        let a0 = c(-0.5, 0.2);
        let grid = Grid::new(&eccentric(a0), 128).unwrap();
        let sol = SzegoSolution::compute(&grid).unwrap();
        assert!(cauchy_eval(&grid, &sol.f_boundary, a0).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn reproduces_analytic_functions_spectrally() {
        let region = eccentric(c(-0.5, 0.2));
        let g = |z: Complex64| (z * 0.3).exp() + 1.0 / (z - c(5.0, 1.0));
        let points = [c(1.0, -1.0), c(-1.2, 0.4), c(0.6, 0.6)];
        let mut previous = f64::INFINITY;
        for n in [16, 32, 64] {
            let grid = Grid::new(&region, n).unwrap();
            let f: Vec<Complex64> = grid.nodes().iter().map(|node| g(node.z())).collect();
            let err = points
                .iter()
                .map(|&p| (cauchy_eval(&grid, &f, p).unwrap() - g(p)).norm())
                .fold(0.0, f64::max);
            assert!(err < previous / 10.0 || err < 1e-13, "n={n}: {err}");
            previous = err;
        }
        assert!(previous < 1e-10);
    }

    #[test]
    fn ratio_form_beats_plain_form_near_boundary() {
        let region = eccentric(c(-0.5, 0.2));
        let grid = Grid::new(&region, 64).unwrap();
        let g = |z: Complex64| (z * c(0.2, 0.5)).exp();
        let f: Vec<Complex64> = grid.nodes().iter().map(|node| g(node.z())).collect();
        for theta in [0.05, 1.3, 2.9, 4.4] {
            let p = Complex64::from_polar(2.0 - 1e-2, theta);
            let ratio = (cauchy_eval(&grid, &f, p).unwrap() - g(p)).norm();
            let plain = (cauchy_eval_plain(&grid, &f, p).unwrap() - g(p)).norm();
            assert!(ratio <= plain, "θ={theta}: ratio {ratio} plain {plain}");
        }
    }

    #[test]
    fn sweep_records_failures_and_continues() {
        let region = eccentric(c(-0.5, 0.2));
        let rows = convergence_sweep(&region, &[7, 16], &Mode::LeastSquares);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_some() && rows[0].estimate.is_none());
        assert!(rows[1].estimate.is_some());
    }
}
