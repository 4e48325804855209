//! Boundary curves, doubly connected regions and the Nyström grid.
//!
//! Every curve is a 2π-periodic parameterization `z(t)` whose first three
//! derivatives are available in closed form. The kernel diagonals need `z‴`
//! to full accuracy, so nothing here differentiates numerically.
//!
//! ```
//! use ahlfors::geometry::{Curve, Orientation, Region, Grid};
//! use num_complex::Complex64;
//!
//! let outer = Curve::circle(Complex64::new(0.0, 0.0), 1.0, Orientation::CounterClockwise)?;
//! let inner = Curve::circle(Complex64::new(0.0, 0.0), 0.1, Orientation::Clockwise)?;
//! let region = Region::doubly_connected(outer, inner, Complex64::new(0.5, 0.0))?;
//! let grid = Grid::new(&region, 64)?;
//! assert_eq!(grid.len(), 128);
//! # Ok::<(), ahlfors::Error>(())
//! ```

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Node count used when validating region topology.
const CHECK_NODES: usize = 2048;

/// Direction in which a curve is traversed as `t` increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    /// The rotation sign σ = ±1.
    pub fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

impl TryFrom<i8> for Orientation {
    type Error = String;

    fn try_from(value: i8) -> std::result::Result<Self, Self::Error> {
        match value {
            1 => Ok(Orientation::CounterClockwise),
            -1 => Ok(Orientation::Clockwise),
            other => Err(format!("sigma must be +1 or -1, got {other}")),
        }
    }
}

impl From<Orientation> for i8 {
    fn from(value: Orientation) -> Self {
        match value {
            Orientation::CounterClockwise => 1,
            Orientation::Clockwise => -1,
        }
    }
}

/// Which boundary component a node or parameter belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    Outer,
    Inner,
}

impl Boundary {
    pub fn index(self) -> usize {
        match self {
            Boundary::Outer => 0,
            Boundary::Inner => 1,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Outer => f.write_str("outer"),
            Boundary::Inner => f.write_str("inner"),
        }
    }
}

/// Position and first three parameter derivatives of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub z: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

/// Serializable description of a curve, as it appears in region files.
///
/// Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveSpec {
    Circle {
        #[serde(default)]
        center: Complex64,
        radius: f64,
        #[serde(default = "ccw")]
        sigma: Orientation,
    },
    RadialCosine {
        #[serde(default)]
        center: Complex64,
        radius: f64,
        amplitude: f64,
        frequency: u32,
        #[serde(default = "ccw")]
        sigma: Orientation,
    },
    /// `center + Σ c_k e^{ikt}` with `k` running over `-K..=K`; the list
    /// holds `2K + 1` coefficients starting at `k = -K`.
    TrigPolynomial {
        #[serde(default)]
        center: Complex64,
        coefficients: Vec<Complex64>,
    },
}

fn ccw() -> Orientation {
    Orientation::CounterClockwise
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Circle {
        radius: f64,
        orientation: Orientation,
    },
    RadialCosine {
        radius: f64,
        amplitude: f64,
        frequency: u32,
        orientation: Orientation,
    },
    TrigPolynomial {
        coefficients: Vec<Complex64>,
    },
}

/// A smooth 2π-periodic Jordan curve with a closed-form derivative jet.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    center: Complex64,
    shape: Shape,
}

impl Curve {
    /// `z(t) = center + radius·e^{iσt}`.
    pub fn circle(center: Complex64, radius: f64, orientation: Orientation) -> Result<Curve> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidCurve(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        Ok(Curve {
            center,
            shape: Shape::Circle {
                radius,
                orientation,
            },
        })
    }

    /// `z(t) = center + (radius + amplitude·cos(frequency·t))·e^{iσt}`.
    pub fn radial_cosine(
        center: Complex64,
        radius: f64,
        amplitude: f64,
        frequency: u32,
        orientation: Orientation,
    ) -> Result<Curve> {
        if !(radius.is_finite() && amplitude.is_finite() && radius > amplitude.abs()) {
            return Err(Error::InvalidCurve(format!(
                "radial-cosine curve needs radius > |amplitude|, got radius {radius}, amplitude {amplitude}"
            )));
        }
        if frequency == 0 {
            return Err(Error::InvalidCurve(
                "radial-cosine frequency must be at least 1".into(),
            ));
        }
        Ok(Curve {
            center,
            shape: Shape::RadialCosine {
                radius,
                amplitude,
                frequency,
                orientation,
            },
        })
    }

    /// `z(t) = center + Σ_{k=-K}^{K} c_k e^{ikt}`; `coefficients` has odd length `2K + 1`.
    pub fn trig_polynomial(center: Complex64, coefficients: Vec<Complex64>) -> Result<Curve> {
        if coefficients.len() % 2 == 0 {
            return Err(Error::InvalidCurve(format!(
                "trigonometric polynomial needs an odd number of coefficients (k = -K..=K), got {}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidCurve("non-finite coefficient".into()));
        }
        Ok(Curve {
            center,
            shape: Shape::TrigPolynomial { coefficients },
        })
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Curve> {
        match spec {
            CurveSpec::Circle {
                center,
                radius,
                sigma,
            } => Curve::circle(*center, *radius, *sigma),
            CurveSpec::RadialCosine {
                center,
                radius,
                amplitude,
                frequency,
                sigma,
            } => Curve::radial_cosine(*center, *radius, *amplitude, *frequency, *sigma),
            CurveSpec::TrigPolynomial {
                center,
                coefficients,
            } => Curve::trig_polynomial(*center, coefficients.clone()),
        }
    }

    pub fn to_spec(&self) -> CurveSpec {
        match &self.shape {
            Shape::Circle {
                radius,
                orientation,
            } => CurveSpec::Circle {
                center: self.center,
                radius: *radius,
                sigma: *orientation,
            },
            Shape::RadialCosine {
                radius,
                amplitude,
                frequency,
                orientation,
            } => CurveSpec::RadialCosine {
                center: self.center,
                radius: *radius,
                amplitude: *amplitude,
                frequency: *frequency,
                sigma: *orientation,
            },
            Shape::TrigPolynomial { coefficients } => CurveSpec::TrigPolynomial {
                center: self.center,
                coefficients: coefficients.clone(),
            },
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    /// The same curve shifted by `offset`.
    pub fn translated(&self, offset: Complex64) -> Curve {
        Curve {
            center: self.center + offset,
            shape: self.shape.clone(),
        }
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.jet(t).z
    }

    /// Exact `(z, z′, z″, z‴)` at `t`; `t` is reduced modulo 2π first.
    pub fn jet(&self, t: f64) -> Jet {
        let t = t.rem_euclid(TAU);
        match &self.shape {
            Shape::Circle {
                radius,
                orientation,
            } => {
                let rot = I * orientation.sign();
                let e = (rot * t).exp() * *radius;
                Jet {
                    z: self.center + e,
                    d1: rot * e,
                    d2: rot * rot * e,
                    d3: rot * rot * rot * e,
                }
            }
            Shape::RadialCosine {
                radius,
                amplitude,
                frequency,
                orientation,
            } => {
                let m = f64::from(*frequency);
                let (s, c) = (m * t).sin_cos();
                // r(t) and its derivatives
                let r0 = radius + amplitude * c;
                let r1 = -amplitude * m * s;
                let r2 = -amplitude * m * m * c;
                let r3 = amplitude * m * m * m * s;
                let rot = I * orientation.sign();
                let e = (rot * t).exp();
                // Leibniz rule on r(t)·e^{iσt}
                Jet {
                    z: self.center + e * r0,
                    d1: e * (r1 + rot * r0),
                    d2: e * (r2 + rot * r1 * 2.0 + rot * rot * r0),
                    d3: e * (r3 + rot * r2 * 3.0 + rot * rot * r1 * 3.0 + rot * rot * rot * r0),
                }
            }
            Shape::TrigPolynomial { coefficients } => {
                let half = (coefficients.len() / 2) as i64;
                let mut jet = Jet {
                    z: self.center,
                    d1: Complex64::default(),
                    d2: Complex64::default(),
                    d3: Complex64::default(),
                };
                for (idx, c) in coefficients.iter().enumerate() {
                    let k = idx as i64 - half;
                    let ik = I * k as f64;
                    let term = *c * (ik * t).exp();
                    jet.z += term;
                    jet.d1 += ik * term;
                    jet.d2 += ik * ik * term;
                    jet.d3 += ik * ik * ik * term;
                }
                jet
            }
        }
    }

    /// Trapezoidal winding number `(1/2πi) Σ w z′/(z − p)` with `n` nodes.
    ///
    /// Returns the real part; it rounds to the exact winding number once `n`
    /// resolves the curve near `p`.
    pub fn winding_number(&self, p: Complex64, n: usize) -> f64 {
        let w = TAU / n as f64;
        let sum: Complex64 = (0..n)
            .map(|i| {
                let jet = self.jet(w * i as f64);
                jet.d1 / (jet.z - p)
            })
            .sum();
        (sum * w / (2.0 * PI * I)).re
    }

    /// Winding number refined by doubling `n` until it sits within `1e-3` of
    /// an integer, or `n` reaches 2¹⁸.
    pub fn winding_number_resolved(&self, p: Complex64, n: usize) -> f64 {
        let mut n = n.max(8);
        loop {
            let w = self.winding_number(p, n);
            if (w - w.round()).abs() < 1e-3 || n >= 1 << 18 || !w.is_finite() {
                return w;
            }
            n *= 2;
        }
    }

    /// Signed enclosed area; positive for counterclockwise traversal.
    pub fn signed_area(&self, n: usize) -> f64 {
        let w = TAU / n as f64;
        let sum: f64 = (0..n)
            .map(|i| {
                let jet = self.jet(w * i as f64);
                (jet.z.conj() * jet.d1).im
            })
            .sum();
        0.5 * w * sum
    }
}

/// Serializable region description: `{"outer": .., "inner": .., "a0": [re, im]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub outer: CurveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<CurveSpec>,
    pub a0: Complex64,
}

/// A bounded region with a counterclockwise outer curve, an optional clockwise
/// inner curve and the prescribed zero `a0`.
///
/// The simply connected case (no inner curve) exists for the disk checks of
/// the Szegő solver; everything that needs the second zero rejects it.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    outer: Curve,
    inner: Option<Curve>,
    a0: Complex64,
}

impl Region {
    pub fn doubly_connected(outer: Curve, inner: Curve, a0: Complex64) -> Result<Region> {
        let region = Region {
            outer,
            inner: Some(inner),
            a0,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn simply_connected(outer: Curve, a0: Complex64) -> Result<Region> {
        let region = Region {
            outer,
            inner: None,
            a0,
        };
        region.validate()?;
        Ok(region)
    }

    pub fn from_spec(spec: &RegionSpec) -> Result<Region> {
        let outer = Curve::from_spec(&spec.outer)?;
        match &spec.inner {
            Some(inner) => Region::doubly_connected(outer, Curve::from_spec(inner)?, spec.a0),
            None => Region::simply_connected(outer, spec.a0),
        }
    }

    pub fn to_spec(&self) -> RegionSpec {
        RegionSpec {
            outer: self.outer.to_spec(),
            inner: self.inner.as_ref().map(Curve::to_spec),
            a0: self.a0,
        }
    }

    /// Parse a region file.
    pub fn from_json(text: &str) -> Result<Region> {
        let spec: RegionSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidRegion(format!("bad region file: {e}")))?;
        Region::from_spec(&spec)
    }

    pub fn outer(&self) -> &Curve {
        &self.outer
    }

    pub fn inner(&self) -> Option<&Curve> {
        self.inner.as_ref()
    }

    pub fn curve(&self, boundary: Boundary) -> Option<&Curve> {
        match boundary {
            Boundary::Outer => Some(&self.outer),
            Boundary::Inner => self.inner.as_ref(),
        }
    }

    pub fn boundaries(&self) -> &'static [Boundary] {
        if self.inner.is_some() {
            &[Boundary::Outer, Boundary::Inner]
        } else {
            &[Boundary::Outer]
        }
    }

    pub fn is_doubly_connected(&self) -> bool {
        self.inner.is_some()
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    /// Same boundary, different prescribed zero.
    pub fn with_a0(&self, a0: Complex64) -> Result<Region> {
        let region = Region {
            outer: self.outer.clone(),
            inner: self.inner.clone(),
            a0,
        };
        region.validate()?;
        Ok(region)
    }

    /// The whole configuration (curves and `a0`) shifted by `offset`.
    pub fn translated(&self, offset: Complex64) -> Result<Region> {
        let region = Region {
            outer: self.outer.translated(offset),
            inner: self.inner.as_ref().map(|c| c.translated(offset)),
            a0: self.a0 + offset,
        };
        region.validate()?;
        Ok(region)
    }

    /// Winding numbers of the outer and inner curve about `p`.
    pub fn windings(&self, p: Complex64) -> (f64, f64) {
        let outer = self.outer.winding_number(p, CHECK_NODES);
        let inner = self
            .inner
            .as_ref()
            .map_or(0.0, |c| c.winding_number(p, CHECK_NODES));
        (outer, inner)
    }

    /// Whether `p` lies strictly inside the region.
    pub fn contains(&self, p: Complex64) -> bool {
        let (outer, inner) = self.windings(p);
        (outer - 1.0).abs() < 0.4 && inner.abs() < 0.4
    }

    fn validate(&self) -> Result<()> {
        if !(self.a0.re.is_finite() && self.a0.im.is_finite()) {
            return Err(Error::InvalidRegion("a0 must be finite".into()));
        }
        if self.outer.signed_area(CHECK_NODES) <= 0.0 {
            return Err(Error::InvalidRegion(
                "outer curve must be counterclockwise".into(),
            ));
        }
        if let Some(inner) = &self.inner {
            if inner.signed_area(CHECK_NODES) >= 0.0 {
                return Err(Error::InvalidRegion("inner curve must be clockwise".into()));
            }
            let samples = 256;
            for k in 0..samples {
                let p = inner.point(TAU * k as f64 / samples as f64);
                let winding = self.outer.winding_number(p, CHECK_NODES);
                if !((winding - 1.0).abs() < 0.4) {
                    return Err(Error::InvalidRegion(
                        "inner curve is not enclosed by the outer curve".into(),
                    ));
                }
            }
        }
        let (outer, inner) = self.windings(self.a0);
        if !((outer - 1.0).abs() < 0.4 && inner.abs() < 0.4) {
            return Err(Error::NotInterior {
                point: self.a0,
                outer_winding: outer,
                inner_winding: inner,
            });
        }
        Ok(())
    }
}

/// Geometry cached at one parameter value of one boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub boundary: Boundary,
    pub t: f64,
    pub jet: Jet,
    /// Unit tangent `T = z′/|z′|`.
    pub tangent: Complex64,
    /// `|z′|`.
    pub speed: f64,
    /// `T′(z(t))·z′(t) = d/dt T(z(t))`.
    pub tangent_rate: Complex64,
}

impl Node {
    pub fn on(curve: &Curve, boundary: Boundary, t: f64) -> Node {
        let jet = curve.jet(t);
        let speed = jet.d1.norm();
        let tangent = jet.d1 / speed;
        let tangent_rate =
            jet.d2 / (2.0 * speed) - jet.d1 * jet.d1 * jet.d2.conj() / (2.0 * speed.powi(3));
        Node {
            boundary,
            t,
            jet,
            tangent,
            speed,
            tangent_rate,
        }
    }

    pub fn z(&self) -> Complex64 {
        self.jet.z
    }
}

/// Equispaced periodic trapezoidal nodes on every boundary component.
///
/// Nodes `t_i = 2πi/n`, `i = 0..n`, on each curve; outer-boundary nodes come
/// first. All quadratures share the weight `2π/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    region: Region,
    n: usize,
    nodes: Vec<Node>,
}

impl Grid {
    pub fn new(region: &Region, n: usize) -> Result<Grid> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "nodes per curve must be even and at least 8, got {n}"
            )));
        }
        let h = TAU / n as f64;
        let mut nodes = Vec::with_capacity(n * region.boundaries().len());
        for &boundary in region.boundaries() {
            let curve = region.curve(boundary).expect("listed boundary exists");
            for i in 0..n {
                let t = h * i as f64;
                let node = Node::on(curve, boundary, t);
                let scale = 1.0 + node.jet.z.norm();
                if !(node.speed > 1e-13 * scale) || !node.tangent.re.is_finite() {
                    return Err(Error::DegenerateCurve { boundary, t });
                }
                nodes.push(node);
            }
        }
        Ok(Grid {
            region: region.clone(),
            n,
            nodes,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Nodes per curve.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total node count over all curves.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Trapezoidal weight `2π/n`.
    pub fn weight(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn is_doubly_connected(&self) -> bool {
        self.region.is_doubly_connected()
    }

    /// Node indices belonging to `boundary` (empty if the region lacks it).
    pub fn range(&self, boundary: Boundary) -> Range<usize> {
        match boundary {
            Boundary::Outer => 0..self.n,
            Boundary::Inner if self.is_doubly_connected() => self.n..2 * self.n,
            Boundary::Inner => self.n..self.n,
        }
    }

    /// Discrete winding number of one boundary curve about `p`.
    pub fn winding_number(&self, boundary: Boundary, p: Complex64) -> f64 {
        let sum: Complex64 = self.nodes[self.range(boundary)]
            .iter()
            .map(|node| node.jet.d1 / (node.jet.z - p))
            .sum();
        (sum * self.weight() / (2.0 * PI * I)).re
    }
}
