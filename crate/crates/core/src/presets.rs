//! Named test regions and the run configurations used to tabulate them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Curve, Orientation, Region};

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const PRESET_NAMES: [&str; 4] = ["example1", "example2", "example3a", "example3b"];

pub const EXAMPLE1_R: f64 = 0.1;
pub const EXAMPLE1_A0: Complex64 = c(0.5, 0.0);
pub const EXAMPLE2_A0: Complex64 = c(-0.5, 0.2);
pub const EXAMPLE2_A0_ALT: Complex64 = c(0.0, -1.0);
pub const EXAMPLE3A_XI: Complex64 = c(0.6452, -0.8655);
pub const EXAMPLE3A_A0: Complex64 = c(-1.3088, 1.8012);
pub const EXAMPLE3B_XI: Complex64 = c(-2.4516, 2.3626);
pub const EXAMPLE3B_A0: Complex64 = c(2.2673, -2.0351);

/// Annulus `r < |z| < 1`; the second zero is `−r/conj(a0)`.
pub fn example1(r: f64, a0: Complex64) -> Result<Region> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidRegion(format!(
            "annulus inner radius must lie in (0, 1), got {r}"
        )));
    }
    Region::doubly_connected(
        Curve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise)?,
        Curve::circle(c(0.0, 0.0), r, Orientation::Clockwise)?,
        a0,
    )
}

/// Exact second zero of the annulus map.
pub fn example1_exact_a1(r: f64, a0: Complex64) -> Complex64 {
    -r / a0.conj()
}

/// Disk of radius 2 with a hole of radius 0.3 centered at `0.2 + 0.6i`.
pub fn example2(a0: Complex64) -> Result<Region> {
    Region::doubly_connected(
        Curve::circle(c(0.0, 0.0), 2.0, Orientation::CounterClockwise)?,
        Curve::circle(c(0.2, 0.6), 0.3, Orientation::Clockwise)?,
        a0,
    )
}

/// Eighteen-armed outer star with a four-lobed hole centered at `xi`.
pub fn example3(xi: Complex64, a0: Complex64) -> Result<Region> {
    Region::doubly_connected(
        Curve::radial_cosine(c(-0.1, -0.4), 6.0, 0.8, 18, Orientation::CounterClockwise)?,
        Curve::radial_cosine(xi, 1.2, 0.4, 4, Orientation::Clockwise)?,
        a0,
    )
}

pub fn example3a() -> Result<Region> {
    example3(EXAMPLE3A_XI, EXAMPLE3A_A0)
}

pub fn example3b() -> Result<Region> {
    example3(EXAMPLE3B_XI, EXAMPLE3B_A0)
}

/// Build a preset by name; `r` only applies to `example1`, `a0` overrides the default zero.
pub fn by_name(name: &str, r: Option<f64>, a0: Option<Complex64>) -> Result<Region> {
    if r.is_some() && name != "example1" {
        return Err(Error::InvalidRegion(format!(
            "the inner radius only applies to example1, not {name}"
        )));
    }
    match name {
        "example1" => example1(r.unwrap_or(EXAMPLE1_R), a0.unwrap_or(EXAMPLE1_A0)),
        "example2" => example2(a0.unwrap_or(EXAMPLE2_A0)),
        "example3a" => example3(EXAMPLE3A_XI, a0.unwrap_or(EXAMPLE3A_A0)),
        "example3b" => example3(EXAMPLE3B_XI, a0.unwrap_or(EXAMPLE3B_A0)),
        other => Err(Error::InvalidRegion(format!(
            "unknown preset {other:?}; expected one of {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn show(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format!("{}", z.re),
        (true, false) => format!("{}i", z.im),
        (false, false) => format!("{}{:+}i", z.re, z.im),
    }
}

/// One block of a results table.
#[derive(Debug, Clone)]
pub struct TableCase {
    pub label: String,
    pub region: Region,
    pub n_list: Vec<usize>,
    /// Known second zero, when there is one.
    pub exact: Option<Complex64>,
}

/// The configurations behind table `id` (`1`, `2`, `3a` or `3b`).
pub fn table_cases(id: &str) -> Result<Vec<TableCase>> {
    let cases = match id {
        "1" => {
            let sym = c(EXAMPLE1_R.sqrt(), 0.0);
            vec![
                TableCase {
                    label: format!("annulus r = {EXAMPLE1_R}, non-symmetric a0 = {}", show(EXAMPLE1_A0)),
                    region: example1(EXAMPLE1_R, EXAMPLE1_A0)?,
                    n_list: vec![64],
                    exact: Some(example1_exact_a1(EXAMPLE1_R, EXAMPLE1_A0)),
                },
                TableCase {
                    label: format!("annulus r = {EXAMPLE1_R}, symmetric a0 = sqrt(r)"),
                    region: example1(EXAMPLE1_R, sym)?,
                    n_list: vec![64],
                    exact: Some(example1_exact_a1(EXAMPLE1_R, sym)),
                },
            ]
        }
        "2" => [EXAMPLE2_A0, EXAMPLE2_A0_ALT]
            .into_iter()
            .map(|a0| {
                Ok(TableCase {
                    label: format!("eccentric circles, a0 = {}", show(a0)),
                    region: example2(a0)?,
                    n_list: vec![16, 32, 64, 128],
                    exact: None,
                })
            })
            .collect::<Result<Vec<_>>>()?,
        "3a" => vec![TableCase {
            label: format!("starfish, xi = {}, a0 = {}", show(EXAMPLE3A_XI), show(EXAMPLE3A_A0)),
            region: example3a()?,
            n_list: vec![128, 256, 512, 1024],
            exact: None,
        }],
        "3b" => vec![TableCase {
            label: format!("starfish, xi = {}, a0 = {}", show(EXAMPLE3B_XI), show(EXAMPLE3B_A0)),
            region: example3b()?,
            n_list: vec![256, 512, 1024],
            exact: None,
        }],
        other => {
            return Err(Error::InvalidRegion(format!(
                "unknown table {other:?}; expected 1, 2, 3a or 3b"
            )))
        }
    };
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_build_and_validate() {
        for name in PRESET_NAMES {
            let region = by_name(name, None, None).unwrap();
            assert!(region.is_doubly_connected());
        }
        assert!(by_name("example4", None, None).is_err());
        assert!(by_name("example2", Some(0.2), None).is_err());
        assert!(example1(1.5, EXAMPLE1_A0).is_err());
        // a0 inside the hole
        assert!(example2(c(0.2, 0.6)).is_err());
    }

    #[test]
    fn starfish_inner_curve_starts_where_expected() {
        let region = example3a().unwrap();
        let z = region.inner().unwrap().point(0.0);
        assert!((z - c(2.2452, -0.8655)).norm() < 1e-12);
        let z = region.outer().point(0.0);
        assert!((z - c(6.7, -0.4)).norm() < 1e-12);
    }

    #[test]
    fn table_layouts() {
        assert_eq!(table_cases("1").unwrap().len(), 2);
        let t2 = table_cases("2").unwrap();
        assert_eq!(t2[1].region.a0(), EXAMPLE2_A0_ALT);
        assert_eq!(table_cases("3b").unwrap()[0].n_list, vec![256, 512, 1024]);
        assert!(table_cases("4").is_err());
        assert_eq!(t2[1].label, "eccentric circles, a0 = -1i");
        assert_eq!(show(c(0.6452, -0.8655)), "0.6452-0.8655i");
        let exact = table_cases("1").unwrap()[1].exact.unwrap();
        assert!((exact + EXAMPLE1_R.sqrt()).norm() < 1e-15);
    }
}
