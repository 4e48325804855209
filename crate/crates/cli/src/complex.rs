//! Command-line syntax for complex numbers: `a+bi`, `a-bi`, `bi`, `a`, `-i`.

use num_complex::Complex64;

pub fn parse(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {text:?} as a complex number (expected a+bi)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // split before the last sign that is not a leading sign or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Inverse of [`parse`] with full precision.
pub fn format(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", real(z.re), sign, real(z.im.abs()))
}

fn real(x: f64) -> String {
    if x != 0.0 && !(1e-4..1e15).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn accepted_forms() {
        for (text, want) in [
            ("0.5", c(0.5, 0.0)),
            ("-0.5+0.2i", c(-0.5, 0.2)),
            ("-i", c(0.0, -1.0)),
            ("i", c(0.0, 1.0)),
            ("+i", c(0.0, 1.0)),
            ("2.5i", c(0.0, 2.5)),
            ("0.5-i", c(0.5, -1.0)),
            ("1e-3-2E+1i", c(1e-3, -20.0)),
            ("-1.3088+1.8012i", c(-1.3088, 1.8012)),
            (" 1 + 2i ", c(1.0, 2.0)),
        ] {
            assert_eq!(parse(text).unwrap(), want, "{text}");
        }
    }

    #[test]
    fn rejected_forms() {
        for text in ["", "abc", "1+", "1+2", "1+2k", "nan", "1++2i", "inf+0i"] {
            assert!(parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn round_trip() {
        for z in [c(0.1, -0.3), c(-2.0, 0.0), c(1e-17, 3.5e8), c(-0.2, 5.1e-17), c(2e20, -0.0)] {
            assert_eq!(parse(&format(z)).unwrap(), z);
        }
        assert_eq!(format(c(-0.2, 5.1e-17)), "-0.2+5.1e-17i");
    }
}
