//! Complex literals (`a+bi`) and region specs (`disk:cx,cy,r`, `rect:x0,y0,x1,y1`).

use fredholm_core::zeros::Region;
use num_complex::Complex64;

use crate::{CliError, Result};

fn number(s: &str, what: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot read {what} from {s:?}")))?;
    if !x.is_finite() {
        return Err(CliError::Usage(format!("{what} must be finite, got {s:?}")));
    }
    Ok(x)
}

/// Accepts `3`, `-2.5`, `4i`, `-i`, `2+3i`, `1e-3-2i` and spaces around the sign.
pub fn parse_complex(input: &str) -> Result<Complex64> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("malformed complex number {input:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(number(&s, "real part").map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re = number(re, "real part").map_err(|_| bad())?;
    let im = number(im, "imaginary part").map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn parse_region(input: &str) -> Result<Region> {
    let bad = |why: &str| CliError::Usage(format!("region {input:?}: {why}"));
    let (kind, rest) = input.split_once(':').ok_or_else(|| bad("expected disk:cx,cy,r or rect:x0,y0,x1,y1"))?;
    let nums = rest
        .split(',')
        .map(|p| number(p, "coordinate"))
        .collect::<Result<Vec<f64>>>()?;
    match (kind.trim(), nums.as_slice()) {
        ("disk", &[cx, cy, r]) => {
            if r < 0.0 {
                return Err(bad("negative radius"));
            }
            Ok(Region::Disk { cx, cy, r })
        }
        ("rect", &[x0, y0, x1, y1]) => {
            if x1 < x0 || y1 < y0 {
                return Err(bad("corners out of order"));
            }
            Ok(Region::Rect { x0, y0, x1, y1 })
        }
        ("disk", _) => Err(bad("disk takes three numbers")),
        ("rect", _) => Err(bad("rect takes four numbers")),
        _ => Err(bad("unknown region kind")),
    }
}
