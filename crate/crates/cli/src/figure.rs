//! Zeroes of a partial sum as polar data, with the radial coordinate rescaled
//! to the hyperbolic distance `log((1 + rho) / (1 - rho))`.

use std::io::{BufRead, Write};

use fredholm_core::zeros::FigureScan;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureDatum {
    pub theta: f64,
    pub rho: f64,
    pub rho_rescaled: f64,
}

/// `log((1 + rho) / (1 - rho))`, written as `log1p(2 rho / (1 - rho))` so small
/// moduli keep their relative accuracy.
pub fn rescale(rho: f64) -> f64 {
    (2.0 * rho / (1.0 - rho)).ln_1p()
}

impl FigureDatum {
    pub fn from_point(re: f64, im: f64) -> FigureDatum {
        let rho = re.hypot(im);
        FigureDatum {
            theta: im.atan2(re),
            rho,
            rho_rescaled: rescale(rho),
        }
    }
}

pub fn figure_data(scan: &FigureScan) -> Vec<FigureDatum> {
    scan.zeros.iter().map(|z| FigureDatum::from_point(z.re, z.im)).collect()
}

/// One line per comment, then the CSV header and rows.
pub fn write_csv<W: Write>(mut out: W, comments: &[String], data: &[FigureDatum]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for d in data {
        w.serialize(d)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads what `write_csv` wrote, skipping `#` lines.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<FigureDatum>> {
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if !line.starts_with('#') {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// Plain scatter of `(rho_rescaled cos theta, rho_rescaled sin theta)`.
pub fn svg(data: &[FigureDatum]) -> String {
    let reach = data.iter().map(|d| d.rho_rescaled).fold(1.0, f64::max) * 1.05;
    let size = 800.0;
    let to_px = |x: f64| size * (0.5 + 0.5 * x / reach);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for d in data {
        let (x, y) = (d.rho_rescaled * d.theta.cos(), d.rho_rescaled * d.theta.sin());
        s.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.5\" fill=\"black\"/>\n",
            to_px(x),
            to_px(-y)
        ));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale(0.0), 0.0);
        let e = std::f64::consts::E;
        assert!((rescale((e - 1.0) / (e + 1.0)) - 1.0).abs() < 1e-12);
        for k in 1..1000 {
            let rho = k as f64 / 1000.0 * 0.999;
            let direct = ((1.0 + rho) / (1.0 - rho)).ln();
            assert!((rescale(rho) - direct).abs() <= 1e-12 * direct.max(1.0));
            assert!(rescale(rho) > rescale(rho - 1e-4));
        }
    }

    #[test]
    fn csv_roundtrip() {
        let data: Vec<FigureDatum> = (0..50)
            .map(|k| FigureDatum::from_point(0.0193 * k as f64 - 0.5, 0.3 - 0.0071 * k as f64))
            .collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &["test".into()], &data).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# test\ntheta,rho,rho_rescaled\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), data);
    }
}
