//! Each command renders to text; `main` decides where the text goes. A command
//! that ran but found a failed check returns `ok = false` (exit status 1).

use fredholm_core::constants::ConstantTable;
use fredholm_core::expsums::ExpSumReport;
use fredholm_core::zeros::{attain, figure_scan, zero_table, Region, TransportResult, ZeroCertificate, ZeroTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::figure::{figure_data, svg, write_csv, FigureDatum};
use crate::verify::{run_suite, Suite};
use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub ok: bool,
    /// Human-readable remarks for stderr.
    pub notes: Vec<String>,
}

impl Output {
    fn new(text: String, ok: bool) -> Output {
        Output {
            text,
            ok,
            notes: Vec::new(),
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

fn json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn verify(suite: Suite) -> Result<Output> {
    let report = run_suite(suite)?;
    let mut out = Output::new(json_pretty(&report)?, report.passed);
    for c in report.checks.iter().filter(|c| !c.passed) {
        out.notes.push(format!("FAILED {}: {}", c.name, c.detail));
    }
    Ok(out)
}

/// Certificates one per line (JSON lines) or as CSV rows.
pub fn render_certificates(zeros: &[ZeroCertificate], format: Format) -> Result<String> {
    match format {
        Format::Json => zeros.iter().map(json_line).collect(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for z in zeros {
                w.serialize(z)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv writes utf-8"))
        }
    }
}

pub fn parse_certificates_json(text: &str) -> Result<Vec<ZeroCertificate>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(CliError::from))
        .collect()
}

pub fn zeros(region: &Region, terms: usize, tol: f64, format: Format) -> Result<(Output, ZeroTable)> {
    let table = zero_table(terms, region, tol)?;
    let mut out = Output::new(render_certificates(&table.zeros, format)?, table.is_complete());
    out.notes.push(format!(
        "{} certified zeroes, boundary winding {}, {} unresolved",
        table.zeros.len(),
        table.boundary_winding.map_or("n/a".to_string(), |w| w.to_string()),
        table.unresolved.len()
    ));
    for c in &table.unresolved {
        out.notes.push(format!(
            "unresolved cell [{}, {}] x [{}, {}]",
            c.x0, c.x1, c.y0, c.y1
        ));
    }
    Ok((out, table))
}

pub struct FigureOutput {
    pub csv: Output,
    pub svg: String,
    pub data: Vec<FigureDatum>,
}

pub fn figure(terms: usize) -> Result<FigureOutput> {
    let scan = figure_scan(terms)?;
    let data = figure_data(&scan);
    let comments = vec![
        format!("zeroes of sum_(n=0)^{terms} z^(2^n) in |z| < 1"),
        format!(
            "winding count {}, certified {}, unresolved {}",
            scan.winding_count,
            scan.zeros.len(),
            scan.unresolved.len()
        ),
        "rho_rescaled = log((1 + rho) / (1 - rho))".to_string(),
    ];
    let mut buf = Vec::new();
    write_csv(&mut buf, &comments, &data)?;
    let mut csv = Output::new(String::from_utf8(buf).expect("csv writes utf-8"), scan.is_complete());
    if !scan.unresolved.is_empty() {
        csv.notes.push(format!("warning: {} roots left unresolved", scan.unresolved.len()));
    }
    csv.notes.push(format!("{} zeroes in the unit disk", data.len()));
    Ok(FigureOutput {
        svg: svg(&data),
        csv,
        data,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttainFailure {
    pub a: u32,
    pub v_re: f64,
    pub v_im: f64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttainReport {
    Certified(TransportResult),
    Failed(AttainFailure),
}

pub fn attain_cmd(v: Complex64, a: u32) -> Result<(Output, AttainReport)> {
    let report = match attain(a, v) {
        Ok(r) => AttainReport::Certified(r),
        Err(e) => AttainReport::Failed(AttainFailure {
            a,
            v_re: v.re,
            v_im: v.im,
            error: e.to_string(),
        }),
    };
    let ok = matches!(report, AttainReport::Certified(_));
    Ok((Output::new(json_pretty(&report)?, ok), report))
}

pub fn constants(m_max: u32) -> Result<Output> {
    let table = ConstantTable::build(m_max)?;
    let ok = table.check().is_ok();
    Ok(Output::new(json_pretty(&table)?, ok))
}

pub fn moments(n: u32, grid: usize) -> Result<Output> {
    let report = ExpSumReport::compute(n, grid)?;
    Ok(Output::new(json_pretty(&report)?, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates_roundtrip_through_json_lines() {
        let (out, table) = zeros(&Region::disk(Complex64::new(0.0, 0.0), 0.7), 13, 1e-12, Format::Json).unwrap();
        assert!(out.ok);
        assert_eq!(parse_certificates_json(&out.text).unwrap(), table.zeros);
        let csv = render_certificates(&table.zeros, Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), table.zeros.len() + 1);
    }

    #[test]
    fn empty_region_gives_empty_output() {
        let (out, table) = zeros(&Region::disk(Complex64::new(0.3, 0.0), 0.0), 13, 1e-12, Format::Json).unwrap();
        assert!(table.zeros.is_empty());
        assert!(out.text.is_empty());
    }
}
