//! Report rows and artifact rendering.
//!
//! Every scenario produces typed rows that render both ways: CSV with a
//! mandatory header, RFC-4180 quoting and 12-significant-digit decimals,
//! and a JSON report that additionally carries run metadata. CSV output
//! is byte-identical for a fixed config and seed; the wall time lives
//! only in the JSON metadata.

use serde::Serialize;

use crate::error::{Error, Result};

/// Significant digits used for CSV decimals.
pub const CSV_SIG_DIGITS: usize = 12;

/// Formats `v` with the given number of significant digits in plain
/// decimal notation (no exponent), trimming trailing fractional zeros.
pub fn fmt_sig(v: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mant, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits_str: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(digits_str.trim_end_matches('0'));
    } else if point as usize >= digits_str.len() {
        out.push_str(&digits_str);
        for _ in 0..(point as usize - digits_str.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits_str[..point as usize]);
        let frac = digits_str[point as usize..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    out
}

fn sig(v: f64) -> String {
    fmt_sig(v, CSV_SIG_DIGITS)
}

/// One Monte Carlo moment comparison row.
#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub word: String,
    pub n: usize,
    pub trials: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub limit: f64,
    pub gap: f64,
    pub pass: bool,
}

/// Per-sample spectrum summary row.
#[derive(Debug, Clone, Serialize)]
pub struct EsdSummaryRow {
    pub p: usize,
    pub n: usize,
    pub y: f64,
    pub density: f64,
    pub ks_distance: f64,
}

/// One histogram bin with the reference density at the bin midpoint.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramRow {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
    pub mp_density_at_mid: f64,
}

/// One verification check outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionRow {
    pub criterion: usize,
    pub name: String,
    pub pass: bool,
    pub details: String,
}

/// Typed row sets, one variant per scenario family.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportRows {
    Moments(Vec<MomentRow>),
    Esd { summaries: Vec<EsdSummaryRow>, mean_ks: f64 },
    Verify(Vec<CriterionRow>),
}

/// Everything a run produces besides artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub version: String,
    /// Wall clock in milliseconds; JSON metadata only, never in CSV.
    pub wall_ms: u64,
    pub pass: bool,
    pub rows: ReportRows,
}

/// A named CSV artifact, ready to write to the output directory.
#[derive(Debug, Clone)]
pub struct NamedCsv {
    pub name: String,
    pub text: String,
}

/// A finished run: the report plus its CSV artifacts.
#[derive(Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub artifacts: Vec<NamedCsv>,
}

impl RunOutput {
    /// The first artifact is the scenario's primary CSV.
    pub fn primary_csv(&self) -> &str {
        &self.artifacts[0].text
    }

    pub fn report_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.report)
            .map_err(|e| Error::numerical(format!("report serialization failed: {e}")))
    }
}

/// Builds a CSV document from a header and pre-formatted records.
pub fn csv_document(header: &[&str], records: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for rec in records {
        w.write_record(rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::numerical(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::numerical(format!("csv not utf-8: {e}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::numerical(format!("csv write failed: {e}"))
}

pub fn moments_csv(rows: &[MomentRow]) -> Result<String> {
    let header = ["word", "n", "trials", "estimate", "std_error", "limit", "gap", "pass"];
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.word.clone(),
                r.n.to_string(),
                r.trials.to_string(),
                sig(r.estimate),
                sig(r.std_error),
                sig(r.limit),
                sig(r.gap),
                r.pass.to_string(),
            ]
        })
        .collect();
    csv_document(&header, &records)
}

pub fn esd_summary_csv(rows: &[EsdSummaryRow]) -> Result<String> {
    let header = ["p", "n", "y", "density", "ks_distance"];
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.p.to_string(),
                r.n.to_string(),
                sig(r.y),
                sig(r.density),
                sig(r.ks_distance),
            ]
        })
        .collect();
    csv_document(&header, &records)
}

pub fn histogram_csv(rows: &[HistogramRow]) -> Result<String> {
    let header = ["bin_left", "bin_right", "count", "mp_density_at_mid"];
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                sig(r.bin_left),
                sig(r.bin_right),
                r.count.to_string(),
                sig(r.mp_density_at_mid),
            ]
        })
        .collect();
    csv_document(&header, &records)
}

pub fn eigenvalues_csv(per_trial: &[(usize, &[f64])]) -> Result<String> {
    let header = ["trial", "eigenvalue"];
    let mut records = Vec::new();
    for (trial, eigs) in per_trial {
        for &v in *eigs {
            records.push(vec![trial.to_string(), sig(v)]);
        }
    }
    csv_document(&header, &records)
}

pub fn verify_csv(rows: &[CriterionRow]) -> Result<String> {
    let header = ["criterion", "name", "pass", "details"];
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.criterion.to_string(), r.name.clone(), r.pass.to_string(), r.details.clone()])
        .collect();
    csv_document(&header, &records)
}
