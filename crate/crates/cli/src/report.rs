//! CSV and JSON artifacts.
//!
//! Every CSV file has a header row and LF line endings. Numbers use the
//! shortest decimal form that parses back to the same `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempus_core::{CampaignReport, Certification, GridFunction, StabilityCertificate, TrialRow};

use crate::error::CliError;

pub const CERTIFICATE_COLUMNS: [&str; 7] = [
    "seed",
    "epsilon",
    "analytic_constant",
    "empirical_constant",
    "sup_deviation",
    "solution_residual",
    "verdict",
];

pub const SUMMARY_COLUMNS: [&str; 5] = [
    "trials",
    "pass_count",
    "max_empirical_constant",
    "max_analytic_constant",
    "worst_trial_seed",
];

pub const CONSTANTS_COLUMNS: [&str; 7] = [
    "parameter",
    "value",
    "points",
    "lemma_constant",
    "inner_constant",
    "outer_constant",
    "product",
];

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

fn row_fields(row: &TrialRow) -> Vec<String> {
    vec![
        row.seed.to_string(),
        num(row.epsilon),
        opt(row.analytic_constant),
        num(row.empirical_constant),
        num(row.sup_deviation),
        num(row.solution_residual),
        row.verdict.to_string(),
    ]
}

/// A certificate flattened to the trial-row schema; `seed` is empty for
/// inline candidates.
pub fn certificate_fields(seed: Option<u64>, c: &StabilityCertificate) -> Vec<String> {
    vec![
        seed.map(|s| s.to_string()).unwrap_or_default(),
        num(c.epsilon),
        opt(c.analytic_constant),
        num(c.empirical_constant),
        num(c.sup_deviation),
        num(c.solution_residual.value),
        c.verdict.to_string(),
    ]
}

pub fn summary_line(c: &StabilityCertificate) -> String {
    format!(
        "epsilon={} constant={} empirical_constant={} sup_deviation={} verdict={}",
        num(c.epsilon),
        c.analytic_constant.map(num).unwrap_or_else(|| "none".into()),
        num(c.empirical_constant),
        num(c.sup_deviation),
        c.verdict
    )
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Serialize)]
struct CertificateDocument<'a> {
    seed: Option<u64>,
    certificate: &'a StabilityCertificate,
    points: &'a [f64],
    approximate: &'a [f64],
    exact: &'a [f64],
}

pub fn write_certificate_csv(
    dir: &Path,
    seed: Option<u64>,
    y: &GridFunction,
    cert: &Certification,
) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("certificate.csv");
    let mut w = writer(&path)?;
    w.write_record(CERTIFICATE_COLUMNS)?;
    w.write_record(certificate_fields(seed, &cert.certificate))?;
    w.flush()?;

    let sol = dir.join("solution.csv");
    let mut w = writer(&sol)?;
    w.write_record(["t", "approximate", "exact", "deviation"])?;
    let points = y.timescale().points();
    for (i, &t) in points.iter().enumerate() {
        let (a, b) = (y[i], cert.solution[i]);
        w.write_record([num(t), num(a), num(b), num((a - b).abs())])?;
    }
    w.flush()?;
    Ok(vec![path, sol])
}

pub fn write_certificate_json(
    dir: &Path,
    seed: Option<u64>,
    y: &GridFunction,
    cert: &Certification,
) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("certificate.json");
    write_json(
        &path,
        &CertificateDocument {
            seed,
            certificate: &cert.certificate,
            points: y.timescale().points(),
            approximate: y.values(),
            exact: cert.solution.values(),
        },
    )?;
    Ok(vec![path])
}

pub fn write_campaign_csv(dir: &Path, report: &CampaignReport) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("campaign.csv");
    let mut w = writer(&path)?;
    w.write_record(CERTIFICATE_COLUMNS)?;
    for row in &report.rows {
        w.write_record(row_fields(row))?;
    }
    w.flush()?;

    let summary = dir.join("campaign_summary.csv");
    let mut w = writer(&summary)?;
    w.write_record(SUMMARY_COLUMNS)?;
    w.write_record([
        report.trials.to_string(),
        report.pass_count.to_string(),
        num(report.max_empirical_constant),
        opt(report.max_analytic_constant),
        report.worst_trial_seed.to_string(),
    ])?;
    w.flush()?;
    Ok(vec![path, summary])
}

pub fn write_campaign_json(dir: &Path, report: &CampaignReport) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("campaign.json");
    write_json(&path, report)?;
    Ok(vec![path])
}

/// One line of a constants sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsRow {
    pub parameter: String,
    pub value: f64,
    pub points: usize,
    pub lemma_constant: Option<f64>,
    pub inner_constant: Option<f64>,
    pub outer_constant: Option<f64>,
    pub product: Option<f64>,
}

pub fn write_constants_csv(dir: &Path, rows: &[ConstantsRow]) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("constants.csv");
    let mut w = writer(&path)?;
    w.write_record(CONSTANTS_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.parameter.clone(),
            num(r.value),
            r.points.to_string(),
            opt(r.lemma_constant),
            opt(r.inner_constant),
            opt(r.outer_constant),
            opt(r.product),
        ])?;
    }
    w.flush()?;
    Ok(vec![path])
}

pub fn write_constants_json(dir: &Path, rows: &[ConstantsRow]) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join("constants.json");
    write_json(&path, &rows)?;
    Ok(vec![path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_in_shortest_form() {
        for v in [0.0, 1.0, 0.1, 1e-20, 123456.789, -2.5e300, 1.0 / 3.0] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.01), "0.01");
        assert_eq!(num(1e-20), "1e-20");
    }
}
