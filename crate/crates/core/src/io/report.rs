use crate::error::{Error, Result};
use crate::harness::{CoverageReport, CoverageRow};
use crate::interval::{extended_real, ConfidenceInterval, Method};
use crate::tail_model::HeavyTailLaw;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ci,
    Simulate,
    Sweep,
    HillDiag,
}

/// Provenance of an output artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    /// Config file or dataset the run was driven by.
    pub config_path: String,
    pub seed: u64,
    pub output_dir: String,
    pub tool_version: String,
    /// SHA-256 of the config file bytes, or of the canonical argument list.
    pub config_digest: String,
}

impl RunManifest {
    pub fn new(command: Command, config_path: &str, seed: u64, output_dir: &str, digest_of: &[u8]) -> Self {
        Self {
            command,
            config_path: config_path.to_string(),
            seed,
            output_dir: output_dir.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: config_digest(digest_of),
        }
    }
}

pub fn config_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// One (method, level) coverage result with its experiment settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRecord {
    pub label: String,
    pub law: HeavyTailLaw,
    pub true_mean: f64,
    pub n: usize,
    pub reps: usize,
    pub k: usize,
    pub n1: usize,
    #[serde(rename = "B")]
    pub resamples: usize,
    pub method: Method,
    pub level: f64,
    pub coverage: f64,
    pub hits: usize,
    pub trials: usize,
    pub failures: usize,
    pub unbounded: usize,
    #[serde(with = "extended_real")]
    pub median_lower: f64,
    #[serde(with = "extended_real")]
    pub median_upper: f64,
}

impl CoverageRecord {
    pub fn from_report(report: &CoverageReport) -> Vec<Self> {
        report
            .rows
            .iter()
            .map(|r: &CoverageRow| Self {
                label: report.label.clone(),
                law: report.law,
                true_mean: report.true_mean,
                n: report.n,
                reps: report.reps,
                k: report.k,
                n1: report.n1,
                resamples: report.resamples,
                method: r.method,
                level: r.level,
                coverage: r.coverage,
                hits: r.hits,
                trials: r.trials,
                failures: r.failures,
                unbounded: r.unbounded,
                median_lower: r.median_lower,
                median_upper: r.median_upper,
            })
            .collect()
    }
}

/// One line of a report file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum Record {
    Manifest(RunManifest),
    Coverage(CoverageRecord),
    Interval(ConfidenceInterval),
}

/// Serializes records one JSON object per line.
pub fn write_records(records: &[Record]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(
            &serde_json::to_string(r).map_err(|e| Error::Io(format!("cannot serialize record: {e}")))?,
        );
        out.push('\n');
    }
    Ok(out)
}

/// Parses a report written by [`write_records`]; blank lines are ignored.
pub fn parse_records(text: &str) -> Result<Vec<Record>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Data(format!("report line {}: {e}", i + 1)))
        })
        .collect()
}

fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.3}")
    } else if x > 0.0 {
        "+inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

/// Aligned text table: one line per experiment, coverage for each level
/// and method, then endpoint medians.
pub fn coverage_table(reports: &[CoverageReport]) -> String {
    let mut out = String::new();
    let Some(first) = reports.first() else {
        return out;
    };
    let mut cols: Vec<(Method, f64)> = Vec::new();
    for r in &first.rows {
        cols.push((r.method, r.level));
    }
    cols.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let _ = write!(out, "{:<18}{:>6}{:>6}", "law", "k", "n1");
    for (m, l) in &cols {
        let _ = write!(out, "{:>17}", format!("{m}@{l:.2}"));
    }
    out.push('\n');
    for rep in reports {
        let _ = write!(out, "{:<18}{:>6}{:>6}", rep.label, rep.k, rep.n1);
        for (m, l) in &cols {
            let cell = rep.row(*m, *l).map(|r| fmt_real(r.coverage)).unwrap_or_else(|| "-".into());
            let _ = write!(out, "{cell:>17}");
        }
        out.push('\n');
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "{:<18}{:>6}{:>12}{:>10}{:>10}{:>10}{:>10}",
        "endpoint medians", "k", "method", "level", "lower", "upper", "failed"
    );
    for rep in reports {
        for r in &rep.rows {
            let _ = writeln!(
                out,
                "{:<18}{:>6}{:>12}{:>10.2}{:>10}{:>10}{:>10}",
                rep.label,
                rep.k,
                r.method.as_str(),
                r.level,
                fmt_real(r.median_lower),
                fmt_real(r.median_upper),
                r.failures
            );
        }
    }
    out
}

/// Aligned text table of intervals.
pub fn interval_table(intervals: &[ConfidenceInterval]) -> String {
    let mut out = format!("{:<12}{:>8}{:>14}{:>14}\n", "method", "level", "lower", "upper");
    for ci in intervals {
        let _ = writeln!(
            out,
            "{:<12}{:>8.2}{:>14}{:>14}",
            ci.method.as_str(),
            ci.level,
            fmt_real4(ci.lower),
            fmt_real4(ci.upper)
        );
    }
    out
}

fn fmt_real4(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        fmt_real(x)
    }
}
