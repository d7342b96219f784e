//! Plain-text tables and line-delimited JSON records for evaluation output,
//! plus the run manifest attached to every report.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ensemble::{Method, TopK};
use crate::error::{Error, Result};
use crate::ingest::to_json_line;
use crate::metrics::{Average, EvalReport, LabelCount};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance for one invocation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub schema: Vec<String>,
    pub config: serde_json::Value,
    pub tool_version: String,
    /// RFC 3339. Taken from `SOURCE_DATE_EPOCH` when set so that reruns can
    /// be byte-identical.
    pub timestamp: String,
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok());
    let when = match secs {
        Some(s) => chrono::DateTime::from_timestamp(s, 0).unwrap_or_default(),
        None => chrono::Utc::now(),
    };
    when.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl RunManifest {
    pub fn new<P: AsRef<Path>>(
        command_line: Vec<String>,
        inputs: &[P],
        schema: &[String],
        config: serde_json::Value,
    ) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.as_ref().display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            command_line,
            inputs,
            schema: schema.to_vec(),
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
        })
    }

    /// `# `-prefixed footer lines for text output.
    pub fn footer(&self) -> String {
        let mut out = format!(
            "# polarvote {} at {}\n# schema: {}\n",
            self.tool_version,
            self.timestamp,
            self.schema.join(", ")
        );
        for input in &self.inputs {
            out.push_str(&format!("# sha256 {}  {}\n", input.sha256, input.path));
        }
        out
    }
}

/// One line of a records file.
#[derive(Debug, Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum Record<'a> {
    Manifest(&'a RunManifest),
    Model {
        model: &'a str,
        report: &'a EvalReport,
    },
    Ensemble {
        method: Method,
        top_k: TopK,
        contributing_models: &'a [String],
        report: &'a EvalReport,
    },
    Distribution {
        labels: &'a [LabelCount],
    },
}

pub fn records_to_string(records: &[Record<'_>]) -> Result<String> {
    records.iter().map(to_json_line).collect()
}

pub fn write_records(path: impl AsRef<Path>, records: &[Record<'_>]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, records_to_string(records)?).map_err(|e| Error::io(path, e))
}

pub fn fmt_score(v: f64, full_precision: bool) -> String {
    if full_precision {
        format!("{v}")
    } else {
        format!("{v:.3}")
    }
}

/// Left-aligns the first `text_cols` columns and right-aligns the rest.
pub fn render_table(header: &[&str], rows: &[Vec<String>], text_cols: usize) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (cell, w))| {
                if k < text_cols {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let total: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn score_cells(report: &EvalReport, average: Average, full: bool) -> Vec<String> {
    let s = report.averaged(average);
    vec![
        fmt_score(report.accuracy, full),
        fmt_score(s.precision, full),
        fmt_score(s.recall, full),
        fmt_score(s.f1, full),
    ]
}

/// Per-model table: Model, Acc., Pre., Rec., F1. With more than one
/// averaging scheme an `Avg.` column is added and each model gets one row
/// per scheme.
pub fn model_table(rows: &[(&str, &EvalReport)], averages: &[Average], full: bool) -> String {
    let multi = averages.len() > 1;
    let mut header = vec!["Model"];
    if multi {
        header.push("Avg.");
    }
    header.extend(["Acc.", "Pre.", "Rec.", "F1"]);
    let mut body = Vec::new();
    for (name, report) in rows {
        for &a in averages {
            let mut cells = vec![name.to_string()];
            if multi {
                cells.push(a.name().to_string());
            }
            cells.extend(score_cells(report, a, full));
            body.push(cells);
        }
    }
    render_table(&header, &body, if multi { 2 } else { 1 })
}

/// Ensemble grid: Method, Top, Acc., Prec., Rec., F1.
pub fn ensemble_table(
    rows: &[(Method, TopK, &EvalReport)],
    averages: &[Average],
    full: bool,
) -> String {
    let multi = averages.len() > 1;
    let mut header = vec!["Method", "Top"];
    if multi {
        header.push("Avg.");
    }
    header.extend(["Acc.", "Prec.", "Rec.", "F1"]);
    let mut body = Vec::new();
    for (method, k, report) in rows {
        for &a in averages {
            let top = match k {
                TopK::All => "All".to_string(),
                TopK::Count(k) => k.to_string(),
            };
            let mut cells = vec![method.title().to_string(), top];
            if multi {
                cells.push(a.name().to_string());
            }
            cells.extend(score_cells(report, a, full));
            body.push(cells);
        }
    }
    render_table(&header, &body, if multi { 3 } else { 2 })
}

pub fn distribution_table(counts: &[LabelCount], full: bool) -> String {
    let body: Vec<Vec<String>> = counts
        .iter()
        .map(|l| {
            vec![
                l.label.clone(),
                l.count.to_string(),
                fmt_score(l.fraction, full),
            ]
        })
        .collect();
    render_table(&["Label", "Count", "Fraction"], &body, 1)
}

/// Per-class breakdown and confusion matrix for a single report.
pub fn detail_table(report: &EvalReport, full: bool) -> String {
    let body: Vec<Vec<String>> = report
        .per_class
        .iter()
        .map(|c| {
            vec![
                c.label.clone(),
                fmt_score(c.precision, full),
                fmt_score(c.recall, full),
                fmt_score(c.f1, full),
                c.support.to_string(),
            ]
        })
        .collect();
    let mut out = render_table(&["Class", "Pre.", "Rec.", "F1", "Support"], &body, 1);
    out.push('\n');
    let labels: Vec<&str> = report.per_class.iter().map(|c| c.label.as_str()).collect();
    let mut header = vec!["gold \\ pred"];
    header.extend(&labels);
    let body: Vec<Vec<String>> = report
        .confusion
        .rows()
        .iter()
        .zip(&labels)
        .map(|(row, l)| {
            let mut cells = vec![l.to_string()];
            cells.extend(row.iter().map(u64::to_string));
            cells
        })
        .collect();
    out.push_str(&render_table(&header, &body, 1));
    out
}
