use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Timing statistics for one benchmark, in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub name: String,
    pub n_qubits: usize,
    pub runs: usize,
    pub mean_s: f64,
    pub max_s: f64,
    pub min_s: f64,
    pub stddev_s: f64,
    pub gate_count: usize,
    pub measure_count: usize,
    pub reset_count: usize,
}

const FIELDS: [&str; 10] = [
    "name",
    "n_qubits",
    "runs",
    "mean_s",
    "max_s",
    "min_s",
    "stddev_s",
    "gate_count",
    "measure_count",
    "reset_count",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format '{s}': expected text, json or csv")),
        }
    }
}

pub fn format_report(reports: &[BenchmarkReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => text(reports),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(FIELDS).expect("in-memory write");
            for r in reports {
                w.serialize(r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
        }
    }
}

fn text(reports: &[BenchmarkReport]) -> String {
    let header = [
        "description",
        "mean",
        "max",
        "min",
        "stddev",
        "qubits",
        "runs",
        "gates",
        "measurements",
        "resets",
    ];
    let rows: Vec<[String; 10]> = reports
        .iter()
        .map(|r| {
            [
                r.name.clone(),
                format!("{:.3}", r.mean_s),
                format!("{:.3}", r.max_s),
                format!("{:.3}", r.min_s),
                format!("{:.3}", r.stddev_s),
                r.n_qubits.to_string(),
                r.runs.to_string(),
                r.gate_count.to_string(),
                r.measure_count.to_string(),
                r.reset_count.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let mut l = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i == 0 {
                write!(l, "{cell:<w$}").unwrap();
            } else {
                write!(l, "  {cell:>w$}").unwrap();
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(&header);
    for row in &rows {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}
