use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dirlaw_core::{DeviationReport, DeviationRow, Result, VERSION};
use serde::Serialize;

use crate::args::{Flags, Format};

/// Formats a float with 12 significant digits, dropping trailing zeros.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..12).contains(&exp) {
        trim_zeros(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct ConvergenceRow {
    scale: u64,
    sup_dev: f64,
    scaled_sup_dev: f64,
}

/// What a command produced, before rendering.
#[derive(Debug, Clone)]
pub enum Body {
    /// A single value: a rational `p/q` or a float.
    Value(Cell),
    Table { columns: Vec<String>, rows: Vec<Vec<Cell>> },
    Deviation { report: DeviationReport, bins: Option<usize> },
    Convergence { reports: Vec<DeviationReport>, bins: Option<usize> },
}

#[derive(Serialize)]
struct ReportJson<'a, R: Serialize> {
    kind: &'a str,
    k: usize,
    scale: u64,
    model: &'a str,
    grid_step: f64,
    bins: Option<usize>,
    seed: u64,
    sup_dev: f64,
    scaled_sup_dev: f64,
    rows: R,
    timestamp_utc: String,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct ValueJson<'a> {
    kind: &'a str,
    verb: &'a str,
    value: &'a Cell,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct TableJson<'a> {
    kind: &'a str,
    verb: &'a str,
    columns: &'a [String],
    rows: &'a [Vec<Cell>],
    tool_version: &'static str,
}

/// UTC time, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp_utc() -> String {
    let when = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    when.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

fn deviation_csv(rows: &[DeviationRow], k: usize) -> String {
    let mut out: Vec<String> = (1..k).map(|i| format!("u_{i}")).collect();
    out.extend(["empirical", "limit", "deviation"].map(String::from));
    let mut text = out.join(",") + "\n";
    for r in rows {
        let mut cells: Vec<String> = r.u.iter().map(|&u| fmt_float(u)).collect();
        cells.extend([r.empirical, r.limit, r.deviation].map(fmt_float));
        text += &(cells.join(",") + "\n");
    }
    text
}

fn convergence_rows(reports: &[DeviationReport]) -> Vec<ConvergenceRow> {
    reports
        .iter()
        .map(|r| ConvergenceRow {
            scale: r.scale,
            sup_dev: r.sup_dev,
            scaled_sup_dev: r.scaled_sup_dev,
        })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

impl Body {
    pub fn render(&self, kind: &str, verb: &str, flags: &Flags) -> String {
        let json = flags.format == Format::Json;
        match self {
            Body::Value(v) if json => to_json(&ValueJson { kind, verb, value: v, tool_version: VERSION }),
            Body::Value(v) => v.csv() + "\n",
            Body::Table { columns, rows } if json => to_json(&TableJson {
                kind,
                verb,
                columns,
                rows,
                tool_version: VERSION,
            }),
            Body::Table { columns, rows } => {
                let mut text = columns.join(",") + "\n";
                for row in rows {
                    text += &(row.iter().map(Cell::csv).collect::<Vec<_>>().join(",") + "\n");
                }
                text
            }
            Body::Deviation { report, bins } if json => to_json(&ReportJson {
                kind: &report.kind,
                k: report.k,
                scale: report.scale,
                model: &report.model,
                grid_step: report.grid_step,
                bins: *bins,
                seed: flags.seed,
                sup_dev: report.sup_dev,
                scaled_sup_dev: report.scaled_sup_dev,
                rows: &report.rows,
                timestamp_utc: timestamp_utc(),
                tool_version: VERSION,
            }),
            Body::Deviation { report, .. } => deviation_csv(&report.rows, report.k),
            Body::Convergence { reports, bins } if json => {
                let last = reports.last().expect("at least one report");
                to_json(&ReportJson {
                    kind: &last.kind,
                    k: last.k,
                    scale: last.scale,
                    model: &last.model,
                    grid_step: last.grid_step,
                    bins: *bins,
                    seed: flags.seed,
                    sup_dev: last.sup_dev,
                    scaled_sup_dev: last.scaled_sup_dev,
                    rows: convergence_rows(reports),
                    timestamp_utc: timestamp_utc(),
                    tool_version: VERSION,
                })
            }
            Body::Convergence { reports, .. } => {
                let mut text = String::from("scale,sup_dev,scaled_sup_dev\n");
                for r in convergence_rows(reports) {
                    text += &format!("{},{},{}\n", r.scale, fmt_float(r.sup_dev), fmt_float(r.scaled_sup_dev));
                }
                text
            }
        }
    }

    /// One line for the terminal when the body goes to a file.
    pub fn summary(&self, kind: &str, verb: &str) -> String {
        match self {
            Body::Value(v) => format!("{kind} {verb}: {}", v.csv()),
            Body::Table { rows, .. } => format!("{kind} {verb}: {} rows", rows.len()),
            Body::Deviation { report, .. } => format!(
                "{kind} {verb}: scale={} k={} sup_dev={} scaled_sup_dev={}",
                report.scale,
                report.k,
                fmt_float(report.sup_dev),
                fmt_float(report.scaled_sup_dev)
            ),
            Body::Convergence { reports, .. } => reports
                .iter()
                .map(|r| format!("scale={} sup_dev={}", r.scale, fmt_float(r.sup_dev)))
                .fold(format!("{kind} {verb}:"), |acc, s| acc + " " + &s),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    kind: &'a str,
    verb: &'a str,
    argv: &'a [String],
    params: &'a Flags,
    seed: u64,
    threads: usize,
    tool_version: &'static str,
    timestamp_utc: String,
    outputs: Vec<String>,
}

/// `<dir>/<stem>.manifest.json` for an output at `<dir>/<stem>.<ext>`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.manifest.json"))
}

/// Writes `text` to `out` and its run manifest beside it.
pub fn write_output(out: &Path, text: &str, kind: &str, verb: &str, argv: &[String], flags: &Flags) -> Result<PathBuf> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::File::create(out)?.write_all(text.as_bytes())?;
    let manifest = Manifest {
        kind,
        verb,
        argv,
        params: flags,
        seed: flags.seed,
        threads: rayon::current_num_threads(),
        tool_version: VERSION,
        timestamp_utc: timestamp_utc(),
        outputs: vec![out.display().to_string()],
    };
    let path = manifest_path(out);
    fs::write(&path, to_json(&manifest))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_float(-0.125), "-0.125");
        assert_eq!(fmt_float(1234567.891234567), "1234567.89123");
        assert_eq!(fmt_float(1e-7 / 3.0), "3.33333333333e-8");
        assert_eq!(fmt_float(9.9999999999999), "10");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(1e15), "1e15");
    }

    #[test]
    fn manifest_sits_beside_output() {
        assert_eq!(manifest_path(Path::new("a/b/run.csv")), Path::new("a/b/run.manifest.json"));
        assert_eq!(manifest_path(Path::new("run")), Path::new("run.manifest.json"));
    }
}
