//! Machine-readable benchmark reports: a JSON document that round-trips
//! losslessly, or a flat CSV for spreadsheets.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bench::{Accumulated, BenchError, BitSizeAverages, RunStats, SingleRun};
use crate::ga::GaConfig;

/// Report output format.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(format!("unknown report format {s:?} (expected json or csv)")),
        }
    }
}

/// Provenance carried by every report: tool version, master seed, and the
/// full genetic config in effect.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub seed: u64,
    pub config: GaConfig,
}

/// One benchmark result of any shape.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportRow {
    Accumulated(Accumulated),
    RunStats(RunStats),
    BitAverages(BitSizeAverages),
    SingleRun(SingleRun),
}

/// A full report: metadata plus one row per result.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(seed: u64, config: &GaConfig, rows: Vec<ReportRow>) -> Self {
        let meta = ReportMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: config.clone(),
        };
        Report { meta, rows }
    }
}

/// Renders a non-empty report to text in the requested format.
pub fn render_report(report: &Report, format: ReportFormat) -> Result<String, BenchError> {
    if report.rows.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)
                .map_err(|e| BenchError::Io(std::io::Error::other(e)))?;
            text.push('\n');
            Ok(text)
        }
        ReportFormat::Csv => Ok(render_csv(report)),
    }
}

/// Renders and writes a report; refuses to create a file for empty results.
pub fn write_report(report: &Report, format: ReportFormat, path: &Path) -> Result<(), BenchError> {
    let text = render_report(report, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

/// One wide header covers all row shapes; unused cells stay empty. Averages
/// are printed to 2 decimals, chains as space-separated values.
const CSV_HEADER: &str =
    "kind,method,range_max,bits,exponent,runs,samples,seed,total,best,worst,average,median,best_length,chain";

fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        match row {
            ReportRow::Accumulated(a) => {
                let seed = a.seed.map(|s| s.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "accumulated,{},{},,,,,{seed},{},,,,,,",
                    a.method, a.range_max, a.total
                );
            }
            ReportRow::RunStats(s) => {
                let _ = writeln!(
                    out,
                    "run_stats,{},{},,,{},,{},,{},{},{:.2},{:.2},,",
                    s.method, s.range_max, s.runs, s.master_seed, s.best, s.worst, s.average,
                    s.median
                );
            }
            ReportRow::BitAverages(b) => {
                for avg in &b.averages {
                    let _ = writeln!(
                        out,
                        "bit_average,{},,{},,,{},{},,,,{:.2},,,",
                        avg.method, b.bits, b.samples, b.master_seed, avg.average
                    );
                }
            }
            ReportRow::SingleRun(sp) => {
                let chain = sp
                    .best_chain
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ");
                let _ = writeln!(
                    out,
                    "single_run,ga,,,{},,,,,,,,,{},{chain}",
                    sp.exponent, sp.best_length
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{accumulated, random_exponent_avg, run_stats, Method};
    use crate::chain::Exponent;

    fn sample_report() -> Report {
        let cfg = GaConfig::default();
        let e = |n| Exponent::new(n).unwrap();
        let rows = vec![
            ReportRow::Accumulated(accumulated(Method::Binary, e(64), &cfg).unwrap()),
            ReportRow::RunStats(run_stats(Method::Mary(4), e(32), 4, 7, &cfg).unwrap()),
            ReportRow::BitAverages(
                random_exponent_avg(8, 5, &[Method::Binary, Method::Mary(4)], 7, &cfg).unwrap(),
            ),
            ReportRow::SingleRun(SingleRun {
                exponent: 3_922_763,
                best_length: 29,
                best_chain: vec![1, 2, 3],
                seeds: vec![1, 2],
            }),
        ];
        Report::new(7, &cfg, rows)
    }

    #[test]
    fn json_reports_round_trip_exactly() {
        let report = sample_report();
        let text = render_report(&report, ReportFormat::Json).unwrap();
        let parsed: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn empty_reports_are_rejected_and_leave_no_file() {
        let report = Report::new(0, &GaConfig::default(), Vec::new());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let result = write_report(&report, ReportFormat::Json, &path);
        assert!(matches!(result, Err(BenchError::EmptyReport)));
        assert!(!path.exists());
    }

    #[test]
    fn csv_has_one_header_and_one_line_per_result() {
        let report = sample_report();
        let text = render_report(&report, ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        // 1 accumulated + 1 stats + 2 bit averages + 1 single run = 5 rows.
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("accumulated,binary,64,"));
        assert!(lines.iter().any(|l| l.starts_with("run_stats,mary(4),32,")));
        assert!(text.ends_with("1 2 3\n"));
    }

    #[test]
    fn report_files_land_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_report(&sample_report(), ReportFormat::Csv, &path).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert!(body.starts_with("kind,"));
    }

    #[test]
    fn format_names_parse() {
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
