//! CSV time series and their JSON run manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{ExperimentConfig, RealizationFailure, TimeSeries};
use crate::error::{Result, ScrambleError};

/// Significant digits of every number written to CSV.
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

/// Version stamped into manifests.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance of one emitted CSV file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand that produced the file.
    pub command: String,
    pub config: ExperimentConfig,
    pub artifact_version: String,
    /// ISO-8601 UTC.
    pub timestamp: String,
    pub elapsed_seconds: f64,
    /// Resolved command-line flags (informational; they are already folded
    /// into `config`).
    pub flags: BTreeMap<String, String>,
    pub failures: Vec<RealizationFailure>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, elapsed_seconds: f64, failures: Vec<RealizationFailure>) -> Self {
        RunManifest {
            command: command.to_string(),
            config: config.clone(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            elapsed_seconds,
            flags: BTreeMap::new(),
            failures,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ScrambleError::Parse(e.to_string()))
    }
}

/// `x` in scientific notation with [`CSV_SIGNIFICANT_DIGITS`] significant
/// digits; negative zero is written as zero.
pub fn format_value(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", CSV_SIGNIFICANT_DIGITS - 1, x)
}

/// CSV text: header `time,<trace>_mean,<trace>_stderr,...`, one row per time.
pub fn render_csv(series: &TimeSeries) -> String {
    let mut out = String::from("time");
    for trace in &series.traces {
        out.push_str(&format!(",{0}_mean,{0}_stderr", trace.name));
    }
    out.push('\n');
    for (j, &t) in series.times.iter().enumerate() {
        out.push_str(&format_value(t));
        for trace in &series.traces {
            out.push(',');
            out.push_str(&format_value(trace.mean[j]));
            out.push(',');
            out.push_str(&format_value(trace.stderr[j]));
        }
        out.push('\n');
    }
    out
}

/// Sibling manifest path: `run.csv` → `run.manifest.json`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest.json")
}

fn io_error(path: &Path, e: std::io::Error) -> ScrambleError {
    ScrambleError::Io(format!("{}: {e}", path.display()))
}

/// Writes the CSV to `path` and the manifest next to it, creating parent
/// directories as needed. The CSV depends only on `series`, so identical
/// inputs give byte-identical files.
pub fn emit_csv(series: &TimeSeries, manifest: &RunManifest, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, render_csv(series)).map_err(|e| io_error(path, e))?;
    let mpath = manifest_path(path);
    fs::write(&mpath, manifest.to_json() + "\n").map_err(|e| io_error(&mpath, e))
}

/// Header and numeric rows of a CSV written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| ScrambleError::Parse(format!("{}: empty file", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .enumerate()
        .map(|(k, line)| {
            line.split(',')
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|e| ScrambleError::Parse(format!("{} line {}: {e}", path.display(), k + 2)))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::Trace;

    fn series() -> TimeSeries {
        TimeSeries {
            times: vec![0.0, 0.5, 1.0],
            traces: vec![
                Trace {
                    name: "otoc_avg".into(),
                    mean: vec![1.0, 0.8123456789012345, -0.0],
                    stderr: vec![0.0, 1.5e-3, 2.0e-3],
                    min: vec![1.0, 0.7, -0.1],
                    n: 4,
                },
                Trace {
                    name: "mutual_info".into(),
                    mean: vec![0.0, 1.0 / 3.0, 1.2e-17],
                    stderr: vec![0.0, 0.0, 0.0],
                    min: vec![0.0, 0.0, 0.0],
                    n: 4,
                },
            ],
            failures: Vec::new(),
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(format_value(-0.0), "0.00000000000e0");
        assert_eq!(format_value(12345.0), "1.23450000000e4");
    }

    #[test]
    fn header_and_column_count() {
        let text = render_csv(&series());
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time,otoc_avg_mean,otoc_avg_stderr,mutual_info_mean,mutual_info_stderr"
        );
        for line in lines {
            assert_eq!(line.split(',').count(), 1 + 2 * 2);
        }
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/run.csv");
        let s = series();
        let cfg = crate::ensemble::ExperimentConfig::new(
            crate::ensemble::ModelConfig::Lmg {
                n_spins: 4,
                j_scale: 1.0,
            },
            1,
            vec![crate::ensemble::Diagnostic::OtocAvg],
        )
        .unwrap();
        let manifest = RunManifest::new("syk-otoc", &cfg, 0.25, Vec::new());
        emit_csv(&s, &manifest, &path).unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header.len(), 5);
        for (j, row) in rows.iter().enumerate() {
            let expected = [s.times[j], s.traces[0].mean[j], s.traces[0].stderr[j], s.traces[1].mean[j], s.traces[1].stderr[j]];
            for (got, want) in row.iter().zip(expected) {
                assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-300));
            }
        }
        let back = RunManifest::from_json(&fs::read_to_string(manifest_path(&path)).unwrap()).unwrap();
        assert_eq!(back, manifest);
    }
}
