//! On-disk run artifacts: the diagnostics stream, surface snapshots and the run summary.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticsRecord, SquirtProbe, SquirtVerdict};
use crate::error::{MuskatError, Result};
use crate::evolution::HaltReason;
use crate::state::{ContourPair, Grid2};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.ndjson";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SCENARIO_FILE: &str = "scenario.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

fn artifact_err(path: &Path, message: impl Into<String>) -> MuskatError {
    MuskatError::Artifact {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Append-only NDJSON writer, flushed after every record.
pub struct NdjsonSink {
    out: BufWriter<File>,
}

impl NdjsonSink {
    pub fn create(path: &Path) -> Result<Self> {
        Ok(NdjsonSink {
            out: BufWriter::new(File::create(path)?),
        })
    }

    pub fn append(path: &Path) -> Result<Self> {
        Ok(NdjsonSink {
            out: BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?),
        })
    }

    pub fn write(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        if !record.is_finite() {
            return Err(MuskatError::NumericalFailure {
                i: 0,
                j: 0,
                what: format!("non-finite diagnostics at step {}", record.step),
            });
        }
        let line =
            serde_json::to_string(record).map_err(|e| MuskatError::InvalidInput(e.to_string()))?;
        writeln!(self.out, "{line}")?;
        self.out.flush()?;
        Ok(())
    }
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (no, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DiagnosticsRecord = serde_json::from_str(&line)
            .map_err(|e| artifact_err(path, format!("line {}: {e}", no + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn snapshot_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(format!("snapshot_{step:08}.csv"))
}

/// Step number encoded in a snapshot file name.
pub fn snapshot_step(path: &Path) -> Result<u64> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.strip_prefix("snapshot_"))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| artifact_err(path, "file name is not snapshot_<step>.csv"))
}

/// Writes `x1,x2,f,g` rows in row-major node order with shortest round-trip decimals.
pub fn write_snapshot(dir: &Path, step: u64, pair: &ContourPair) -> Result<PathBuf> {
    let path = snapshot_path(dir, step);
    let mut out = BufWriter::new(File::create(&path)?);
    writeln!(out, "x1,x2,f,g")?;
    let grid = pair.grid();
    let n = grid.resolution();
    let (f, g) = (pair.f().values(), pair.g().values());
    for i in 0..n {
        for j in 0..n {
            let x = grid.coords(i, j);
            let idx = grid.index(i, j);
            writeln!(out, "{},{},{},{}", x[0], x[1], f[idx], g[idx])?;
        }
    }
    out.flush()?;
    Ok(path)
}

/// Heights `(f, g)` from a snapshot on `grid`; node coordinates are checked.
pub fn read_snapshot(path: &Path, grid: &Grid2) -> Result<(Vec<f64>, Vec<f64>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "x1,x2,f,g" => {}
        _ => return Err(artifact_err(path, "missing header x1,x2,f,g")),
    }
    let n = grid.resolution();
    let mut f = Vec::with_capacity(n * n);
    let mut g = Vec::with_capacity(n * n);
    let tol = 1e-9 * grid.side_length();
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| artifact_err(path, format!("row {}: {e}", row + 1)))?;
        if vals.len() != 4 {
            return Err(artifact_err(
                path,
                format!("row {} has {} columns", row + 1, vals.len()),
            ));
        }
        if row >= n * n {
            return Err(artifact_err(path, format!("more than {} rows", n * n)));
        }
        let x = grid.coords(row / n, row % n);
        if (vals[0] - x[0]).abs() > tol || (vals[1] - x[1]).abs() > tol {
            return Err(artifact_err(
                path,
                format!("row {} is not node ({}, {})", row + 1, row / n, row % n),
            ));
        }
        f.push(vals[2]);
        g.push(vals[3]);
    }
    if f.len() != n * n {
        return Err(artifact_err(
            path,
            format!("expected {} rows, found {}", n * n, f.len()),
        ));
    }
    Ok((f, g))
}

/// Snapshot files in a directory, ordered by step.
pub fn list_snapshots(dir: &Path) -> Result<Vec<(u64, PathBuf)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.extension().and_then(|e| e.to_str()) == Some("csv") {
            if let Ok(step) = snapshot_step(&p) {
                out.push((step, p));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub probe: SquirtProbe,
    pub verdict: SquirtVerdict,
    pub t0: Option<f64>,
    pub worst_relative_drop: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedRate {
    /// `"upper"` or `"lower"`.
    pub surface: String,
    pub k: [i64; 2],
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub halt: HaltReason,
    pub final_t: f64,
    pub steps: u64,
    pub records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Smallest gap seen fell below the trusted resolution floor.
    pub under_resolved: bool,
    pub squirt: Vec<ProbeOutcome>,
    pub fitted_rates: Vec<FittedRate>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| MuskatError::InvalidInput(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| artifact_err(path, e.to_string()))
}
