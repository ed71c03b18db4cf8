//! The tradeoff-point record shared by `theory`, `eval`, and `train`, its
//! CSV schema, and distortion-grid parsing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::CliError;

/// One sweep sample: a budget, the mechanism chosen at it, and how the
/// exact adversary fares against it.
///
/// CSV schema: `D,source,map_accuracy,mi_nats,mech_json,elapsed_ms,seed`
/// (the MI column is populated for binary runs only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    #[serde(rename = "D")]
    pub d: f64,
    pub source: Source,
    pub map_accuracy: f64,
    pub mi_nats: Option<f64>,
    pub mech_json: String,
    pub elapsed_ms: u64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Theory,
    Trained,
}

/// Write tradeoff points, replacing the file.
pub fn write_points(path: &Path, points: &[TradeoffPoint]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot write {path:?}: {e}")))?;
    for p in points {
        w.serialize(p)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("csv serialize: {e}")))?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.into()))?;
    Ok(())
}

/// Append a point, creating the file (with header) if needed.
pub fn append_point(path: &Path, point: &TradeoffPoint) -> Result<(), CliError> {
    let exists = path.exists();
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot open {path:?}: {e}")))?;
    let mut w = csv::WriterBuilder::new().has_headers(!exists).from_writer(file);
    w.serialize(point)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("csv serialize: {e}")))?;
    w.flush().map_err(|e| CliError::Runtime(e.into()))?;
    Ok(())
}

/// Read tradeoff points back (schema round-trip).
pub fn read_points(path: &Path) -> Result<Vec<TradeoffPoint>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("cannot read {path:?}: {e}")))?;
    r.deserialize()
        .map(|rec| rec.map_err(|e| CliError::Runtime(anyhow::anyhow!("csv parse: {e}"))))
        .collect()
}

/// Parse an end-inclusive budget grid `start:end:step`.
pub fn parse_d_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "D-grid must be start:end:step, got {spec:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad D-grid number {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !start.is_finite() || start < 0.0 {
        return Err(CliError::Usage(format!("D-grid start {start} must be >= 0")));
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(CliError::Usage(format!("D-grid step {step} must be > 0")));
    }
    if end < start - 1e-12 {
        return Err(CliError::Usage(format!("empty D-grid: end {end} < start {start}")));
    }
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v > end + 1e-12 {
            break;
        }
        out.push(v);
        k += 1;
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty D-grid {spec:?}")));
    }
    Ok(out)
}
