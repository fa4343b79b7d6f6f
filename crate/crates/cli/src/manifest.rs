//! Run manifests, their hashes and report output.

use std::fmt;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use semilinear_core::heat_solver::GridSpec;

/// A malformed or unusable input file; exits with code 2.
#[derive(Debug)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Success,
    Inconclusive,
    Diverged,
}

impl Status {
    pub fn code(&self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Diverged => 3,
            Status::Inconclusive => 4,
        }
    }
}

/// Everything that determines the reports. Paths are left out so that the
/// same experiment hashes the same wherever it runs.
#[derive(Clone, Debug, Serialize)]
pub struct Experiment {
    pub command: String,
    pub spec: serde_json::Value,
    pub tol: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub grid: Option<GridSpec>,
    /// `(field, value)` when this run is one point of a sweep.
    pub sweep_point: Option<(String, f64)>,
    /// No randomized algorithm is used anywhere.
    pub deterministic: bool,
    pub version: String,
}

impl Experiment {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("manifest serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    manifest_hash: String,
    experiment: &'a Experiment,
    spec_path: Option<&'a str>,
    output_dir: String,
}

/// Files produced by one command, written by the caller.
pub struct Outcome {
    pub status: Status,
    pub files: Vec<(String, Vec<u8>)>,
}

/// `{"manifest_hash", "command", "status", "report"}` as pretty JSON.
pub fn json_report<T: Serialize>(exp: &Experiment, status: Status, report: &T) -> anyhow::Result<Vec<u8>> {
    #[derive(Serialize)]
    struct Wrapped<'a, T> {
        manifest_hash: String,
        command: &'a str,
        status: Status,
        report: &'a T,
    }
    let w = Wrapped { manifest_hash: exp.hash(), command: &exp.command, status, report };
    let mut out = serde_json::to_vec_pretty(&w)?;
    out.push(b'\n');
    Ok(out)
}

/// CSV from a header and rows of already formatted fields.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?)
}

/// Shortest round-trip formatting; `inf`, `-inf` and `NaN` pass through.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_run(out: &Path, exp: &Experiment, spec_path: Option<&str>, outcome: &Outcome) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).map_err(|e| SpecError(format!("output directory {} is not writable: {e}", out.display())))?;
    let m = RunManifest { manifest_hash: exp.hash(), experiment: exp, spec_path, output_dir: out.display().to_string() };
    let mut bytes = serde_json::to_vec_pretty(&m)?;
    bytes.push(b'\n');
    std::fs::write(out.join("manifest.json"), bytes).with_context(|| format!("writing {}", out.display()))?;
    for (name, data) in &outcome.files {
        std::fs::write(out.join(name), data).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}
