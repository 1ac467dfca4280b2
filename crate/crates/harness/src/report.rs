//! Report emission: canonical JSON, the flat CSV schema, and orbit dumps.
//!
//! The JSON report is byte-deterministic for a fixed config and seed, so the
//! wall-clock measurement is excluded from it; timings appear in the CSV
//! rows and on the console instead.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use asymreg::iterate::{ishikawa_step, ScalarSchedule};
use asymreg::mappings::NonexpansiveMap;
use asymreg::spaces::{Point, Space};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrbitSummary {
    pub steps: usize,
    pub final_diag: f64,
    pub min_diag: f64,
    /// Fejer-monotonicity violations over the monitored window, when a fixed
    /// point is known.
    pub fejer_violations: Option<u64>,
    /// Violations of the per-step inequality chain over the monitored window.
    pub chain_violations: u64,
    pub chain_window: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateOutcome {
    pub formula: String,
    pub epsilon: f64,
    pub bound: u64,
    pub guarantee: String,
    pub branch: String,
    /// Which diagnostic the guarantee is about: `tx` for d(x_n, Tx_n), `ty`
    /// for d(x_n, Ty_n).
    pub diagnostic: String,
    pub first_hit: Option<u64>,
    pub tail_ok: Option<bool>,
    /// `first_hit / bound`; recorded, never asserted.
    pub margin: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub space: String,
    pub map: String,
    pub modulus: String,
    pub schedule: String,
    pub b: f64,
    pub b_source: String,
    pub d_c: Option<f64>,
    pub seed: u64,
    pub horizon: usize,
    pub orbit: OrbitSummary,
    pub certificates: Vec<CertificateOutcome>,
    pub pass: bool,
    #[serde(skip)]
    pub wallclock_ms: u128,
}

/// Flat row of the CSV schema.
#[derive(Debug, Serialize)]
pub struct CsvRow<'a> {
    pub experiment_id: &'a str,
    pub formula: &'a str,
    pub epsilon: f64,
    pub bound: u64,
    pub guarantee_kind: &'a str,
    pub first_hit: Option<u64>,
    pub tail_ok: Option<bool>,
    pub lemma41_violations: u64,
    pub wallclock_ms: u128,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn csv_rows(&self) -> Vec<CsvRow<'_>> {
        self.certificates
            .iter()
            .map(|c| CsvRow {
                experiment_id: &self.experiment_id,
                formula: &c.formula,
                epsilon: c.epsilon,
                bound: c.bound,
                guarantee_kind: &c.guarantee,
                first_hit: c.first_hit,
                tail_ok: c.tail_ok,
                lemma41_violations: self.orbit.chain_violations
                    + self.orbit.fejer_violations.unwrap_or(0),
                wallclock_ms: self.wallclock_ms,
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.csv_rows() {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().context("csv writer")?;
        Ok(String::from_utf8(bytes).context("csv encoding")?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            other => anyhow::bail!("unknown format `{other}` (json, csv, both)"),
        }
    }
}

/// Write the report files into `dir`, returning the created paths.
pub fn emit_report(report: &ExperimentReport, format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut written = Vec::new();
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join(format!("{}.json", report.experiment_id));
        std::fs::write(&path, report.to_json())
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    if matches!(format, Format::Csv | Format::Both) {
        let path = dir.join(format!("{}.csv", report.experiment_id));
        std::fs::write(&path, report.to_csv()?)
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct OrbitDumpRow {
    n: usize,
    d_x_tx: f64,
    d_x_ty: f64,
    d_x_p: Option<f64>,
}

/// Stream an orbit to CSV (`n, d_x_tx, d_x_ty, d_x_p`) with a JSON sidecar
/// describing the generating data.
pub fn write_orbit_dump(
    space: &Space,
    map: &NonexpansiveMap,
    sched: &ScalarSchedule,
    x0: &Point,
    steps: usize,
    anchor: Option<&Point>,
    meta: serde_json::Value,
    path: &Path,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    let mut x = x0.clone();
    for n in 0..steps {
        let st = ishikawa_step(space, map, sched, n, &x)?;
        w.serialize(OrbitDumpRow {
            n,
            d_x_tx: space.dist_unchecked(&x, &st.tx),
            d_x_ty: space.dist_unchecked(&x, &st.ty),
            d_x_p: anchor.map(|p| space.dist_unchecked(&x, p)),
        })?;
        x = st.next;
    }
    w.flush()?;
    let sidecar = path.with_extension("meta.json");
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("cannot write {}", sidecar.display()))?;
    Ok(())
}
