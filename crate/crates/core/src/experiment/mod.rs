//! Batch runner: executes one experiment pipeline from an [`ExperimentConfig`]
//! and writes a JSON report, fixed-column CSV data files and a plain-text
//! summary into an output directory.
//!
//! CSV files carry no timing or host information, so two runs with the same
//! config are byte-identical whatever the thread count. Timing lives only in
//! `report.json` and `summary.txt`.

pub mod config;
mod pipelines;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projection::fmt_f64;

pub use config::{
    BoundParams, ConverseParams, ExperimentConfig, ExperimentKind, HaarParams, Profile, SourceSpec, SCHEMA_VERSION,
};

/// Environment variable that overrides the config's output directory.
pub const OUT_DIR_ENV: &str = "PROJLAB_OUT_DIR";

pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.txt";

/// One gated quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured value; `None` when it is not a finite number.
    pub value: Option<f64>,
    /// Human-readable gate, e.g. `"<= -0.4"`.
    pub gate: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, value: f64, gate: impl Into<String>) -> Self {
        Self { name: name.into(), passed, value: value.is_finite().then_some(value), gate: gate.into() }
    }

    /// `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value <= limit, value, format!("<= {}", short(limit)))
    }

    /// `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value >= limit, value, format!(">= {}", short(limit)))
    }
}

/// Plain notation for moderate magnitudes, scientific otherwise.
fn short(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    /// SHA-256 of the config echo; equals `config.digest()`.
    pub config_digest: String,
    pub checks: Vec<Check>,
    /// Files written, relative to the run directory.
    pub artifacts: Vec<String>,
    pub versions: Versions,
    pub wall_time_s: f64,
    pub threads: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub projlab: String,
}

impl Default for Versions {
    fn default() -> Self {
        Self { projlab: env!("CARGO_PKG_VERSION").into() }
    }
}

impl RunReport {
    /// Reads `report.json` from a run directory.
    pub fn load(run_dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(run_dir.join(REPORT_FILE))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// The text written to `summary.txt`.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "experiment  {}", c.kind.name());
        let _ = writeln!(s, "seed        {}", c.master_seed);
        let _ = writeln!(s, "profile     {:?}", c.profile);
        let _ = writeln!(s, "digest      {}", self.config_digest);
        let _ = writeln!(s, "threads     {}", self.threads);
        let _ = writeln!(s, "wall time   {:.2} s", self.wall_time_s);
        let _ = writeln!(s);
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for ch in &self.checks {
            let value = ch.value.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
            let mark = if ch.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{mark}  {:<width$}  {value:>14}  gate {}", ch.name, ch.gate);
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "artifacts: {}", self.artifacts.join(", "));
        let _ = writeln!(s, "overall: {}", if self.passed { "PASS" } else { "FAIL" });
        s
    }
}

/// A CSV file with a fixed header.
#[derive(Debug, Clone, Default)]
pub(crate) struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

/// One CSV cell.
pub(crate) enum Cell<'a> {
    F(f64),
    U(u64),
    S(&'a str),
    B(bool),
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: &[Cell<'_>]) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(
            cells
                .iter()
                .map(|c| match c {
                    Cell::F(x) => fmt_f64(*x),
                    Cell::U(x) => x.to_string(),
                    Cell::S(x) => quote(x),
                    Cell::B(x) => x.to_string(),
                })
                .collect(),
        );
    }

    fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Collects the files a pipeline writes.
pub(crate) struct Output<'a> {
    dir: &'a Path,
    artifacts: Vec<String>,
}

impl<'a> Output<'a> {
    pub fn dir(&self) -> &Path {
        self.dir
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        std::fs::write(self.dir.join(name), table.render())?;
        self.record(name);
        Ok(())
    }

    pub fn record(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }
}

/// Output directory precedence: explicit flag, then `PROJLAB_OUT_DIR`, then
/// the config's `output_dir`, then `runs/<kind>-<seed>`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-{}", cfg.kind.name(), cfg.master_seed)))
}

/// Runs the pipeline on the current rayon pool and writes everything into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let mut out = Output { dir: out_dir, artifacts: Vec::new() };
    let checks = pipelines::execute(cfg, &mut out)?;
    let passed = checks.iter().all(|c| c.passed);
    let mut artifacts = out.artifacts;
    artifacts.extend([REPORT_FILE.to_string(), SUMMARY_FILE.to_string()]);
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        config_digest: cfg.digest(),
        checks,
        artifacts,
        versions: Versions::default(),
        wall_time_s: started.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        passed,
    };
    std::fs::write(out_dir.join(REPORT_FILE), serde_json::to_string_pretty(&report)?)?;
    std::fs::write(out_dir.join(SUMMARY_FILE), report.render())?;
    Ok(report)
}

/// [`run`] on a dedicated pool of `threads` workers.
pub fn run_with_threads(cfg: &ExperimentConfig, out_dir: &Path, threads: usize) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot build a pool of {threads} threads: {e}")))?;
    pool.install(|| run(cfg, out_dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_drop_non_finite_values() {
        let c = Check::at_most("slope", f64::NAN, -0.4);
        assert!(!c.passed && c.value.is_none());
        assert!(Check::at_least("x", 1.0, 0.5).passed);
    }

    #[test]
    fn csv_cells_are_quoted_when_needed() {
        let mut t = Table::new(&["a", "b"]);
        t.push(&[Cell::S("x,y"), Cell::F(0.1)]);
        assert_eq!(t.render(), "a,b\n\"x,y\",1.0000000000000001e-1\n");
    }

    #[test]
    fn out_dir_precedence() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Converse, 9);
        // The environment is process-global; only the flag and config layers are
        // exercised here, the variable itself is covered by the CLI tests.
        assert_eq!(resolve_out_dir(Some(Path::new("a")), &cfg), PathBuf::from("a"));
        if std::env::var_os(OUT_DIR_ENV).is_none() {
            assert_eq!(resolve_out_dir(None, &cfg), PathBuf::from("runs/converse-9"));
            cfg.output_dir = Some("b".into());
            assert_eq!(resolve_out_dir(None, &cfg), PathBuf::from("b"));
        }
    }
}
