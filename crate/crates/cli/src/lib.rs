//! Config-driven runner for the `qchaos-core` experiments.
//!
//! A run parses one TOML document, dispatches to the library and writes CSV
//! tables plus a `manifest.json` into the output directory.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{validate, ConfigIssue, ExperimentConfig, ExperimentKind, ValidationErrors};
pub use output::{CsvTable, FileEntry, RunManifest};

/// Environment variable naming the output directory when the config has none.
pub const OUTPUT_DIR_ENV: &str = "QCHAOS_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] qchaos_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

/// Output directory: explicit override, then the config, then the
/// environment, then `output`.
pub fn output_dir(config: &ExperimentConfig, cli_override: Option<&Path>) -> PathBuf {
    if let Some(p) = cli_override {
        return p.to_path_buf();
    }
    if let Some(p) = config.output.as_ref().and_then(|o| o.directory.clone()) {
        return p;
    }
    std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("output"))
}

/// Computes every table of the experiment without touching the filesystem
/// (custom-file bases excepted).
pub fn compute(config: &ExperimentConfig) -> Result<Vec<CsvTable>, RunError> {
    experiments::run_experiment(config)
}

/// Runs the experiment and writes its tables and manifest into `dir`.
pub fn run_in(config: &ExperimentConfig, dir: &Path) -> Result<RunManifest, RunError> {
    let start = Instant::now();
    let tables = compute(config)?;
    let files = output::write_tables(dir, &tables)?;
    let canonical = config.to_toml();
    let manifest = RunManifest {
        experiment: config.experiment.name().to_string(),
        config_sha256: output::sha256_hex(&canonical),
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        seed: config.ensemble.as_ref().and_then(|e| e.seed),
        files,
    };
    manifest.write(dir)?;
    Ok(manifest)
}

pub fn run(config: &ExperimentConfig) -> Result<RunManifest, RunError> {
    run_in(config, &output_dir(config, None))
}
