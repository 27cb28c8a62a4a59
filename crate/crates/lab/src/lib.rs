//! Batch front end for `kreiss-core`: JSON experiment configs, stage
//! execution, and deterministic CSV/JSON artifacts.

pub mod artifacts;
pub mod config;
pub mod describe;
pub mod runner;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Plan, Stage};
pub use runner::{run, RunOutput};

/// Environment variable selecting the output directory; `--out` wins over it.
pub const OUT_ENV: &str = "KREISS_LAB_OUT";

/// Output directory used when neither the flag, the environment nor the
/// config names one.
pub const DEFAULT_OUT: &str = "kreiss-out";

pub mod exit {
    pub const PASS: u8 = 0;
    pub const VERIFICATION_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Failure {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("output error: {0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => exit::CONFIG,
            Failure::Numerical(_) => exit::NUMERICAL,
        }
    }
}

impl From<kreiss_core::Error> for Failure {
    fn from(e: kreiss_core::Error) -> Self {
        use kreiss_core::Error;
        match e {
            Error::Config(_) | Error::Spectrum { .. } => Failure::Config(e.to_string()),
            Error::Numerical(_) | Error::ResolventUndefined { .. } | Error::Fit(_) => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

/// Output directory by precedence: explicit override (flag or environment),
/// then the config's `output_dir` relative to the config file, then
/// [`DEFAULT_OUT`].
pub fn output_dir(override_dir: Option<PathBuf>, plan: &Plan, config_path: &Path) -> PathBuf {
    if let Some(dir) = override_dir {
        return dir;
    }
    match &plan.output_dir {
        Some(dir) if dir.is_absolute() => dir.clone(),
        Some(dir) => config_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(dir),
        None => PathBuf::from(DEFAULT_OUT),
    }
}

/// Loads, validates and runs a config inside a worker pool of the configured
/// size.
pub fn run_config(config_path: &Path, override_dir: Option<PathBuf>) -> Result<(RunOutput, PathBuf), Failure> {
    let plan = config::load(config_path)?.plan()?;
    let out = output_dir(override_dir, &plan, config_path);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = plan.workers {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Config(format!("cannot start worker pool: {e}")))?;
    let output = pool.install(|| run(&plan, &out))?;
    Ok((output, out))
}
