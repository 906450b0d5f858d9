//! Reproducible experiment runs: TOML configuration in, UHF1 fields, CSV
//! sections and a TOML report out.

pub mod config;
pub mod experiments;
pub mod field_io;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{Experiment, ExperimentConfig};
pub use experiments::run_experiment;
pub use field_io::{read_field, write_field, FieldData, FieldIoError};
pub use report::{Check, Outcome, Report};

/// Invalid input of any kind; the binary maps every variant to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] ultrawave_core::Error),

    #[error(transparent)]
    Field(#[from] FieldIoError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    ExperimentConfig::from_toml(&text)
}

/// Where a run writes: `--out`, else the config's `output_dir`, else
/// `ultrawave-out/<experiment>`.
pub fn output_dir(cfg: &ExperimentConfig, experiment: Experiment, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| Path::new("ultrawave-out").join(experiment.name()))
}

/// Loads the config, applies command-line overrides, runs and writes all
/// artifacts. Returns the report and its directory.
pub fn invoke(
    experiment: Experiment,
    config: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(Report, PathBuf), CliError> {
    let mut cfg = load_config(config)?;
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(CliError::Invalid(format!(
                "config is for experiment {e}, command line asks for {experiment}"
            )));
        }
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let outcome = run_experiment(&cfg, experiment)?;
    let dir = output_dir(&cfg, experiment, out);
    report::write_outcome(&dir, &outcome).map_err(io_err(&dir))?;
    Ok((outcome.report, dir))
}
