//! Runs one experiment, streaming rows to a CSV sink.

use std::io::Write;

use ailfem_core::adaptivity::{run_ailfem_idealized, run_ailfem_practical, RunLog, StepRecord};
use ailfem_core::goal::{run_gailfem, GoalSetup};
use ailfem_core::problem::builtin_problem;

use crate::config::{ConfigError, DriverKind, ExperimentConfig};
use crate::records::{CsvError, RecordWriter};
use crate::summary::{summarize, Summary};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write results: {0}")]
    Output(#[from] CsvError),
    #[error("cannot write results: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] ailfem_core::Error),
}

impl RunError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub struct Finished<W: Write> {
    pub log: RunLog,
    pub summary: Summary,
    pub csv: W,
}

/// Runs the configured driver; every finished level is written to `csv`
/// as it completes.
pub fn execute<W: Write>(cfg: &ExperimentConfig, csv: W) -> Result<Finished<W>, RunError> {
    let adaptive = cfg.adaptive()?;
    let problem = builtin_problem(cfg.problem_name()?)?;
    let mut writer = RecordWriter::new(csv, cfg.driver == DriverKind::Gailfem)?;
    let mut write_error = None;
    let mut sink = |r: &StepRecord| {
        if write_error.is_none() {
            if let Err(e) = writer.write(r) {
                write_error = Some(e);
            }
        }
    };
    let log = match cfg.driver {
        DriverKind::Idealized => run_ailfem_idealized(&problem, &adaptive, &mut sink)?,
        DriverKind::Practical => run_ailfem_practical(&problem, &adaptive, &mut sink)?,
        DriverKind::Gailfem => run_gailfem(&GoalSetup::builtin(), &adaptive, &mut sink)?.0,
    };
    if let Some(e) = write_error {
        return Err(e.into());
    }
    writer.flush()?;
    let summary = summarize(cfg, &log);
    Ok(Finished {
        log,
        summary,
        csv: writer.into_inner()?,
    })
}
