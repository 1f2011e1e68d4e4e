use std::path::PathBuf;

use thiserror::Error;

use crate::perunit::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", join(.0))]
    Validation(Vec<Violation>),

    #[error("{0}")]
    Domain(String),

    #[error("no stable operating point: p_star = {p_star} exceeds the link limit {p_max}")]
    InfeasibleOperatingPoint { p_star: f64, p_max: f64 },

    #[error("integration fault at step {step} (t = {time} s): non-finite state")]
    IntegrationFault { step: usize, time: f64 },

    #[error("{0} scenario(s) failed")]
    SweepFailures(usize),

    #[error("config {path}: {message}")]
    Config { path: String, message: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", .path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line tool: 1 validation, 2 simulation,
    /// 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Domain(_) | Error::Config { .. } => 1,
            Error::InfeasibleOperatingPoint { .. }
            | Error::IntegrationFault { .. }
            | Error::SweepFailures(_) => 2,
            Error::Io { .. } | Error::Csv { .. } => 3,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
