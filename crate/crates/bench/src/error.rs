use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] uwa_est_core::Error),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}, line {line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },
    #[error("run failed (seed {seed}, norm {norm}, sampling {sampling_pct}%, SNR {snr_db} dB): {source}")]
    Run {
        seed: u64,
        norm: String,
        sampling_pct: f64,
        snr_db: f64,
        #[source]
        source: uwa_est_core::Error,
    },
}

impl BenchError {
    /// True for errors caused by bad user input rather than a failed run.
    pub fn is_invalid_argument(&self) -> bool {
        use uwa_est_core::Error as E;
        match self {
            BenchError::InvalidArgument(_) => true,
            BenchError::Core(e) | BenchError::Run { source: e, .. } => {
                matches!(e, E::InvalidArgument(_) | E::InvalidInput(_))
            }
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
