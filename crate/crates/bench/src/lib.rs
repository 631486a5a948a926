//! Benchmark harness for l1- vs l21-constrained delay-Doppler channel
//! estimation: seeded single runs, parameter sweeps, CSV output and
//! per-cell summaries.

pub mod csvio;
pub mod error;
pub mod experiment;
pub mod record;
pub mod summary;

pub use csvio::{read_csv, write_csv};
pub use error::{BenchError, Result};
pub use experiment::{run_single, run_sweep, ChannelModel, ExperimentConfig, SigmaL1, SweepAxes};
pub use record::{ExperimentRecord, NormChoice};
pub use summary::{summarize, SummaryRow};
