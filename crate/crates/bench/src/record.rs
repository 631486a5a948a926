use std::fmt;
use std::str::FromStr;

use uwa_est_core::GroupLayout;

use crate::error::BenchError;

/// Which recovery problem a run solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormChoice {
    /// Least squares inside an l1 ball.
    L1,
    /// l21 minimization inside a fidelity ball.
    L21,
}

impl NormChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            NormChoice::L1 => "l1",
            NormChoice::L21 => "l21",
        }
    }
}

impl fmt::Display for NormChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l1" => Ok(NormChoice::L1),
            "l21" => Ok(NormChoice::L21),
            other => Err(BenchError::InvalidArgument(format!("unknown norm '{other}'"))),
        }
    }
}

/// One benchmark row. `mse` is NaN for a failed run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub seed: u64,
    pub norm: NormChoice,
    pub doppler_bins: usize,
    pub delay_taps: usize,
    pub sampling_pct: f64,
    pub snr_db: f64,
    pub sigma_used: f64,
    pub group_layout: GroupLayout,
    pub mse: f64,
    pub iterations: usize,
    pub runtime_seconds: f64,
    pub converged: bool,
}

impl ExperimentRecord {
    pub fn failed(&self) -> bool {
        self.mse.is_nan()
    }

    /// Equality on every field except the runtime.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let same_f = |a: f64, b: f64| a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan());
        self.seed == other.seed
            && self.norm == other.norm
            && self.doppler_bins == other.doppler_bins
            && self.delay_taps == other.delay_taps
            && same_f(self.sampling_pct, other.sampling_pct)
            && same_f(self.snr_db, other.snr_db)
            && same_f(self.sigma_used, other.sigma_used)
            && self.group_layout == other.group_layout
            && same_f(self.mse, other.mse)
            && self.iterations == other.iterations
            && self.converged == other.converged
    }
}
