//! Single runs and seeded sweeps of the simulate / measure / solve pipeline.

use rayon::prelude::*;

use uwa_est_core::channel::{add_awgn, generate_channel, generate_scattered, ClusterSpec, NoiseSpec};
use uwa_est_core::norms::norm_l1;
use uwa_est_core::operators::{forward_model, make_mask};
use uwa_est_core::rng::derive_seed;
use uwa_est_core::{
    relative_mse, sigma_from_noise, solve_l1_constrained, solve_l21_fidelity, ChannelGrid,
    DelayDopplerGrid, Measurement, SolverConfig,
};

use crate::error::{BenchError, Result};
use crate::record::{ExperimentRecord, NormChoice};

const CHANNEL_STREAM: u64 = 1;
const MASK_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    Clusters(ClusterSpec),
    /// Isolated taps at uniformly random positions.
    Scatter { taps: usize },
}

impl Default for ChannelModel {
    fn default() -> Self {
        ChannelModel::Clusters(ClusterSpec::default())
    }
}

/// Radius of the l1 ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaL1 {
    /// `||H_true||_1`.
    Oracle,
    Fixed(f64),
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: DelayDopplerGrid,
    pub channel: ChannelModel,
    pub sampling_pct: f64,
    pub snr_db: f64,
    pub norm: NormChoice,
    pub sigma_l1: SigmaL1,
    /// Multiplier on the fidelity radius `m * noise_std^2`.
    pub eta: f64,
    /// Measure the l21 path through the sampling mask too (default: full).
    pub l21_masked: bool,
    /// `sigma` is overwritten per run.
    pub solver: SolverConfig,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: DelayDopplerGrid::benchmark_default(),
            channel: ChannelModel::default(),
            sampling_pct: 50.0,
            snr_db: 10.0,
            norm: NormChoice::L21,
            sigma_l1: SigmaL1::Oracle,
            eta: 1.0,
            l21_masked: false,
            solver: SolverConfig::new(1.0),
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    /// Whether this run observes the spectrum through the sampling mask.
    pub fn uses_mask(&self) -> bool {
        match self.norm {
            NormChoice::L1 => true,
            NormChoice::L21 => self.l21_masked,
        }
    }
}

/// Ground-truth channel for a seed.
pub fn channel_for(config: &ExperimentConfig) -> uwa_est_core::Result<ChannelGrid> {
    let seed = derive_seed(config.seed, CHANNEL_STREAM);
    match config.channel {
        ChannelModel::Clusters(spec) => generate_channel(&config.grid, &spec.with_seed(seed)),
        ChannelModel::Scatter { taps } => generate_scattered(&config.grid, taps, seed),
    }
}

/// Simulated measurement and the realized noise std.
pub fn measurement_for(config: &ExperimentConfig, h: &ChannelGrid) -> uwa_est_core::Result<(Measurement, f64)> {
    let mask = if config.uses_mask() {
        Some(make_mask(&config.grid, config.sampling_pct, derive_seed(config.seed, MASK_STREAM))?)
    } else {
        None
    };
    let clean = forward_model(h, mask.as_ref())?;
    let noise = NoiseSpec {
        snr_db: config.snr_db,
        rng_seed: derive_seed(config.seed, NOISE_STREAM),
    };
    let (noisy, noise_std) = add_awgn(&clean, &noise, mask.as_ref())?;
    let meas = Measurement::new(config.grid, noisy, mask, Some(config.snr_db))?;
    Ok((meas, noise_std))
}

fn run_inner(config: &ExperimentConfig) -> uwa_est_core::Result<ExperimentRecord> {
    let h = channel_for(config)?;
    let (meas, noise_std) = measurement_for(config, &h)?;
    let mut solver = config.solver;
    let report = match config.norm {
        NormChoice::L1 => {
            solver.sigma = match config.sigma_l1 {
                SigmaL1::Oracle => norm_l1(h.values()),
                SigmaL1::Fixed(v) => v,
            };
            solve_l1_constrained(&meas, &solver)?
        }
        NormChoice::L21 => {
            solver.sigma = sigma_from_noise(noise_std, meas.observed(), config.eta)?;
            solve_l21_fidelity(&meas, &solver)?
        }
    };
    Ok(ExperimentRecord {
        seed: config.seed,
        norm: config.norm,
        doppler_bins: config.grid.doppler_bins(),
        delay_taps: config.grid.delay_taps(),
        sampling_pct: config.sampling_pct,
        snr_db: config.snr_db,
        sigma_used: solver.sigma,
        group_layout: solver.group_layout,
        mse: relative_mse(&report.estimate, &h)?,
        iterations: report.iterations_used,
        runtime_seconds: report.runtime_seconds,
        converged: report.converged,
    })
}

/// Channel, measurement, solve and error for one configuration.
pub fn run_single(config: &ExperimentConfig) -> Result<ExperimentRecord> {
    run_inner(config).map_err(|source| BenchError::Run {
        seed: config.seed,
        norm: config.norm.to_string(),
        sampling_pct: config.sampling_pct,
        snr_db: config.snr_db,
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub sampling_pct: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub norms: Vec<NormChoice>,
}

impl SweepAxes {
    /// Sampling 10..90 step 10 at 10 dB, both norms.
    pub fn preset() -> Self {
        Self {
            sampling_pct: (1..=9).map(|i| 10.0 * i as f64).collect(),
            snr_db: vec![10.0],
            norms: vec![NormChoice::L1, NormChoice::L21],
        }
    }
}

/// Configurations of a sweep in canonical order: sampling, then SNR, then
/// norm, then seed (`1..=n_seeds` offset by `base.seed - 1`).
pub fn sweep_configs(axes: &SweepAxes, base: &ExperimentConfig, n_seeds: usize) -> Result<Vec<ExperimentConfig>> {
    if axes.sampling_pct.is_empty() || axes.snr_db.is_empty() || axes.norms.is_empty() {
        return Err(BenchError::InvalidArgument("every sweep axis needs at least one value".into()));
    }
    if n_seeds == 0 {
        return Err(BenchError::InvalidArgument("need at least one seed".into()));
    }
    let mut out = Vec::with_capacity(axes.sampling_pct.len() * axes.snr_db.len() * axes.norms.len() * n_seeds);
    for &sampling_pct in &axes.sampling_pct {
        for &snr_db in &axes.snr_db {
            for &norm in &axes.norms {
                for i in 0..n_seeds as u64 {
                    out.push(ExperimentConfig {
                        sampling_pct,
                        snr_db,
                        norm,
                        seed: base.seed + i,
                        ..base.clone()
                    });
                }
            }
        }
    }
    Ok(out)
}

fn failed_record(config: &ExperimentConfig) -> ExperimentRecord {
    ExperimentRecord {
        seed: config.seed,
        norm: config.norm,
        doppler_bins: config.grid.doppler_bins(),
        delay_taps: config.grid.delay_taps(),
        sampling_pct: config.sampling_pct,
        snr_db: config.snr_db,
        sigma_used: f64::NAN,
        group_layout: config.solver.group_layout,
        mse: f64::NAN,
        iterations: 0,
        runtime_seconds: 0.0,
        converged: false,
    }
}

/// Runs every configuration of the sweep. Runs execute in parallel; the
/// output keeps the canonical order. A failing run becomes a failed row.
pub fn run_sweep(axes: &SweepAxes, base: &ExperimentConfig, n_seeds: usize) -> Result<Vec<ExperimentRecord>> {
    let configs = sweep_configs(axes, base, n_seeds)?;
    Ok(configs
        .par_iter()
        .map(|c| run_single(c).unwrap_or_else(|_| failed_record(c)))
        .collect())
}
