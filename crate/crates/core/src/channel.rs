//! Synthetic cluster-sparse delay-Doppler channels and additive noise.

use num_complex::Complex64;

use crate::error::{invalid_arg, Error, Result};
use crate::grid::{ensure_finite, CMatrix, ChannelGrid, DelayDopplerGrid};
use crate::norms::norm_l2;
use crate::operators::SamplingMask;
use crate::rng::SimRng;

pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

/// Cluster layout of a synthetic channel. Each cluster covers
/// `taps_per_cluster` contiguous delay taps on `1 + doppler_spread_bins`
/// adjacent Doppler rows (capped at the grid height).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpec {
    pub n_clusters: usize,
    pub taps_per_cluster: usize,
    pub doppler_spread_bins: usize,
    pub amplitude_decay: f64,
    pub rng_seed: u64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            n_clusters: 3,
            taps_per_cluster: 5,
            doppler_spread_bins: 1,
            amplitude_decay: 0.8,
            rng_seed: 0,
        }
    }
}

impl ClusterSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Doppler rows covered by each cluster on `grid`.
    pub fn rows_per_cluster(&self, grid: &DelayDopplerGrid) -> usize {
        (1 + self.doppler_spread_bins).min(grid.doppler_bins())
    }

    /// Number of nonzero entries a generated channel has on `grid`.
    pub fn support_size(&self, grid: &DelayDopplerGrid) -> usize {
        self.n_clusters * self.taps_per_cluster * self.rows_per_cluster(grid)
    }

    fn validate(&self, grid: &DelayDopplerGrid) -> Result<()> {
        if self.n_clusters == 0 || self.taps_per_cluster == 0 {
            return Err(invalid_arg("cluster count and taps per cluster must be positive"));
        }
        if !(self.amplitude_decay > 0.0 && self.amplitude_decay <= 1.0) {
            return Err(invalid_arg(format!(
                "amplitude decay must be in (0, 1], got {}",
                self.amplitude_decay
            )));
        }
        if self.taps_per_cluster > grid.delay_taps() {
            return Err(invalid_arg(format!(
                "{} taps per cluster do not fit in {} delay taps",
                self.taps_per_cluster,
                grid.delay_taps()
            )));
        }
        if self.support_size(grid) > grid.size() {
            return Err(invalid_arg("clusters do not fit on the grid"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Block {
    row: usize,
    col: usize,
    rows: usize,
    cols: usize,
}

impl Block {
    fn overlaps(&self, o: &Block) -> bool {
        self.row < o.row + o.rows
            && o.row < self.row + self.rows
            && self.col < o.col + o.cols
            && o.col < self.col + self.cols
    }
}

fn normalize(grid: DelayDopplerGrid, mut values: CMatrix) -> Result<ChannelGrid> {
    let n = norm_l2(&values);
    values.mapv_inplace(|z| z / n);
    ChannelGrid::new(grid, values)
}

/// Draws a cluster-sparse channel with unit Frobenius norm.
///
/// Cluster corners are drawn uniformly (row first, then column) and redrawn
/// while they overlap an earlier cluster. Tap gains are `CN(0, 1)` scaled by
/// `amplitude_decay^p`, `p` being the delay offset inside the cluster.
pub fn generate_channel(grid: &DelayDopplerGrid, spec: &ClusterSpec) -> Result<ChannelGrid> {
    spec.validate(grid)?;
    let mut rng = SimRng::new(spec.rng_seed);
    let rows = spec.rows_per_cluster(grid);
    let cols = spec.taps_per_cluster;
    let mut blocks: Vec<Block> = Vec::with_capacity(spec.n_clusters);
    let mut attempts = 0;
    while blocks.len() < spec.n_clusters {
        if attempts == MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::PlacementFailure {
                clusters: spec.n_clusters,
                attempts,
            });
        }
        attempts += 1;
        let b = Block {
            row: rng.index(grid.doppler_bins() - rows + 1),
            col: rng.index(grid.delay_taps() - cols + 1),
            rows,
            cols,
        };
        if blocks.iter().all(|o| !o.overlaps(&b)) {
            blocks.push(b);
        }
    }

    let mut values = grid.zeros();
    for b in &blocks {
        for r in b.row..b.row + b.rows {
            let mut gain = 1.0;
            for c in b.col..b.col + b.cols {
                values[[r, c]] = rng.complex_normal() * gain;
                gain *= spec.amplitude_decay;
            }
        }
    }
    normalize(*grid, values)
}

/// Draws `n_taps` isolated taps at distinct uniformly random positions,
/// `CN(0, 1)` gains, unit Frobenius norm.
pub fn generate_scattered(grid: &DelayDopplerGrid, n_taps: usize, rng_seed: u64) -> Result<ChannelGrid> {
    if n_taps == 0 || n_taps > grid.size() {
        return Err(invalid_arg(format!(
            "cannot place {n_taps} taps on a grid of {} entries",
            grid.size()
        )));
    }
    let mut rng = SimRng::new(rng_seed);
    let n = grid.size();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut values = grid.zeros();
    let k = grid.delay_taps();
    for i in 0..n_taps {
        let j = i + rng.index(n - i);
        idx.swap(i, j);
        let p = idx[i];
        values[[p / k, p % k]] = rng.complex_normal();
    }
    normalize(*grid, values)
}

/// Adds circular complex Gaussian noise to every retained entry (all of
/// them without a mask) at the requested SNR, measured against the mean
/// squared modulus of the retained clean entries.
///
/// Returns the noisy matrix and the per-entry noise std (`E|n|^2 = std^2`).
pub fn add_awgn(clean: &CMatrix, spec: &NoiseSpec, mask: Option<&SamplingMask>) -> Result<(CMatrix, f64)> {
    ensure_finite(clean, "clean signal")?;
    if !spec.snr_db.is_finite() {
        return Err(invalid_arg("SNR must be finite"));
    }
    if let Some(m) = mask {
        if m.grid().shape() != clean.dim() {
            return Err(invalid_arg("mask shape does not match signal"));
        }
    }
    let retained = |r: usize, c: usize| mask.is_none_or(|m| m.kept()[[r, c]]);
    let mut power = 0.0;
    let mut count = 0usize;
    for ((r, c), z) in clean.indexed_iter() {
        if retained(r, c) {
            power += z.norm_sqr();
            count += 1;
        }
    }
    if count == 0 || power == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    let signal_power = power / count as f64;
    let noise_std = (signal_power / 10f64.powf(spec.snr_db / 10.0)).sqrt();

    let mut rng = SimRng::new(spec.rng_seed);
    let mut noisy = clean.clone();
    for ((r, c), z) in noisy.indexed_iter_mut() {
        if retained(r, c) {
            *z += rng.complex_normal() * noise_std;
        }
    }
    Ok((noisy, noise_std))
}

/// Nonzero entries as `(row, col, value)` in row-major order.
pub fn sparse_entries(h: &ChannelGrid) -> Vec<(usize, usize, Complex64)> {
    h.values()
        .indexed_iter()
        .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
        .map(|((r, c), z)| (r, c, *z))
        .collect()
}
