//! Value types for the delay-Doppler grid, channels and measurements.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid_arg, invalid_input, Result};
use crate::operators::SamplingMask;

/// Complex `L x K` matrix: rows are Doppler bins, columns are delay taps.
pub type CMatrix = Array2<Complex64>;

pub const DEFAULT_DOPPLER_RESOLUTION_HZ: f64 = 25.0;
pub const DEFAULT_DELAY_RESOLUTION_S: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayDopplerGrid {
    doppler_bins: usize,
    delay_taps: usize,
    doppler_resolution_hz: f64,
    delay_resolution_s: f64,
}

impl DelayDopplerGrid {
    /// Grid with the default 25 Hz / 0.05 s resolutions.
    pub fn new(doppler_bins: usize, delay_taps: usize) -> Result<Self> {
        Self::with_resolution(
            doppler_bins,
            delay_taps,
            DEFAULT_DOPPLER_RESOLUTION_HZ,
            DEFAULT_DELAY_RESOLUTION_S,
        )
    }

    pub fn with_resolution(
        doppler_bins: usize,
        delay_taps: usize,
        doppler_resolution_hz: f64,
        delay_resolution_s: f64,
    ) -> Result<Self> {
        if doppler_bins == 0 || delay_taps == 0 {
            return Err(invalid_arg(format!(
                "grid dimensions must be positive, got {doppler_bins}x{delay_taps}"
            )));
        }
        if !(doppler_resolution_hz > 0.0 && doppler_resolution_hz.is_finite())
            || !(delay_resolution_s > 0.0 && delay_resolution_s.is_finite())
        {
            return Err(invalid_arg("grid resolutions must be positive and finite"));
        }
        Ok(Self {
            doppler_bins,
            delay_taps,
            doppler_resolution_hz,
            delay_resolution_s,
        })
    }

    /// The 11 Doppler bins x 200 delay taps operating point.
    pub fn benchmark_default() -> Self {
        Self::new(11, 200).expect("static grid is valid")
    }

    pub fn doppler_bins(&self) -> usize {
        self.doppler_bins
    }

    pub fn delay_taps(&self) -> usize {
        self.delay_taps
    }

    pub fn doppler_resolution_hz(&self) -> f64 {
        self.doppler_resolution_hz
    }

    pub fn delay_resolution_s(&self) -> f64 {
        self.delay_resolution_s
    }

    /// `(L, K)`, the ndarray shape of every matrix on this grid.
    pub fn shape(&self) -> (usize, usize) {
        (self.doppler_bins, self.delay_taps)
    }

    pub fn size(&self) -> usize {
        self.doppler_bins * self.delay_taps
    }

    pub fn zeros(&self) -> CMatrix {
        CMatrix::zeros(self.shape())
    }

    pub(crate) fn check_shape(&self, m: &CMatrix, what: &str) -> Result<()> {
        if m.dim() != self.shape() {
            return Err(invalid_arg(format!(
                "{what} has shape {:?}, grid is {:?}",
                m.dim(),
                self.shape()
            )));
        }
        Ok(())
    }
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if all_finite(m) {
        Ok(())
    } else {
        Err(invalid_input(format!("{what} contains NaN or infinite entries")))
    }
}

/// Channel matrix `H` on a grid; shape-checked and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGrid {
    grid: DelayDopplerGrid,
    values: CMatrix,
}

impl ChannelGrid {
    pub fn new(grid: DelayDopplerGrid, values: CMatrix) -> Result<Self> {
        grid.check_shape(&values, "channel")?;
        ensure_finite(&values, "channel")?;
        Ok(Self { grid, values })
    }

    /// Wraps a matrix, taking the grid from its shape with default resolutions.
    pub fn from_matrix(values: CMatrix) -> Result<Self> {
        let (l, k) = values.dim();
        Self::new(DelayDopplerGrid::new(l, k)?, values)
    }

    pub fn zeros(grid: DelayDopplerGrid) -> Self {
        Self {
            grid,
            values: grid.zeros(),
        }
    }

    pub fn grid(&self) -> &DelayDopplerGrid {
        &self.grid
    }

    pub fn values(&self) -> &CMatrix {
        &self.values
    }

    pub fn into_values(self) -> CMatrix {
        self.values
    }
}

/// Measured spectrum: the full noisy matrix or a masked, zero-filled one.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub grid: DelayDopplerGrid,
    pub values: CMatrix,
    pub mask: Option<SamplingMask>,
    pub snr_db: Option<f64>,
}

impl Measurement {
    /// Checks shapes and that unobserved entries are exactly zero. Finiteness
    /// is left to the consumers so they can report it as an input error.
    pub fn new(
        grid: DelayDopplerGrid,
        values: CMatrix,
        mask: Option<SamplingMask>,
        snr_db: Option<f64>,
    ) -> Result<Self> {
        grid.check_shape(&values, "measurement")?;
        if let Some(m) = &mask {
            if m.grid().shape() != grid.shape() {
                return Err(invalid_arg("mask grid does not match measurement grid"));
            }
            let leaked = values
                .iter()
                .zip(m.kept().iter())
                .any(|(v, &k)| !k && *v != Complex64::new(0.0, 0.0));
            if leaked {
                return Err(invalid_arg(
                    "masked measurement has nonzero values at unobserved positions",
                ));
            }
        }
        Ok(Self {
            grid,
            values,
            mask,
            snr_db,
        })
    }

    /// Number of observed entries.
    pub fn observed(&self) -> usize {
        self.mask
            .as_ref()
            .map_or(self.grid.size(), |m| m.cardinality())
    }
}
