//! Sparse delay-Doppler channel estimation from partial 2D Fourier
//! measurements.
//!
//! The channel `H` lives on an `L x K` grid (Doppler bins by delay taps).
//! Measurements are its unitary 2D DFT, optionally subsampled by a random
//! mask, plus complex Gaussian noise. Two recovery problems are provided:
//! least squares inside an l1 ball, and l21 minimization inside a data
//! fidelity ball.

pub mod channel;
pub mod error;
pub mod grid;
pub mod norms;
pub mod operators;
pub mod rng;
pub mod solvers;

pub use channel::{add_awgn, generate_channel, generate_scattered, ClusterSpec, NoiseSpec};
pub use error::{Error, Result};
pub use grid::{CMatrix, ChannelGrid, DelayDopplerGrid, Measurement};
pub use norms::GroupLayout;
pub use operators::{SamplingMask, MeasurementOperator};
pub use solvers::{relative_mse, sigma_from_noise, solve_l1_constrained, solve_l21_fidelity, SolverConfig, SolverReport};
