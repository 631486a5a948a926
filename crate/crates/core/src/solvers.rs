//! Constrained recovery of the channel from Fourier-domain measurements.
//!
//! * [`solve_l1_constrained`]: `min ||U - A H||_2^2  s.t. ||H||_1 <= sigma`,
//!   projected FISTA with function-value restart.
//! * [`solve_l21_fidelity`]: `min ||H||_21  s.t. ||U - A H||_2^2 <= sigma`,
//!   two-block scaled ADMM.
//!
//! `A` is the unitary 2D DFT, optionally followed by the sampling mask.

use std::time::Instant;

use crate::error::{invalid_arg, Error, Result};
use crate::grid::{ensure_finite, CMatrix, ChannelGrid, Measurement};
use crate::norms::{norm_l1, norm_l2, norm_l2_sq, norm_l21, project_l1_ball, project_l2_ball, prox_l21, GroupLayout};
use crate::operators::MeasurementOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative-change (FISTA) or residual (ADMM) stopping tolerance.
    pub tol: f64,
    /// Constraint radius: l1-ball radius or squared fidelity bound.
    pub sigma: f64,
    /// Safety factor in (0, 1] on the 1/Lipschitz gradient step.
    pub step_scale: f64,
    pub admm_rho: f64,
    pub group_layout: GroupLayout,
}

impl SolverConfig {
    pub fn new(sigma: f64) -> Self {
        Self {
            max_iters: 2000,
            tol: 1e-6,
            sigma,
            step_scale: 1.0,
            admm_rho: 1.0,
            group_layout: GroupLayout::Rows,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.max_iters == 0 {
            return Err(invalid_arg("max_iters must be at least 1"));
        }
        if !positive(self.sigma) {
            return Err(invalid_arg(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !positive(self.tol) {
            return Err(invalid_arg(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.step_scale > 0.0 && self.step_scale <= 1.0) {
            return Err(invalid_arg(format!(
                "step_scale must be in (0, 1], got {}",
                self.step_scale
            )));
        }
        if !positive(self.admm_rho) {
            return Err(invalid_arg(format!("admm_rho must be positive, got {}", self.admm_rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub estimate: ChannelGrid,
    pub iterations_used: usize,
    pub final_objective: f64,
    /// Constraint violation of the estimate, `>= 0`.
    pub final_feasibility_gap: f64,
    /// Wall-clock time of the iteration loop only.
    pub runtime_seconds: f64,
    pub converged: bool,
}

fn prepare(meas: &Measurement, config: &SolverConfig) -> Result<MeasurementOperator> {
    config.validate()?;
    ensure_finite(&meas.values, "measurement")?;
    MeasurementOperator::new(meas.grid, meas.mask.clone())
}

fn relative_change(new: &CMatrix, old: &CMatrix) -> f64 {
    let diff = norm_l2(&(new - old));
    diff / norm_l2(old).max(1e-30)
}

/// Projected accelerated gradient for the l1-ball constrained least squares.
///
/// Starts from the projected back-projection `P(A^H U)`, steps with
/// `step_scale / (2 ||A||^2)`, and drops the momentum whenever the objective
/// goes up. The returned estimate is the lowest-objective iterate.
pub fn solve_l1_constrained(meas: &Measurement, config: &SolverConfig) -> Result<SolverReport> {
    let op = prepare(meas, config)?;
    let u = &meas.values;
    let sigma = config.sigma;
    let step = config.step_scale / (2.0 * op.norm_sq());
    let objective = |x: &CMatrix| norm_l2_sq(&(&op.forward(x) - u));

    let start = Instant::now();
    let mut x = project_l1_ball(&op.adjoint(u), sigma)?;
    let mut fx = objective(&x);
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut best = (x.clone(), fx);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iters {
        iterations += 1;
        let residual = &op.forward(&y) - u;
        let grad = op.adjoint(&residual);
        // Gradient of ||A y - U||^2 is 2 A^H (A y - U).
        let trial = &y - &grad.mapv(|g| g * (2.0 * step));
        let x_new = project_l1_ball(&trial, sigma)?;
        let f_new = objective(&x_new);

        if f_new > fx {
            t = 1.0;
            y = x_new.clone();
        } else {
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_new;
            y = &x_new + &(&x_new - &x).mapv(|d| d * beta);
            t = t_new;
        }
        let change = relative_change(&x_new, &x);
        x = x_new;
        fx = f_new;
        if fx < best.1 {
            best = (x.clone(), fx);
        }
        if change < config.tol {
            converged = true;
            break;
        }
    }
    let runtime_seconds = start.elapsed().as_secs_f64();

    let (estimate, final_objective) = best;
    let gap = (norm_l1(&estimate) - sigma).max(0.0);
    Ok(SolverReport {
        estimate: ChannelGrid::new(meas.grid, estimate)?,
        iterations_used: iterations,
        final_objective,
        final_feasibility_gap: gap,
        runtime_seconds,
        converged,
    })
}

/// Two-block ADMM for mixed-norm minimization under the fidelity bound.
///
/// Splits `Z1 = H` (group shrinkage) and `Z2 = A H` (projection onto the
/// ball of radius `sqrt(sigma)` around `U`). The `H` update solves
/// `(I + A^H A) H = (Z1 - Y1) + A^H (Z2 - Y2)` exactly in the Fourier domain.
///
/// The problem is solved in units where the observed entries of `U` have
/// unit RMS, so `admm_rho` and `tol` are independent of the data scale.
/// The last `H` iterate is projected onto the fidelity set before it is
/// returned.
pub fn solve_l21_fidelity(meas: &Measurement, config: &SolverConfig) -> Result<SolverReport> {
    let op = prepare(meas, config)?;
    let layout = config.group_layout;
    let grid = meas.grid;
    let data_energy = norm_l2_sq(&meas.values);

    let start = Instant::now();
    if data_energy <= config.sigma {
        // Zero is feasible and minimizes any norm.
        return Ok(SolverReport {
            estimate: ChannelGrid::zeros(grid),
            iterations_used: 0,
            final_objective: 0.0,
            final_feasibility_gap: 0.0,
            runtime_seconds: start.elapsed().as_secs_f64(),
            converged: true,
        });
    }

    let scale = (data_energy / meas.observed() as f64).sqrt();
    let u = meas.values.mapv(|z| z / scale);
    let radius = config.sigma.sqrt() / scale;
    let rho = config.admm_rho;
    let threshold = (grid.size() as f64).sqrt() * config.tol;

    let mut h = op.adjoint(&u);
    let mut z1 = h.clone();
    let mut z2 = op.forward(&h);
    let mut y1 = grid.zeros();
    let mut y2 = grid.zeros();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iters {
        iterations += 1;
        let rhs = &(&z1 - &y1) + &op.adjoint(&(&z2 - &y2));
        h = op.solve_regularized_normal(&rhs);
        let ah = op.forward(&h);

        let z1_new = prox_l21(&(&h + &y1), 1.0 / rho, layout)?;
        let z2_new = project_l2_ball(&(&ah + &y2), radius, &u)?;

        let r1 = &h - &z1_new;
        let r2 = &ah - &z2_new;
        let primal = (norm_l2_sq(&r1) + norm_l2_sq(&r2)).sqrt();
        let dual_vec = &(&z1_new - &z1) + &op.adjoint(&(&z2_new - &z2));
        let dual = rho * norm_l2(&dual_vec);

        y1 += &r1;
        y2 += &r2;
        z1 = z1_new;
        z2 = z2_new;

        if primal < threshold && dual < threshold {
            converged = true;
            break;
        }
    }

    let h = op.project_fidelity(&h, &u, radius).mapv(|z| z * scale);
    let runtime_seconds = start.elapsed().as_secs_f64();

    let misfit = norm_l2_sq(&(&op.forward(&h) - &meas.values));
    Ok(SolverReport {
        final_objective: norm_l21(&h, layout),
        final_feasibility_gap: (misfit - config.sigma).max(0.0),
        estimate: ChannelGrid::new(grid, h)?,
        iterations_used: iterations,
        runtime_seconds,
        converged,
    })
}

/// `||estimate - truth||_F^2 / ||truth||_F^2`.
pub fn relative_mse(estimate: &ChannelGrid, truth: &ChannelGrid) -> Result<f64> {
    if estimate.grid().shape() != truth.grid().shape() {
        return Err(invalid_arg(format!(
            "shape mismatch: estimate {:?}, truth {:?}",
            estimate.grid().shape(),
            truth.grid().shape()
        )));
    }
    let denom = norm_l2_sq(truth.values());
    if denom == 0.0 {
        return Err(Error::DegenerateTruth);
    }
    Ok(norm_l2_sq(&(estimate.values() - truth.values())) / denom)
}

/// Fidelity radius `eta * m * noise_std^2`: the expected squared residual at
/// the true channel when `m` entries carry noise of per-entry power
/// `noise_std^2`.
pub fn sigma_from_noise(noise_std: f64, m_samples: usize, eta: f64) -> Result<f64> {
    if !(noise_std >= 0.0 && noise_std.is_finite()) {
        return Err(invalid_arg(format!("noise std must be nonnegative, got {noise_std}")));
    }
    if m_samples == 0 {
        return Err(invalid_arg("sample count must be positive"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid_arg(format!("eta must be positive, got {eta}")));
    }
    Ok(eta * m_samples as f64 * noise_std * noise_std)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DelayDopplerGrid;
    use num_complex::Complex64;

    fn zero_measurement(l: usize, k: usize) -> Measurement {
        let g = DelayDopplerGrid::new(l, k).unwrap();
        Measurement::new(g, g.zeros(), None, None).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1.0).validate().is_ok());
        assert!(SolverConfig::new(0.0).validate().is_err());
        assert!(SolverConfig::new(-1.0).validate().is_err());
        let mut c = SolverConfig::new(1.0);
        c.max_iters = 0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::new(1.0);
        c.step_scale = 1.5;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::new(1.0);
        c.admm_rho = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_data_gives_zero_estimate() {
        let m = zero_measurement(4, 8);
        let r = solve_l1_constrained(&m, &SolverConfig::new(2.0)).unwrap();
        assert!(r.estimate.values().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert_eq!(r.final_objective, 0.0);
        assert!(r.converged && r.iterations_used <= 2);
        let r = solve_l21_fidelity(&m, &SolverConfig::new(0.5)).unwrap();
        assert!(r.estimate.values().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(r.converged);
    }

    #[test]
    fn rejects_bad_sigma_and_nan_data() {
        let m = zero_measurement(2, 2);
        for solve in [solve_l1_constrained, solve_l21_fidelity] {
            assert!(matches!(solve(&m, &SolverConfig::new(0.0)), Err(Error::InvalidArgument(_))));
            let mut bad = m.clone();
            bad.values[[0, 0]] = Complex64::new(f64::NAN, 0.0);
            assert!(matches!(solve(&bad, &SolverConfig::new(1.0)), Err(Error::InvalidInput(_))));
        }
    }

    #[test]
    fn relative_mse_cases() {
        let g = DelayDopplerGrid::new(2, 3).unwrap();
        let truth = ChannelGrid::new(g, CMatrix::from_elem((2, 3), Complex64::new(0.3, -0.2))).unwrap();
        assert_eq!(relative_mse(&truth, &truth).unwrap(), 0.0);
        assert_eq!(relative_mse(&ChannelGrid::zeros(g), &truth).unwrap(), 1.0);
        let scaled = ChannelGrid::new(g, truth.values().mapv(|z| z * 1.1)).unwrap();
        assert!((relative_mse(&scaled, &truth).unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(relative_mse(&truth, &ChannelGrid::zeros(g)), Err(Error::DegenerateTruth));
        let other = ChannelGrid::zeros(DelayDopplerGrid::new(3, 2).unwrap());
        assert!(matches!(relative_mse(&other, &truth), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn sigma_rule() {
        assert_eq!(sigma_from_noise(0.0, 10, 1.0).unwrap(), 0.0);
        assert!((sigma_from_noise(0.1, 1100, 1.0).unwrap() - 11.0).abs() < 1e-12);
        assert!(sigma_from_noise(-0.1, 10, 1.0).is_err());
        assert!(sigma_from_noise(0.1, 0, 1.0).is_err());
        assert!(sigma_from_noise(0.1, 10, 0.0).is_err());
    }
}
