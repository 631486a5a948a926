//! Norms on complex matrices and the proximal / projection kernels built
//! on them. Squares of complex entries are taken as squared moduli.

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayBase, Axis, Data, Dimension};
use num_complex::Complex64;

use crate::error::{invalid_arg, Error, Result};
use crate::grid::CMatrix;

/// How an `L x K` matrix is partitioned into groups for the l21 norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GroupLayout {
    /// One group per row (per Doppler bin).
    #[default]
    Rows,
    /// One group per column (per delay tap).
    Cols,
}

impl GroupLayout {
    fn axis(self) -> Axis {
        match self {
            GroupLayout::Rows => Axis(0),
            GroupLayout::Cols => Axis(1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroupLayout::Rows => "rows",
            GroupLayout::Cols => "cols",
        }
    }
}

impl fmt::Display for GroupLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rows" => Ok(GroupLayout::Rows),
            "cols" => Ok(GroupLayout::Cols),
            other => Err(invalid_arg(format!("unknown group layout '{other}'"))),
        }
    }
}

/// Frobenius norm.
pub fn norm_l2<S, D>(x: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = Complex64>,
    D: Dimension,
{
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_l2_sq<S, D>(x: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = Complex64>,
    D: Dimension,
{
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Sum of moduli.
pub fn norm_l1<S, D>(x: &ArrayBase<S, D>) -> f64
where
    S: Data<Elem = Complex64>,
    D: Dimension,
{
    x.iter().map(|z| z.norm()).sum()
}

/// Sum over groups of the group Euclidean norms.
pub fn norm_l21(x: &CMatrix, layout: GroupLayout) -> f64 {
    x.axis_iter(layout.axis()).map(|g| norm_l2(&g)).sum()
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid_arg(format!(
            "threshold must be a finite nonnegative number, got {lambda}"
        )))
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(invalid_arg(format!(
            "radius must be positive and finite, got {radius}"
        )))
    }
}

#[inline]
fn shrink(z: Complex64, lambda: f64) -> Complex64 {
    let m = z.norm();
    if m <= lambda {
        Complex64::new(0.0, 0.0)
    } else {
        z * ((m - lambda) / m)
    }
}

/// Entrywise complex soft threshold: `z (1 - lambda/|z|)_+`.
pub fn prox_l1(z: &CMatrix, lambda: f64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(z.clone());
    }
    Ok(z.mapv(|v| shrink(v, lambda)))
}

/// Group soft threshold: every group `g` becomes `g (1 - lambda/||g||)_+`.
pub fn prox_l21(z: &CMatrix, lambda: f64, layout: GroupLayout) -> Result<CMatrix> {
    check_lambda(lambda)?;
    let mut out = z.clone();
    if lambda == 0.0 {
        return Ok(out);
    }
    for mut g in out.axis_iter_mut(layout.axis()) {
        let n = norm_l2(&g);
        if n <= lambda {
            g.fill(Complex64::new(0.0, 0.0));
        } else {
            let s = (n - lambda) / n;
            g.mapv_inplace(|v| v * s);
        }
    }
    Ok(out)
}

/// Soft-threshold level `theta` such that `sum (a_i - theta)_+ = radius`
/// for nonnegative `a` with `sum a > radius` (sort-based).
pub fn l1_ball_threshold(moduli: &[f64], radius: f64) -> f64 {
    let mut u: Vec<f64> = moduli.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - radius) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    theta.max(0.0)
}

/// Euclidean projection onto `{x : ||x||_1 <= radius}`. Moduli are projected
/// onto the scaled simplex and the input phases are kept.
pub fn project_l1_ball(z: &CMatrix, radius: f64) -> Result<CMatrix> {
    check_radius(radius)?;
    if norm_l1(z) <= radius {
        return Ok(z.clone());
    }
    let moduli: Vec<f64> = z.iter().map(|v| v.norm()).collect();
    let theta = l1_ball_threshold(&moduli, radius);
    Ok(z.mapv(|v| shrink(v, theta)))
}

/// Euclidean projection onto the ball of `radius` around `center`.
pub fn project_l2_ball(z: &CMatrix, radius: f64, center: &CMatrix) -> Result<CMatrix> {
    check_radius(radius)?;
    if z.dim() != center.dim() {
        return Err(invalid_arg(format!(
            "shape mismatch: point {:?}, center {:?}",
            z.dim(),
            center.dim()
        )));
    }
    let diff = z - center;
    let d = norm_l2(&diff);
    if d <= radius {
        return Ok(z.clone());
    }
    let s = radius / d;
    Ok(center + &diff.mapv(|v| v * s))
}
