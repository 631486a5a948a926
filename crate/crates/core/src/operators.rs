//! Linear measurement model: unitary 2D DFT, random Fourier-domain
//! subsampling, and their composition `R o F` with its adjoint.

use std::fmt;
use std::sync::Arc;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid_arg, Result};
use crate::grid::{ensure_finite, CMatrix, ChannelGrid, DelayDopplerGrid};
use crate::rng::SimRng;

/// Unitary 2D DFT on a fixed `L x K` grid.
///
/// Forward kernel is `exp(-2 pi i (l m / L + k n / K)) / sqrt(L K)`; the
/// adjoint is the inverse transform.
#[derive(Clone)]
pub struct Dft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl fmt::Debug for Dft2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dft2")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl Dft2 {
    pub fn new(grid: &DelayDopplerGrid) -> Self {
        let (rows, cols) = grid.shape();
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
            scale: 1.0 / ((rows * cols) as f64).sqrt(),
        }
    }

    pub fn forward(&self, x: &CMatrix) -> CMatrix {
        self.transform(x, &self.row_fwd, &self.col_fwd)
    }

    pub fn adjoint(&self, u: &CMatrix) -> CMatrix {
        self.transform(u, &self.row_inv, &self.col_inv)
    }

    fn transform(&self, x: &CMatrix, row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) -> CMatrix {
        assert_eq!(x.dim(), (self.rows, self.cols), "Dft2 shape mismatch");
        // Row-major buffer: transform rows, then transpose and transform columns.
        let mut buf: Vec<Complex64> = x.iter().copied().collect();
        row.process(&mut buf);
        let mut t = vec![Complex64::new(0.0, 0.0); buf.len()];
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[c * self.rows + r] = buf[r * self.cols + c];
            }
        }
        col.process(&mut t);
        Array2::from_shape_fn((self.rows, self.cols), |(r, c)| t[c * self.rows + r] * self.scale)
    }
}

/// Unitary 2D DFT of a channel.
pub fn dft2_forward(h: &ChannelGrid) -> Result<CMatrix> {
    ensure_finite(h.values(), "channel")?;
    Ok(Dft2::new(h.grid()).forward(h.values()))
}

/// Adjoint (= inverse) unitary 2D DFT.
pub fn dft2_adjoint(u: &CMatrix) -> Result<CMatrix> {
    ensure_finite(u, "spectrum")?;
    let (l, k) = u.dim();
    let grid = DelayDopplerGrid::new(l, k)?;
    Ok(Dft2::new(&grid).adjoint(u))
}

/// Binary selection `R` of observed Fourier-domain positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    grid: DelayDopplerGrid,
    kept: Array2<bool>,
    cardinality: usize,
}

impl SamplingMask {
    pub fn full(grid: DelayDopplerGrid) -> Self {
        Self {
            grid,
            kept: Array2::from_elem(grid.shape(), true),
            cardinality: grid.size(),
        }
    }

    /// Builds a mask from an explicit indicator; it must keep at least one entry.
    pub fn from_kept(grid: DelayDopplerGrid, kept: Array2<bool>) -> Result<Self> {
        if kept.dim() != grid.shape() {
            return Err(invalid_arg("mask shape does not match grid"));
        }
        let cardinality = kept.iter().filter(|&&k| k).count();
        if cardinality == 0 {
            return Err(invalid_arg("mask keeps no entries"));
        }
        Ok(Self {
            grid,
            kept,
            cardinality,
        })
    }

    pub fn grid(&self) -> &DelayDopplerGrid {
        &self.grid
    }

    pub fn kept(&self) -> &Array2<bool> {
        &self.kept
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn is_full(&self) -> bool {
        self.cardinality == self.grid.size()
    }
}

/// Number of kept positions for a sampling percentage: `round(K L S / 100)`
/// clamped to `[1, K L]`.
pub fn mask_cardinality(grid: &DelayDopplerGrid, sampling_pct: f64) -> Result<usize> {
    if !(sampling_pct > 0.0 && sampling_pct <= 100.0) {
        return Err(invalid_arg(format!(
            "sampling percentage must be in (0, 100], got {sampling_pct}"
        )));
    }
    let n = grid.size();
    let m = (n as f64 * sampling_pct / 100.0).round() as usize;
    Ok(m.clamp(1, n))
}

/// Uniform random selection of `mask_cardinality` positions without
/// replacement (partial Fisher-Yates over row-major indices).
pub fn make_mask(grid: &DelayDopplerGrid, sampling_pct: f64, rng_seed: u64) -> Result<SamplingMask> {
    let m = mask_cardinality(grid, sampling_pct)?;
    let n = grid.size();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = SimRng::new(rng_seed);
    for i in 0..m {
        let j = i + rng.index(n - i);
        idx.swap(i, j);
    }
    let mut kept = Array2::from_elem(grid.shape(), false);
    let cols = grid.delay_taps();
    for &p in &idx[..m] {
        kept[[p / cols, p % cols]] = true;
    }
    Ok(SamplingMask {
        grid: *grid,
        kept,
        cardinality: m,
    })
}

/// Zeroes every entry the mask drops.
pub fn apply_mask(mask: &SamplingMask, u: &CMatrix) -> Result<CMatrix> {
    if u.dim() != mask.grid.shape() {
        return Err(invalid_arg(format!(
            "matrix shape {:?} does not match mask {:?}",
            u.dim(),
            mask.grid.shape()
        )));
    }
    let mut out = u.clone();
    mask_in_place(mask, &mut out);
    Ok(out)
}

fn mask_in_place(mask: &SamplingMask, u: &mut CMatrix) {
    Zip::from(u).and(&mask.kept).for_each(|v, &k| {
        if !k {
            *v = Complex64::new(0.0, 0.0);
        }
    });
}

/// `F h`, or `R o (F h)` when a mask is given.
pub fn forward_model(h: &ChannelGrid, mask: Option<&SamplingMask>) -> Result<CMatrix> {
    if let Some(m) = mask {
        if m.grid.shape() != h.grid().shape() {
            return Err(invalid_arg("mask grid does not match channel grid"));
        }
    }
    let u = dft2_forward(h)?;
    Ok(match mask {
        Some(m) => {
            let mut u = u;
            mask_in_place(m, &mut u);
            u
        }
        None => u,
    })
}

/// Upper bound on `||R o F||^2`. Exactly one for the unitary DFT with or
/// without a selection mask; kept as the hook for weighted operators.
pub fn operator_norm_sq(mask: Option<&SamplingMask>, grid: &DelayDopplerGrid) -> f64 {
    let _ = (mask, grid);
    1.0
}

/// Precomputed `A = R o F` (or `F`) used inside the solvers.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    grid: DelayDopplerGrid,
    dft: Dft2,
    mask: Option<SamplingMask>,
}

impl MeasurementOperator {
    pub fn new(grid: DelayDopplerGrid, mask: Option<SamplingMask>) -> Result<Self> {
        if let Some(m) = &mask {
            if m.grid.shape() != grid.shape() {
                return Err(invalid_arg("mask grid does not match operator grid"));
            }
        }
        Ok(Self {
            grid,
            dft: Dft2::new(&grid),
            mask,
        })
    }

    pub fn grid(&self) -> &DelayDopplerGrid {
        &self.grid
    }

    pub fn mask(&self) -> Option<&SamplingMask> {
        self.mask.as_ref()
    }

    pub fn norm_sq(&self) -> f64 {
        operator_norm_sq(self.mask.as_ref(), &self.grid)
    }

    pub fn forward(&self, h: &CMatrix) -> CMatrix {
        let mut u = self.dft.forward(h);
        if let Some(m) = &self.mask {
            mask_in_place(m, &mut u);
        }
        u
    }

    pub fn adjoint(&self, u: &CMatrix) -> CMatrix {
        match &self.mask {
            Some(m) => {
                let mut u = u.clone();
                mask_in_place(m, &mut u);
                self.dft.adjoint(&u)
            }
            None => self.dft.adjoint(u),
        }
    }

    /// Solves `(I + A^H A) x = rhs`. `A^H A = F^H R F` is diagonal in the
    /// Fourier domain, so this is one transform pair.
    pub fn solve_regularized_normal(&self, rhs: &CMatrix) -> CMatrix {
        let mut v = self.dft.forward(rhs);
        match &self.mask {
            Some(m) => Zip::from(&mut v).and(&m.kept).for_each(|x, &k| {
                if k {
                    *x *= 0.5;
                }
            }),
            None => v.mapv_inplace(|x| x * 0.5),
        }
        self.dft.adjoint(&v)
    }

    /// Euclidean projection of `h` onto `{x : ||A x - center||_2 <= radius}`.
    /// Only the observed Fourier coefficients are moved.
    pub fn project_fidelity(&self, h: &CMatrix, center: &CMatrix, radius: f64) -> CMatrix {
        let mut v = self.dft.forward(h);
        let kept = |r: usize, c: usize| self.mask.as_ref().is_none_or(|m| m.kept[[r, c]]);
        let mut dist_sq = 0.0;
        for ((r, c), x) in v.indexed_iter() {
            if kept(r, c) {
                dist_sq += (x - center[[r, c]]).norm_sqr();
            }
        }
        let dist = dist_sq.sqrt();
        if dist <= radius {
            return h.clone();
        }
        let s = radius / dist;
        for ((r, c), x) in v.indexed_iter_mut() {
            if kept(r, c) {
                let ctr = center[[r, c]];
                *x = ctr + (*x - ctr) * s;
            }
        }
        self.dft.adjoint(&v)
    }
}

/// Power-iteration estimate of `||A||^2 = lambda_max(A^H A)` from a seeded
/// random start.
pub fn estimate_norm_sq(op: &MeasurementOperator, iters: usize, seed: u64) -> f64 {
    let mut rng = SimRng::new(seed);
    let mut x = CMatrix::from_shape_fn(op.grid().shape(), |_| rng.complex_normal());
    let mut lambda = 0.0;
    for _ in 0..iters {
        let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        x.mapv_inplace(|z| z / n);
        let y = op.adjoint(&op.forward(&x));
        lambda = x
            .iter()
            .zip(y.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        x = y;
    }
    lambda
}
