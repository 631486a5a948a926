#![allow(dead_code)]

use num_complex::Complex64;
use uwa_est_core::rng::SimRng;
use uwa_est_core::CMatrix;

pub fn random_matrix(rng: &mut SimRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_shape_fn((rows, cols), |_| rng.complex_normal())
}

pub fn frob(x: &CMatrix) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Unitary 2D DFT straight from the double-sum definition.
pub fn dft2_by_definition(h: &CMatrix) -> CMatrix {
    let (l, k) = h.dim();
    let scale = 1.0 / ((l * k) as f64).sqrt();
    CMatrix::from_shape_fn((l, k), |(m, n)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..l {
            for q in 0..k {
                let phase = -std::f64::consts::TAU
                    * ((m * p) as f64 / l as f64 + (n * q) as f64 / k as f64);
                acc += h[[p, q]] * Complex64::from_polar(1.0, phase);
            }
        }
        acc * scale
    })
}
