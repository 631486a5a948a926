mod common;

use common::*;
use num_complex::Complex64;
use uwa_est_core::operators::{
    apply_mask, dft2_adjoint, dft2_forward, estimate_norm_sq, forward_model, make_mask, MeasurementOperator,
};
use uwa_est_core::rng::SimRng;
use uwa_est_core::{ChannelGrid, DelayDopplerGrid};

#[test]
fn forward_matches_double_sum() {
    let mut rng = SimRng::new(100);
    for (l, k) in [(3, 5), (1, 7), (4, 4), (8, 8), (5, 1)] {
        let g = DelayDopplerGrid::new(l, k).unwrap();
        let h = random_matrix(&mut rng, l, k);
        let fast = dft2_forward(&ChannelGrid::new(g, h.clone()).unwrap()).unwrap();
        let slow = dft2_by_definition(&h);
        assert!(max_abs_diff(&fast, &slow) <= 1e-12, "{l}x{k}");
    }
}

#[test]
fn adjoint_pairs_on_grids_up_to_16x32() {
    let mut rng = SimRng::new(101);
    for i in 0..100 {
        let l = 1 + rng.index(16);
        let k = 1 + rng.index(32);
        let g = DelayDopplerGrid::new(l, k).unwrap();
        let x = random_matrix(&mut rng, l, k);
        let y = random_matrix(&mut rng, l, k);
        let fx = dft2_forward(&ChannelGrid::new(g, x.clone()).unwrap()).unwrap();
        let fhy = dft2_adjoint(&y).unwrap();
        let gap = (inner(&fx, &y) - inner(&x, &fhy)).norm();
        assert!(gap <= 1e-10 * frob(&x) * frob(&y), "pair {i} on {l}x{k}: {gap}");
    }
}

#[test]
fn parseval_and_round_trip() {
    let mut rng = SimRng::new(102);
    for (l, k) in [(4, 4), (8, 16), (11, 200), (8, 8), (16, 32)] {
        let g = DelayDopplerGrid::new(l, k).unwrap();
        let x = random_matrix(&mut rng, l, k);
        let fx = dft2_forward(&ChannelGrid::new(g, x.clone()).unwrap()).unwrap();
        assert!((frob(&fx) - frob(&x)).abs() <= 1e-10 * frob(&x));
        let back = dft2_adjoint(&fx).unwrap();
        assert!(frob(&(&back - &x)) <= 1e-10 * frob(&x));
    }
}

#[test]
fn constant_spectrum_inverts_to_impulse() {
    let u = uwa_est_core::CMatrix::from_elem((4, 4), Complex64::new(0.25, 0.0));
    let h = dft2_adjoint(&u).unwrap();
    assert!((h[[0, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let rest: f64 = h.iter().skip(1).map(|z| z.norm()).sum();
    assert!(rest < 1e-14);
}

#[test]
fn masks_are_deterministic_and_seed_dependent() {
    let g = DelayDopplerGrid::new(16, 16).unwrap();
    for s in 0..10u64 {
        let a = make_mask(&g, 50.0, s).unwrap();
        assert_eq!(a, make_mask(&g, 50.0, s).unwrap());
        let b = make_mask(&g, 50.0, s + 1000).unwrap();
        assert_ne!(a.kept(), b.kept());
    }
}

#[test]
fn apply_mask_matches_loop_and_is_idempotent() {
    let mut rng = SimRng::new(103);
    let g = DelayDopplerGrid::new(7, 13).unwrap();
    let m = make_mask(&g, 35.0, 9).unwrap();
    let u = random_matrix(&mut rng, 7, 13);
    let out = apply_mask(&m, &u).unwrap();
    for r in 0..7 {
        for c in 0..13 {
            let want = if m.kept()[[r, c]] { u[[r, c]] } else { Complex64::new(0.0, 0.0) };
            assert_eq!(out[[r, c]], want);
        }
    }
    assert_eq!(apply_mask(&m, &out).unwrap(), out);
}

#[test]
fn forward_model_composes_and_is_linear() {
    let mut rng = SimRng::new(104);
    let g = DelayDopplerGrid::new(6, 6).unwrap();
    let m = make_mask(&g, 50.0, 4).unwrap();
    let h1 = ChannelGrid::new(g, random_matrix(&mut rng, 6, 6)).unwrap();
    let h2 = ChannelGrid::new(g, random_matrix(&mut rng, 6, 6)).unwrap();

    let composed = apply_mask(&m, &dft2_forward(&h1).unwrap()).unwrap();
    assert!(max_abs_diff(&forward_model(&h1, Some(&m)).unwrap(), &composed) <= 1e-15);
    let full = uwa_est_core::SamplingMask::full(g);
    assert_eq!(forward_model(&h1, Some(&full)).unwrap(), dft2_forward(&h1).unwrap());
    assert!(forward_model(&ChannelGrid::zeros(g), Some(&m)).unwrap().iter().all(|z| z.norm() == 0.0));

    let (a, b) = (Complex64::new(0.7, -1.2), Complex64::new(-2.0, 0.4));
    let combo = ChannelGrid::new(g, h1.values().mapv(|z| z * a) + h2.values().mapv(|z| z * b)).unwrap();
    let lhs = forward_model(&combo, Some(&m)).unwrap();
    let rhs = forward_model(&h1, Some(&m)).unwrap().mapv(|z| z * a) + forward_model(&h2, Some(&m)).unwrap().mapv(|z| z * b);
    assert!(frob(&(&lhs - &rhs)) <= 1e-10 * frob(&rhs));
}

#[test]
fn forward_model_rejects_mismatched_mask() {
    let g = DelayDopplerGrid::new(4, 4).unwrap();
    let m = make_mask(&DelayDopplerGrid::new(4, 5).unwrap(), 50.0, 1).unwrap();
    assert!(forward_model(&ChannelGrid::zeros(g), Some(&m)).is_err());
}

#[test]
fn power_iteration_bounds_operator_norm() {
    let g = DelayDopplerGrid::new(8, 8).unwrap();
    for seed in 0..5 {
        let m = make_mask(&g, 30.0, seed).unwrap();
        let op = MeasurementOperator::new(g, Some(m)).unwrap();
        let est = estimate_norm_sq(&op, 100, seed + 50);
        assert!(est > 0.0 && est <= 1.0 + 1e-6, "{est}");
        // A selection of unitary rows has norm exactly one.
        assert!((est - op.norm_sq()).abs() <= 0.01);
    }
    let op = MeasurementOperator::new(g, None).unwrap();
    let est = estimate_norm_sq(&op, 20, 1);
    assert!((est - 1.0).abs() < 1e-10);
}
