mod common;

use num_complex::Complex64;
use uwa_est_core::channel::{add_awgn, generate_channel, sparse_entries, ClusterSpec, NoiseSpec};
use uwa_est_core::norms::norm_l2;
use uwa_est_core::operators::forward_model;
use uwa_est_core::{sigma_from_noise, CMatrix, DelayDopplerGrid};

#[test]
fn clusters_are_contiguous_blocks() {
    let g = DelayDopplerGrid::benchmark_default();
    for seed in 0..30 {
        let spec = ClusterSpec::default().with_seed(seed);
        let h = generate_channel(&g, &spec).unwrap();
        let nz = sparse_entries(&h);
        assert_eq!(nz.len(), spec.support_size(&g));
        assert!((norm_l2(h.values()) - 1.0).abs() <= 1e-12);
        // Every row segment of nonzeros has a length that is a multiple of
        // taps_per_cluster, and each nonzero row's support pairs with an
        // adjacent row (doppler spread 1).
        for r in 0..g.doppler_bins() {
            let mut run = 0;
            for c in 0..=g.delay_taps() {
                let on = c < g.delay_taps() && h.values()[[r, c]] != Complex64::new(0.0, 0.0);
                if on {
                    run += 1;
                } else {
                    assert_eq!(run % spec.taps_per_cluster, 0, "row {r}");
                    run = 0;
                }
            }
        }
    }
}

#[test]
fn decay_shapes_expected_tap_power() {
    // Per-instance normalization cancels in tap-power ratios, so the mean
    // log ratio of consecutive taps is ln(decay^2).
    let g = DelayDopplerGrid::new(1, 40).unwrap();
    let spec = ClusterSpec {
        n_clusters: 1,
        taps_per_cluster: 4,
        doppler_spread_bins: 0,
        amplitude_decay: 0.5,
        rng_seed: 0,
    };
    let n = 4000;
    let mut acc = 0.0;
    for seed in 0..n {
        let h = generate_channel(&g, &spec.with_seed(seed)).unwrap();
        let nz = sparse_entries(&h);
        acc += (nz[1].2.norm_sqr() / nz[0].2.norm_sqr()).ln();
    }
    let mean = acc / n as f64;
    assert!((mean - 0.25f64.ln()).abs() < 0.15, "{mean}");
}

#[test]
fn empirical_snr_concentrates() {
    let g = DelayDopplerGrid::benchmark_default();
    let h = generate_channel(&g, &ClusterSpec::default().with_seed(5)).unwrap();
    let clean = forward_model(&h, None).unwrap();
    let signal = clean.iter().map(|z| z.norm_sqr()).sum::<f64>();
    for seed in 0..500 {
        let (noisy, _) = add_awgn(&clean, &NoiseSpec { snr_db: 10.0, rng_seed: seed }, None).unwrap();
        let noise = (&noisy - &clean).iter().map(|z| z.norm_sqr()).sum::<f64>();
        let snr = 10.0 * (signal / noise).log10();
        assert!((snr - 10.0).abs() <= 0.5, "seed {seed}: {snr}");
    }
}

#[test]
fn noise_energy_matches_fidelity_radius() {
    let g = DelayDopplerGrid::benchmark_default();
    let clean = CMatrix::from_elem(g.shape(), Complex64::new(1.0, 0.0));
    // snr such that noise_std = 0.05: 10 log10(1 / 0.0025).
    let snr_db = 10.0 * (1.0 / 0.0025f64).log10();
    let mut total = 0.0;
    let mut std = 0.0;
    for seed in 0..200 {
        let (noisy, s) = add_awgn(&clean, &NoiseSpec { snr_db, rng_seed: seed }, None).unwrap();
        std = s;
        total += (&noisy - &clean).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    assert!((std - 0.05).abs() < 1e-12);
    let expected = sigma_from_noise(0.05, g.size(), 1.0).unwrap();
    let mean = total / 200.0;
    assert!((mean / expected - 1.0).abs() <= 0.05, "{mean} vs {expected}");
}

#[test]
fn noise_is_white() {
    let clean = CMatrix::from_elem((4, 4), Complex64::new(1.0, 0.0));
    let n = 500;
    let mut samples = Vec::with_capacity(n);
    let mut std = 0.0;
    for seed in 0..n as u64 {
        let (noisy, s) = add_awgn(&clean, &NoiseSpec { snr_db: 0.0, rng_seed: seed + 7 }, None).unwrap();
        std = s;
        let a = noisy[[0, 1]] - clean[[0, 1]];
        let b = noisy[[2, 3]] - clean[[2, 3]];
        samples.push([a.re, a.im, b.re, b.im]);
    }
    let mean: Vec<f64> = (0..4).map(|j| samples.iter().map(|s| s[j]).sum::<f64>() / n as f64).collect();
    let cov = |i: usize, j: usize| {
        samples.iter().map(|s| (s[i] - mean[i]) * (s[j] - mean[j])).sum::<f64>() / n as f64
    };
    // 0 dB on unit signal: each real component has variance 1/2.
    assert!((std - 1.0).abs() < 1e-12);
    for i in 0..4 {
        assert!((cov(i, i) - 0.5).abs() < 0.1);
    }
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                assert!(cov(i, j).abs() < 0.05, "cov({i},{j}) = {}", cov(i, j));
            }
        }
    }
}
