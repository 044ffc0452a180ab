//! Circulant-embedding output checked against the dense reference and the
//! closed-form covariances.

use hurstqv::fbm::{
    cholesky_fgn_oracle, eigen_moment_stats, fbm_path, fgn_autocovariance, generate_fgn,
    second_increment_cov, CholeskyFgn,
};
use hurstqv::quadvar::v_tilde;
use proptest::prelude::*;

/// Empirical lag covariances over `reps` independent samples of length `n`.
fn empirical_acov(sample: impl Fn(u64) -> Vec<f64>, reps: u64, lags: usize) -> Vec<f64> {
    let mut acc = vec![0.0; lags];
    for seed in 0..reps {
        let x = sample(seed);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += x[0] * x[k];
        }
    }
    acc.iter().map(|a| a / reps as f64).collect()
}

#[test]
fn circulant_and_cholesky_share_the_fgn_covariance() {
    let (n, reps) = (32, 20_000);
    for &h in &[0.3, 0.7, 0.9] {
        let chol = CholeskyFgn::new(n, h).unwrap();
        let circ = empirical_acov(|s| generate_fgn(n, h, s).unwrap().values, reps, 6);
        let dense = empirical_acov(|s| chol.sample(s + 1_000_000).values, reps, 6);
        for k in 0..6 {
            let exact = fgn_autocovariance(k as i64, h).unwrap();
            // Var(x0·xk) ≤ 2 for unit variances; allow 5 standard errors.
            let tol = 5.0 * (2.0 / reps as f64).sqrt();
            assert!((circ[k] - exact).abs() < tol, "circulant H={h} k={k}: {} vs {exact}", circ[k]);
            assert!((dense[k] - exact).abs() < tol, "cholesky H={h} k={k}: {} vs {exact}", dense[k]);
        }
    }
}

#[test]
fn cholesky_oracle_is_reproducible() {
    let a = cholesky_fgn_oracle(50, 0.6, 4).unwrap();
    let b = cholesky_fgn_oracle(50, 0.6, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn large_grids_synthesize() {
    // Mean of squares; its spread grows like n^{4H-4} for H > 3/4, so stay below.
    for &h in &[0.05, 0.5, 0.7] {
        let s = generate_fgn(1 << 16, h, 1).unwrap();
        let var = s.values.iter().map(|v| v * v).sum::<f64>() / s.n() as f64;
        assert!((var - 1.0).abs() < 0.05, "H = {h}: variance {var}");
    }
    assert!(generate_fgn(1 << 16, 0.95, 1).unwrap().values.iter().all(|v| v.is_finite()));
}

#[test]
fn v_tilde_has_mean_n_minus_one_over_n() {
    let (m, reps) = (200, 400);
    for &h in &[0.6, 0.8] {
        let mean: f64 = (0..reps)
            .map(|s| v_tilde(&fbm_path(m, 1.0, h, s).unwrap(), h).unwrap())
            .sum::<f64>()
            / reps as f64;
        let expected = (m as f64 - 1.0) / m as f64;
        // sd of a single V~ is about sqrt(3/m).
        assert!((mean - expected).abs() < 5.0 * (3.0 / m as f64 / reps as f64).sqrt());
    }
}

#[test]
fn second_increment_variance_matches_eigen_trace() {
    let (n, h) = (300, 0.7);
    let diag: f64 = (2..=n).map(|i| second_increment_cov(i, i, n, h).unwrap()).sum();
    let stats = eigen_moment_stats(n, h).unwrap();
    assert!((diag - stats.sum).abs() < 1e-12 * stats.sum);
    assert!(stats.max > 0.0 && stats.max <= stats.sum);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn path_starts_at_zero_and_is_deterministic(m in 4usize..300, h in 0.05f64..0.95, seed: u64) {
        let a = fbm_path(m, 1.0, h, seed).unwrap();
        let b = fbm_path(m, 1.0, h, seed).unwrap();
        prop_assert_eq!(a.values()[0], 0.0);
        prop_assert_eq!(a.m(), m);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn horizon_scales_by_t_to_the_h(m in 4usize..200, h in 0.05f64..0.95, t in 0.1f64..10.0, seed: u64) {
        let unit = fbm_path(m, 1.0, h, seed).unwrap();
        let scaled = fbm_path(m, t, h, seed).unwrap();
        let f = t.powf(h);
        for (u, s) in unit.values().iter().zip(scaled.values()) {
            prop_assert!((u * f - s).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn autocovariance_is_even(k in -10_000i64..10_000, h in 0.01f64..0.99) {
        prop_assert_eq!(fgn_autocovariance(k, h).unwrap(), fgn_autocovariance(-k, h).unwrap());
    }
}
