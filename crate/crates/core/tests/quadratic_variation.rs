//! Window sums: locality, affine behaviour and the second-difference identities.

use hurstqv::fbm::{fbm_path, SamplePath};
use hurstqv::quadvar::{second_diff, select_index, window_stats, GridDesign, Selector};
use proptest::prelude::*;

fn path_from(values: Vec<f64>) -> SamplePath {
    SamplePath::new(1.0, values).unwrap()
}

/// Straight from the definition, one window at a time.
fn naive_windows(x: &[f64], n: usize, k_n: usize, k: usize) -> (f64, f64) {
    let c = (k * k_n) as i64;
    let kn = k_n as i64;
    let at = |i: i64| x[i as usize];
    let mut w1 = 0.0;
    for j in (-kn + 2)..=kn {
        let i = c + j;
        w1 += (at(i) - 2.0 * at(i - 1) + at(i - 2)).powi(2);
    }
    let mut w2 = 0.0;
    let mut j = -kn + 4;
    while j <= kn {
        let i = c + j;
        w2 += (at(i) - 2.0 * at(i - 2) + at(i - 4)).powi(2);
        j += 2;
    }
    let _ = n;
    (w1, w2)
}

#[test]
fn windows_match_definition() {
    let design = GridDesign::square(12).unwrap();
    let path = fbm_path(design.m_n(), 1.0, 0.7, 3).unwrap();
    let stats = window_stats(&path, &design).unwrap();
    for k in 1..12 {
        let (w1, w2) = naive_windows(path.values(), 12, 12, k);
        let (a, b) = stats.at(k).unwrap();
        assert!((a - w1).abs() < 1e-15 * w1.max(1e-300) * 10.0);
        assert!((b - w2).abs() < 1e-15 * w2.max(1e-300) * 10.0);
    }
}

#[test]
fn impulse_response_of_second_difference() {
    let mut x = vec![0.0; 11];
    x[5] = 1.0;
    assert_eq!(
        second_diff(&x, 1).unwrap(),
        vec![0.0, 0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0, 0.0]
    );
    assert_eq!(
        second_diff(&x, 2).unwrap(),
        vec![0.0, 1.0, 0.0, -2.0, 0.0, 1.0, 0.0]
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_functions_have_zero_second_differences(a in -1e3f64..1e3, b in -1e3f64..1e3, lag in 1usize..6) {
        let x: Vec<f64> = (0..40).map(|i| a + b * i as f64).collect();
        for d in second_diff(&x, lag).unwrap() {
            prop_assert!(d.abs() <= 1e-12 * (a.abs() + 40.0 * b.abs()));
        }
    }

    #[test]
    fn windows_scale_quadratically_and_ignore_affine_trends(
        seed: u64, c in 0.1f64..10.0, d in -5.0f64..5.0, sign in prop::bool::ANY,
    ) {
        let c = if sign { c } else { -c };
        let design = GridDesign::square(10).unwrap();
        let path = fbm_path(design.m_n(), 1.0, 0.7, seed).unwrap();
        let base = window_stats(&path, &design).unwrap();
        let mapped = window_stats(&path.affine_map(c, d), &design).unwrap();
        for k in 1..10 {
            let (a1, a2) = base.at(k).unwrap();
            let (b1, b2) = mapped.at(k).unwrap();
            prop_assert!((b1 - c * c * a1).abs() <= 1e-9 * c * c * a1);
            prop_assert!((b2 - c * c * a2).abs() <= 1e-9 * c * c * a2);
        }
        for sel in Selector::ALL {
            prop_assert_eq!(select_index(&base, sel).unwrap(), select_index(&mapped, sel).unwrap());
        }
    }

    #[test]
    fn windows_only_read_their_own_points(seed: u64, k in 1usize..9, bump in 0.5f64..5.0) {
        let (n, k_n) = (9usize, 9usize);
        let design = GridDesign::square(n).unwrap();
        let path = fbm_path(design.m_n(), 1.0, 0.6, seed).unwrap();
        let base = window_stats(&path, &design).unwrap();
        // Perturb every point outside k·k_n ± k_n.
        let lo = k * k_n - k_n;
        let hi = k * k_n + k_n;
        let values: Vec<f64> = path
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| if i < lo || i > hi { v + bump * (i as f64).sin() } else { *v })
            .collect();
        let moved = window_stats(&path_from(values), &design).unwrap();
        prop_assert_eq!(base.at(k), moved.at(k));
    }
}
