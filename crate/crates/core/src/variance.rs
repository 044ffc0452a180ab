//! Asymptotic variance constants of the normalized quadratic variations.
//!
//! With `Ṽ_n` the normalized sum of squared second increments of `B^H` on
//! `n` steps, `√n(Ṽ_n − 1, Ṽ_{2n} − 1)` is asymptotically normal with
//! covariance `[[σ², σ*²], [σ*², σ²/2]]`, and the log-ratio
//! `ln(Ṽ_{2n}/Ṽ_n)` has limiting variance `σ_H² = (3/2)σ² − 2σ*²`.
//!
//! All constants are series in the normalized fourth differences
//!
//! ```text
//! ρ_γ(l) = (|l−2|^{2−γ} − 4|l−1|^{2−γ} + 6|l|^{2−γ} − 4|l+1|^{2−γ} + |l+2|^{2−γ}) / ((γ−2)(γ−1)(γ+1))
//! ```
//!
//! with `γ = 2 − 2H`. Writing `r(l)` for the lag-`l` correlation of the
//! unit-spacing second increments, the constants are
//!
//! ```text
//! σ²  = 2 Σ_{l∈ℤ} r(l)²
//! σ₁² = 2 Σ_{l∈ℤ} r(l) r(l−2)
//! σ₂² = 2 Σ_{l∈ℤ} r(l) r(l−1)
//! σ*² = 2^{−2H} (3σ² + σ₁² + 4σ₂²)
//! ```
//!
//! Expanded around `l = 0, 1` this is
//! `σ² = 2 + c₂ + w Σ_{l≥2} ρ_γ(l)²`, `σ₁² = c₂/2 + w Σ_{l≥2} ρ_γ(l)ρ_γ(l−2)`,
//! `σ₂² = 2 s₂ + w Σ_{l≥2} ρ_γ(l)ρ_γ(l−1)` where `s₂ = 2 r(1)` (so `c₂ = s₂²`)
//! and `w = c₁/γ²`. Two details matter and are easy to get wrong: the
//! first-lag term of `σ₂²` carries the sign of `r(1)`, which is negative, and
//! `ρ_γ` as written above is missing the factor `γ` of the fourth derivative
//! of `x^{2−γ}`, which is why the weight is `c₁/γ²` rather than `c₁`. Both are
//! checked against a direct brute-force sum over `r(l)` in the tests.

use serde::{Deserialize, Serialize};

use crate::error::{check_hurst_long_memory, HurstError, Result};
use crate::fbm::eigen_sums;
use crate::kernels::{central_difference, Stencil};

/// Default truncation of the `ρ_γ` series.
pub const DEFAULT_TRUNCATION: usize = 100_000;
/// Smallest truncation accepted.
pub const MIN_TRUNCATION: usize = 1_000;
/// Truncation is doubled until the tail bound drops below this.
pub const TAIL_TOLERANCE: f64 = 1e-10;
const MAX_TRUNCATION: usize = 10_000_000;

/// `ρ_γ(l)`, the normalized fourth difference of `|l|^{2−γ}`.
pub fn rho(gamma: f64, l: i64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(HurstError::domain(format!("gamma {gamma} outside (0, 1)")));
    }
    Ok(rho_unchecked(gamma, l as f64))
}

fn rho_unchecked(gamma: f64, l: f64) -> f64 {
    central_difference(Stencil::Fourth, 2.0 - gamma, l)
        / ((gamma - 2.0) * (gamma - 1.0) * (gamma + 1.0))
}

/// `c₁(H) = (2H(2H−1)(2H−2)(2H−3) / (4 − 2^{2H}))²`.
pub fn c1(hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    (h2 * (h2 - 1.0) * (h2 - 2.0) * (h2 - 3.0) / (4.0 - 2f64.powf(h2))).powi(2)
}

/// Signed `(2^{2H+2} − 7 − 3^{2H}) / (4 − 2^{2H})`, twice the lag-1 correlation
/// of second increments. Negative for every `H ∈ (0, 1)`.
pub fn lag_one_term(hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    (2f64.powf(h2 + 2.0) - 7.0 - 3f64.powf(h2)) / (4.0 - 2f64.powf(h2))
}

/// `c₂(H)`, the square of [`lag_one_term`].
pub fn c2(hurst: f64) -> f64 {
    lag_one_term(hurst).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceConstants {
    pub hurst: f64,
    /// `σ²`: limit of `n·Var(Ṽ_n)`.
    pub sigma2: f64,
    /// `σ₁²`, the lag-2 cross series.
    pub sigma1_2: f64,
    /// `σ₂²`, the lag-1 cross series.
    pub sigma2_2: f64,
    /// `σ*²`: limit of `n·Cov(Ṽ_n, Ṽ_{2n})`.
    pub sigma_star2: f64,
    /// `σ_H²`: limiting variance of `√n·ln(Ṽ_{2n}/Ṽ_n)`.
    #[serde(rename = "sigma_H2")]
    pub sigma_h2: f64,
    #[serde(rename = "truncation_L")]
    pub truncation_l: usize,
    /// Upper bound on each series' omitted tail.
    pub tail_bound: f64,
}

impl VarianceConstants {
    /// Whether the 2×2 limit covariance is positive definite.
    pub fn covariance_positive_definite(&self) -> bool {
        self.sigma2 > 0.0 && self.sigma2 * self.sigma2 / 2.0 - self.sigma_star2.powi(2) > 0.0
    }
}

fn tail_bound(hurst: f64, truncation: usize) -> f64 {
    // |ρ_γ(l)| ≤ γ (l−2)^{−γ−2}, so every summand is at most
    // c₁ (l−4)^{−2γ−4}; compare with the integral from L−4.
    let gamma = 2.0 - 2.0 * hurst;
    let e = 2.0 * gamma + 3.0;
    c1(hurst) * ((truncation - 4) as f64).powf(-e) / e
}

/// Evaluate every constant at `hurst ∈ (1/2, 1)` with at least `truncation` series terms.
pub fn variance_constants(hurst: f64, truncation: usize) -> Result<VarianceConstants> {
    check_hurst_long_memory(hurst)?;
    if truncation < MIN_TRUNCATION {
        return Err(HurstError::domain(format!(
            "series truncation {truncation} below {MIN_TRUNCATION}"
        )));
    }
    let mut l_max = truncation;
    let mut tail = tail_bound(hurst, l_max);
    while tail >= TAIL_TOLERANCE {
        l_max *= 2;
        if l_max > MAX_TRUNCATION {
            return Err(HurstError::Numeric(format!(
                "variance series for H = {hurst} did not reach tail bound {TAIL_TOLERANCE:e}"
            )));
        }
        tail = tail_bound(hurst, l_max);
    }

    let gamma = 2.0 - 2.0 * hurst;
    let rhos: Vec<f64> = (0..=l_max).map(|l| rho_unchecked(gamma, l as f64)).collect();
    let (mut sq, mut lag1, mut lag2) = (0.0, 0.0, 0.0);
    // Smallest terms first.
    for l in (2..=l_max).rev() {
        sq += rhos[l] * rhos[l];
        lag1 += rhos[l] * rhos[l - 1];
        lag2 += rhos[l] * rhos[l - 2];
    }
    let weight = c1(hurst) / (gamma * gamma);
    let c2 = c2(hurst);

    let sigma2 = 2.0 + c2 + weight * sq;
    let sigma1_2 = c2 / 2.0 + weight * lag2;
    let sigma2_2 = 2.0 * lag_one_term(hurst) + weight * lag1;
    let sigma_star2 = 2f64.powf(-2.0 * hurst) * (3.0 * sigma2 + sigma1_2 + 4.0 * sigma2_2);
    let sigma_h2 = 1.5 * sigma2 - 2.0 * sigma_star2;

    Ok(VarianceConstants {
        hurst,
        sigma2,
        sigma1_2,
        sigma2_2,
        sigma_star2,
        sigma_h2,
        truncation_l: l_max,
        tail_bound: tail,
    })
}

/// Exact `n·Var(Ṽ_{n,1})` for finite `n`, from the eigenvalue moments.
///
/// Tends to `σ²` as `n → ∞` with an `O(1/n)` correction.
pub fn sigma_mc_oracle(hurst: f64, n: usize) -> Result<f64> {
    let sums = eigen_sums(n, hurst)?;
    let nf = n as f64;
    let norm = nf.powf(2.0 * hurst - 1.0) / (4.0 - 2f64.powf(2.0 * hurst));
    Ok(nf * norm * norm * 2.0 * sums.sum_sq)
}

/// Richardson extrapolation of [`sigma_mc_oracle`] over `n, 2n, 4n`.
///
/// Removes the `1/n` and `1/n²` terms of the finite-size correction.
pub fn sigma_mc_extrapolated(hurst: f64, n: usize) -> Result<f64> {
    let a = sigma_mc_oracle(hurst, n)?;
    let b = sigma_mc_oracle(hurst, 2 * n)?;
    let c = sigma_mc_oracle(hurst, 4 * n)?;
    let r1 = 2.0 * b - a;
    let r2 = 2.0 * c - b;
    Ok((4.0 * r2 - r1) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Correlation of unit-spacing second increments at lag `l`, directly.
    fn corr(h: f64, l: f64) -> f64 {
        let f = |x: f64| x.abs().powf(2.0 * h);
        let d = |l: f64| -0.5 * (f(l - 2.0) - 4.0 * f(l - 1.0) + 6.0 * f(l) - 4.0 * f(l + 1.0) + f(l + 2.0));
        d(l) / d(0.0)
    }

    /// σ² and σ*² summed over r(l) on a symmetric range, no series algebra.
    fn brute(h: f64, range: i64) -> (f64, f64) {
        let r: Vec<f64> = (-range..=range).map(|l| corr(h, l as f64)).collect();
        let s0: f64 = r.iter().map(|x| x * x).sum();
        let s1: f64 = r.windows(2).map(|w| w[0] * w[1]).sum();
        let s2: f64 = r.windows(3).map(|w| w[0] * w[2]).sum();
        let sigma2 = 2.0 * s0;
        let star = 2f64.powf(-2.0 * h) * (6.0 * s0 + 8.0 * s1 + 2.0 * s2);
        (sigma2, star)
    }

    #[test]
    fn rho_examples() {
        for &g in &[0.1, 0.37, 0.6, 0.9] {
            let at_zero = (2f64.powf(3.0 - g) - 8.0) / ((g - 2.0) * (g - 1.0) * (g + 1.0));
            assert!((rho(g, 0).unwrap() - at_zero).abs() < 1e-14);
            for l in [1, 3, 17, 250, 9000] {
                assert_eq!(rho(g, l).unwrap(), rho(g, -l).unwrap());
            }
        }
        assert!(rho(0.0, 1).is_err());
        assert!(rho(1.0, 1).is_err());
    }

    #[test]
    fn rho_decay_exponent() {
        let g = 0.6;
        let pts: Vec<(f64, f64)> = (0..=40)
            .map(|i| 10f64 * 1000f64.powf(i as f64 / 40.0))
            .map(|l| (l.round().ln(), rho(g, l.round() as i64).unwrap().abs().ln()))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + (g + 2.0)).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn series_matches_brute_force() {
        for &h in &[0.55, 0.65, 0.75, 0.85, 0.95] {
            let v = variance_constants(h, DEFAULT_TRUNCATION).unwrap();
            let (s2, star) = brute(h, 20_000);
            assert!(((v.sigma2 - s2) / s2).abs() < 1e-6, "H={h}: {} vs {s2}", v.sigma2);
            assert!(((v.sigma_star2 - star) / star).abs() < 1e-6, "H={h}: {} vs {star}", v.sigma_star2);
        }
    }

    #[test]
    fn identities_and_positivity() {
        for &h in &[0.501, 0.55, 0.65, 0.75, 0.85, 0.95, 0.99] {
            let v = variance_constants(h, DEFAULT_TRUNCATION).unwrap();
            assert!((v.sigma_h2 - (1.5 * v.sigma2 - 2.0 * v.sigma_star2)).abs() < 1e-12);
            assert!(v.sigma2 > 0.0 && v.sigma_h2 > 0.0);
            assert!(v.covariance_positive_definite());
            assert!(v.tail_bound < TAIL_TOLERANCE);
            assert!(c2(h) >= 0.0);
            assert!(lag_one_term(h) < 0.0);
        }
    }

    #[test]
    fn independent_increments_limit() {
        // At H = 1/2 the second increments are MA(1) with r(1) = −1/2, so
        // σ² = 2(1 + 2·¼) = 3.
        let v = variance_constants(0.5 + 1e-9, DEFAULT_TRUNCATION).unwrap();
        assert!((v.sigma2 - 3.0).abs() < 1e-6);
    }

    #[test]
    fn guards() {
        assert!(variance_constants(0.5, DEFAULT_TRUNCATION).is_err());
        assert!(variance_constants(1.0, DEFAULT_TRUNCATION).is_err());
        assert!(variance_constants(0.7, 999).is_err());
        assert!(sigma_mc_oracle(0.7, 5000).is_err());
    }

    #[test]
    fn oracle_converges() {
        let a = sigma_mc_oracle(0.6, 512).unwrap();
        let b = sigma_mc_oracle(0.6, 4096).unwrap();
        assert!(((a - b) / b).abs() < 0.05);
        for &h in &[0.501, 0.7] {
            let series = variance_constants(h, DEFAULT_TRUNCATION).unwrap().sigma2;
            let extrap = sigma_mc_extrapolated(h, 1024).unwrap();
            assert!(((series - extrap) / series).abs() < 0.02, "H={h}: {series} vs {extrap}");
        }
    }
}
