//! Hurst index estimators.
//!
//! * Known diffusion: with `g` known, `S_n = (1/n) Σ_{i=2}^n (Δ²X_{iT/n} / g(X_{(i−1)T/n}))²`
//!   behaves like `φ_{n,T}(H) = (T/n)^{2H}(4 − 2^{2H})`, so `Ĥ_n = φ_{n,T}^{-1}(S_n)`.
//!   Its CLT rate is `2√n ln(n/T)` with limiting variance `σ²`.
//! * Localized: `H_n(k) = 1/2 − ln(W⁽¹⁾_{n,k}/W⁽²⁾_{n,k}) / (2 ln 2)` at a
//!   selected window `k`. Its CLT rate is `2 ln 2 √k_n` with variance `σ_H²`.
//!
//! Standard errors plug the estimate itself into `σ(·)` and `σ_H(·)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{HurstError, Result};
use crate::fbm::SamplePath;
use crate::quadvar::{select_index, window_stats, GridDesign, Selector, WindowStats};
use crate::variance::{variance_constants, DEFAULT_TRUNCATION};

/// Inversion of `φ_{n,T}` is restricted to `[ε₀, 1 − ε₀]`.
pub const PHI_EPSILON: f64 = 1e-6;
/// Smallest `|g(x)|` accepted by the known-diffusion estimator.
pub const MIN_DIFFUSION: f64 = 1e-12;

const BISECTION_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorId {
    #[serde(rename = "hn_1", alias = "h1")]
    Hn1,
    #[serde(rename = "hn_2", alias = "h2")]
    Hn2,
    #[serde(rename = "hn_3", alias = "h3")]
    Hn3,
    #[serde(rename = "hn_4", alias = "h4")]
    Hn4,
    #[serde(rename = "known_g")]
    KnownG,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 5] = [
        EstimatorId::Hn1,
        EstimatorId::Hn2,
        EstimatorId::Hn3,
        EstimatorId::Hn4,
        EstimatorId::KnownG,
    ];

    pub fn selector(self) -> Option<Selector> {
        match self {
            EstimatorId::Hn1 => Some(Selector::MaxW1),
            EstimatorId::Hn2 => Some(Selector::NearMeanW1),
            EstimatorId::Hn3 => Some(Selector::NearMeanBoth),
            EstimatorId::Hn4 => Some(Selector::CrossScaled),
            EstimatorId::KnownG => None,
        }
    }

    pub fn from_selector(selector: Selector) -> Self {
        match selector {
            Selector::MaxW1 => EstimatorId::Hn1,
            Selector::NearMeanW1 => EstimatorId::Hn2,
            Selector::NearMeanBoth => EstimatorId::Hn3,
            Selector::CrossScaled => EstimatorId::Hn4,
        }
    }

    /// Short label used in tables and on the command line.
    pub fn label(self) -> &'static str {
        match self {
            EstimatorId::Hn1 => "h1",
            EstimatorId::Hn2 => "h2",
            EstimatorId::Hn3 => "h3",
            EstimatorId::Hn4 => "h4",
            EstimatorId::KnownG => "known_g",
        }
    }

    /// Display factor for mean squared errors: `10³` for `h1..h4`, `10⁵` for `known_g`.
    pub fn mse_scale(self) -> f64 {
        match self {
            EstimatorId::KnownG => 1e5,
            _ => 1e3,
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EstimatorId {
    type Err = HurstError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h1" | "hn_1" => Ok(EstimatorId::Hn1),
            "h2" | "hn_2" => Ok(EstimatorId::Hn2),
            "h3" | "hn_3" => Ok(EstimatorId::Hn3),
            "h4" | "hn_4" => Ok(EstimatorId::Hn4),
            "known_g" => Ok(EstimatorId::KnownG),
            other => Err(HurstError::Input(format!(
                "unknown estimator {other:?}; expected known_g or h1..h4"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HurstEstimate {
    pub h_hat: f64,
    pub estimator_id: EstimatorId,
    /// `n` for `known_g`, `k_n` for the localized estimators.
    pub effective_n: usize,
    pub std_error: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub level: Option<f64>,
    /// 1-based window picked by the selector.
    pub selected_index: Option<usize>,
}

impl HurstEstimate {
    fn with_interval(mut self, std_error: Option<f64>, level: Option<f64>) -> Result<Self> {
        self.std_error = std_error;
        if let (Some(se), Some(level)) = (std_error, level) {
            let z = normal_quantile(level)?;
            self.ci = Some((self.h_hat - z * se, self.h_hat + z * se));
            self.level = Some(level);
        }
        Ok(self)
    }
}

/// Two-sided quantile `z` with `P(|Z| ≤ z) = level`.
pub fn normal_quantile(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(HurstError::domain(format!("confidence level {level} outside (0, 1)")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

fn check_grid(n: usize, horizon: f64) -> Result<()> {
    if !(n as f64 > horizon) {
        return Err(HurstError::domain(format!(
            "phi needs n > T, got n = {n}, T = {horizon}"
        )));
    }
    Ok(())
}

/// `φ_{n,T}(x) = (T/n)^{2x}(4 − 2^{2x})`, strictly decreasing in `x` for `n > T`.
pub fn phi(n: usize, horizon: f64, x: f64) -> Result<f64> {
    check_grid(n, horizon)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(HurstError::domain(format!("phi argument {x} outside (0, 1)")));
    }
    Ok(phi_raw(n, horizon, x))
}

fn phi_raw(n: usize, horizon: f64, x: f64) -> f64 {
    (horizon / n as f64).powf(2.0 * x) * (4.0 - 2f64.powf(2.0 * x))
}

/// Solve `φ_{n,T}(x) = y` by bisection on `[ε₀, 1 − ε₀]`.
pub fn phi_inverse(n: usize, horizon: f64, y: f64) -> Result<f64> {
    check_grid(n, horizon)?;
    let (mut lo, mut hi) = (PHI_EPSILON, 1.0 - PHI_EPSILON);
    let (y_hi, y_lo) = (phi_raw(n, horizon, lo), phi_raw(n, horizon, hi));
    if !(y >= y_lo && y <= y_hi) {
        return Err(HurstError::Range {
            value: y,
            lo: y_lo,
            hi: y_hi,
        });
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        let f = phi_raw(n, horizon, mid);
        if (f - y).abs() <= BISECTION_TOL * y {
            return Ok(mid);
        }
        // Decreasing: a value above the target means the root is to the right.
        if f > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `S_n = (1/n) Σ_{i=2}^n (Δ²X_i / g(X_{i−1}))²` over all `n = path.m()` steps.
pub fn known_g_statistic(path: &SamplePath, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    let n = path.m();
    if n < 3 {
        return Err(HurstError::domain(format!("need at least 3 steps, got {n}")));
    }
    let x = path.values();
    let mut sum = 0.0;
    for i in 2..=n {
        let gi = g(x[i - 1]);
        if !(gi.abs() >= MIN_DIFFUSION) {
            return Err(HurstError::NearZeroDiffusion {
                index: i - 1,
                value: gi,
            });
        }
        let d = (x[i] - 2.0 * x[i - 1] + x[i - 2]) / gi;
        sum += d * d;
    }
    Ok(sum / n as f64)
}

/// `Ĥ_n = φ_{n,T}^{-1}(S_n)` without standard errors.
pub fn known_g_point(path: &SamplePath, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    check_grid(path.m(), path.horizon())?;
    phi_inverse(path.m(), path.horizon(), known_g_statistic(path, g)?)
}

/// Known-diffusion estimator with a plug-in CLT interval at `level`.
///
/// The standard error is `σ(Ĥ)/(2√n ln(n/T))`; it is omitted when `Ĥ` falls
/// outside `(1/2, 1)`, where `σ` is not defined.
pub fn estimate_known_g(
    path: &SamplePath,
    g: &dyn Fn(f64) -> f64,
    level: Option<f64>,
) -> Result<HurstEstimate> {
    let h_hat = known_g_point(path, g)?;
    let n = path.m() as f64;
    let std_error = plug_in_constants(h_hat)?
        .map(|c| c.sigma2.sqrt() / (2.0 * n.sqrt() * (n / path.horizon()).ln()));
    HurstEstimate {
        h_hat,
        estimator_id: EstimatorId::KnownG,
        effective_n: path.m(),
        std_error: None,
        ci: None,
        level: None,
        selected_index: None,
    }
    .with_interval(std_error, level)
}

/// `H_n(k) = 1/2 − ln(W⁽¹⁾_{n,k}/W⁽²⁾_{n,k})/(2 ln 2)` for 1-based `k`. Not clamped.
pub fn estimate_hn(stats: &WindowStats, k: usize) -> Result<f64> {
    let (w1, w2) = stats.at(k).ok_or_else(|| {
        HurstError::domain(format!("window {k} outside 1..={}", stats.w1.len()))
    })?;
    if !(w1 > 0.0 && w2 > 0.0) {
        return Err(HurstError::degenerate(format!(
            "window {k} has W1 = {w1}, W2 = {w2}; both must be positive"
        )));
    }
    Ok(0.5 - (w1 / w2).ln() / (2.0 * std::f64::consts::LN_2))
}

/// Localized estimate at the window chosen by `selector`, from precomputed windows.
pub fn localized_from_stats(
    stats: &WindowStats,
    selector: Selector,
    level: Option<f64>,
) -> Result<HurstEstimate> {
    let k = select_index(stats, selector)?;
    let h_hat = estimate_hn(stats, k)?;
    let std_error = plug_in_constants(h_hat)?.map(|c| {
        c.sigma_h2.sqrt() / (2.0 * std::f64::consts::LN_2 * (stats.k_n as f64).sqrt())
    });
    HurstEstimate {
        h_hat,
        estimator_id: EstimatorId::from_selector(selector),
        effective_n: stats.k_n,
        std_error: None,
        ci: None,
        level: None,
        selected_index: Some(k),
    }
    .with_interval(std_error, level)
}

/// Window statistics, selection and `H_n(k)` in one call.
pub fn estimate_localized(
    path: &SamplePath,
    design: &GridDesign,
    selector: Selector,
    level: Option<f64>,
) -> Result<HurstEstimate> {
    localized_from_stats(&window_stats(path, design)?, selector, level)
}

fn plug_in_constants(h_hat: f64) -> Result<Option<crate::variance::VarianceConstants>> {
    if h_hat > 0.5 && h_hat < 1.0 {
        variance_constants(h_hat, DEFAULT_TRUNCATION).map(Some)
    } else {
        Ok(None)
    }
}
