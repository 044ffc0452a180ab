//! Second-order quadratic variations.
//!
//! The localization estimators observe `X` on the fine grid `t^m_j = jT/m_n`
//! with `m_n = n·k_n`. Around each interior coarse point `kT/n`
//! (`k = 1..n−1`) two windowed sums are formed:
//!
//! * `W⁽¹⁾_{n,k}`: squared lag-1 second differences ending at fine indices
//!   `k·k_n + j`, `j = −k_n+2..=k_n` (`2k_n − 1` terms);
//! * `W⁽²⁾_{n,k}`: squared lag-2 second differences ending at
//!   `k·k_n + j`, `j = −k_n+4, −k_n+6, …, k_n` (`k_n − 1` terms).
//!
//! Both windows read exactly the fine points `k·k_n − k_n ..= k·k_n + k_n`.

use serde::{Deserialize, Serialize};

use crate::error::{check_hurst, HurstError, Result};
use crate::fbm::SamplePath;

/// How the slowly varying factor `φ(n)` in `k_n` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMode {
    /// `φ(n) = 1`.
    ConstOne,
    /// `φ(n) = ln^α n`.
    LogPower(f64),
}

impl PhiMode {
    fn eval(self, n: usize) -> f64 {
        match self {
            PhiMode::ConstOne => 1.0,
            PhiMode::LogPower(alpha) => (n as f64).ln().powf(alpha),
        }
    }
}

impl Default for PhiMode {
    fn default() -> Self {
        PhiMode::ConstOne
    }
}

/// Serializable parameters of a [`GridDesign`]; `n` is supplied separately.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub phi_mode: PhiMode,
}

/// Coarse count `n`, window half-width `k_n` and fine grid size `m_n = n·k_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridDesign {
    n: usize,
    k_n: usize,
    params: GridParams,
}

impl GridDesign {
    /// `k_n = ⌊n^{2β} φ(n)⌋` if `β` is given, otherwise `⌊n φ(n)⌋`.
    pub fn new(n: usize, params: GridParams) -> Result<Self> {
        if n < 2 {
            return Err(HurstError::domain(format!("need n >= 2 windows, got {n}")));
        }
        let power = match params.beta {
            Some(beta) if (0.5..1.0).contains(&beta) => 2.0 * beta,
            Some(beta) => {
                return Err(HurstError::domain(format!("beta {beta} outside [1/2, 1)")))
            }
            None => 1.0,
        };
        if let PhiMode::LogPower(alpha) = params.phi_mode {
            if !(alpha > 0.0) {
                return Err(HurstError::domain(format!("log power {alpha} must be positive")));
            }
        }
        let k_n = ((n as f64).powf(power) * params.phi_mode.eval(n)).floor() as usize;
        if k_n < 5 {
            return Err(HurstError::domain(format!(
                "window half-width k_n = {k_n} is below 5 (n = {n})"
            )));
        }
        Ok(Self { n, k_n, params })
    }

    /// The default design `k_n = n`, `m_n = n²`.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, GridParams::default())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_n(&self) -> usize {
        self.k_n
    }

    pub fn m_n(&self) -> usize {
        self.n * self.k_n
    }

    pub fn params(&self) -> GridParams {
        self.params
    }

    /// Fine-grid indices at which the lag-1 differences of window `k` end.
    pub fn w1_indices(&self, k: usize) -> impl Iterator<Item = usize> {
        let c = k * self.k_n;
        (c + 2 - self.k_n)..=(c + self.k_n)
    }

    /// Fine-grid indices at which the lag-2 differences of window `k` end.
    pub fn w2_indices(&self, k: usize) -> impl Iterator<Item = usize> {
        let c = k * self.k_n;
        ((c + 4 - self.k_n)..=(c + self.k_n)).step_by(2)
    }
}

/// `x[i] − 2x[i−lag] + x[i−2lag]` for `i = 2·lag..len`.
pub fn second_diff(values: &[f64], lag: usize) -> Result<Vec<f64>> {
    if lag == 0 {
        return Err(HurstError::domain("lag must be positive"));
    }
    if values.len() < 2 * lag + 1 {
        return Err(HurstError::domain(format!(
            "{} values are too few for lag-{lag} second differences",
            values.len()
        )));
    }
    Ok((2 * lag..values.len())
        .map(|i| values[i] - 2.0 * values[i - lag] + values[i - 2 * lag])
        .collect())
}

/// `Ṽ_{n,T} = n^{2H−1}/(4 − 2^{2H}) · Σ_{i=2}^n (T^{−H} Δ²X_{iT/n})²` with `n = path.m()`.
///
/// For an exact fBm path its mean is `(n − 1)/n`.
pub fn v_tilde(path: &SamplePath, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    let n = path.m();
    if n < 3 {
        return Err(HurstError::domain(format!("need at least 3 steps, got {n}")));
    }
    let scale = path.horizon().powf(-hurst);
    let sum: f64 = second_diff(path.values(), 1)?
        .iter()
        .map(|d| (scale * d).powi(2))
        .sum();
    let nf = n as f64;
    Ok(nf.powf(2.0 * hurst - 1.0) / (4.0 - 2f64.powf(2.0 * hurst)) * sum)
}

/// Windowed sums `W⁽¹⁾_{n,k}`, `W⁽²⁾_{n,k}` for `k = 1..n−1` and their means.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowStats {
    pub n: usize,
    pub k_n: usize,
    /// `w1[k-1]` is `W⁽¹⁾_{n,k}`.
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w1_mean: f64,
    pub w2_mean: f64,
}

impl WindowStats {
    /// Build from raw arrays, computing the means.
    pub fn from_arrays(k_n: usize, w1: Vec<f64>, w2: Vec<f64>) -> Result<Self> {
        if w1.is_empty() || w1.len() != w2.len() {
            return Err(HurstError::domain("window arrays must be non-empty and equally long"));
        }
        let len = w1.len() as f64;
        let w1_mean = w1.iter().sum::<f64>() / len;
        let w2_mean = w2.iter().sum::<f64>() / len;
        Ok(Self {
            n: w1.len() + 1,
            k_n,
            w1,
            w2,
            w1_mean,
            w2_mean,
        })
    }

    /// `(W⁽¹⁾_{n,k}, W⁽²⁾_{n,k})` for 1-based `k`.
    pub fn at(&self, k: usize) -> Option<(f64, f64)> {
        if k == 0 {
            return None;
        }
        Some((*self.w1.get(k - 1)?, *self.w2.get(k - 1)?))
    }
}

pub fn window_stats(path: &SamplePath, design: &GridDesign) -> Result<WindowStats> {
    if path.m() != design.m_n() {
        return Err(HurstError::domain(format!(
            "path has {} steps but the design needs m_n = {}",
            path.m(),
            design.m_n()
        )));
    }
    let x = path.values();
    let d1 = |i: usize| x[i] - 2.0 * x[i - 1] + x[i - 2];
    let d2 = |i: usize| x[i] - 2.0 * x[i - 2] + x[i - 4];
    let mut w1 = Vec::with_capacity(design.n() - 1);
    let mut w2 = Vec::with_capacity(design.n() - 1);
    for k in 1..design.n() {
        w1.push(design.w1_indices(k).map(|i| d1(i).powi(2)).sum());
        w2.push(design.w2_indices(k).map(|i| d2(i).powi(2)).sum());
    }
    WindowStats::from_arrays(design.k_n(), w1, w2)
}

/// Data-driven choice of the window center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Selector {
    /// `argmax_k W⁽¹⁾`.
    MaxW1 = 1,
    /// `argmin_k |W⁽¹⁾/W̄⁽¹⁾ − 1|`.
    NearMeanW1 = 2,
    /// `argmin_k |W⁽¹⁾/W̄⁽¹⁾ − 1| + |W⁽²⁾/W̄⁽²⁾ − 1|`.
    NearMeanBoth = 3,
    /// `argmin_k |W̄⁽¹⁾ − W⁽¹⁾|/W̄⁽²⁾ + |W̄⁽²⁾ − W⁽²⁾|/W̄⁽¹⁾`.
    CrossScaled = 4,
}

impl Selector {
    pub const ALL: [Selector; 4] = [
        Selector::MaxW1,
        Selector::NearMeanW1,
        Selector::NearMeanBoth,
        Selector::CrossScaled,
    ];

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Selector::MaxW1),
            2 => Ok(Selector::NearMeanW1),
            3 => Ok(Selector::NearMeanBoth),
            4 => Ok(Selector::CrossScaled),
            _ => Err(HurstError::domain(format!("selector {i} is not one of 1..4"))),
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

/// 1-based window index picked by `selector`; ties go to the smallest `k`.
pub fn select_index(stats: &WindowStats, selector: Selector) -> Result<usize> {
    if stats.w1.is_empty() || stats.w1.len() != stats.w2.len() {
        return Err(HurstError::domain("window arrays must be non-empty and equally long"));
    }
    if stats.w1.iter().chain(&stats.w2).any(|v| v.is_nan()) {
        return Err(HurstError::Numeric("NaN in window statistics".into()));
    }
    let (a, b) = (stats.w1_mean, stats.w2_mean);
    let needs_means = selector != Selector::MaxW1;
    if needs_means && (a == 0.0 || b == 0.0) {
        return Err(HurstError::degenerate("window means vanish; the path has no second-order variation"));
    }
    let score = |w1: f64, w2: f64| -> f64 {
        match selector {
            Selector::MaxW1 => -w1,
            Selector::NearMeanW1 => (w1 / a - 1.0).abs(),
            Selector::NearMeanBoth => (w1 / a - 1.0).abs() + (w2 / b - 1.0).abs(),
            Selector::CrossScaled => (a - w1).abs() / b + (b - w2).abs() / a,
        }
    };
    let mut best = 0;
    let mut best_score = score(stats.w1[0], stats.w2[0]);
    for (i, (&w1, &w2)) in stats.w1.iter().zip(&stats.w2).enumerate().skip(1) {
        let s = score(w1, w2);
        if s < best_score {
            best = i;
            best_score = s;
        }
    }
    if best_score.is_nan() {
        return Err(HurstError::Numeric("NaN selector score".into()));
    }
    Ok(best + 1)
}
