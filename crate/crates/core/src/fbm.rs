//! Fractional Gaussian noise and fractional Brownian motion.
//!
//! Paths are synthesized exactly with the circulant embedding (Wood–Chan)
//! method: the fGn autocovariance is embedded in a circulant of size
//! `2(n-1)`, diagonalized with one FFT, and a complex Gaussian vector is
//! colored by the square-rooted spectrum and transformed back. A dense
//! Cholesky generator is kept alongside as a slow reference, together with
//! closed-form covariances of second-order increments and the eigenvalue
//! moments of their covariance matrix.

use std::cell::RefCell;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_hurst, HurstError, Result};
use crate::kernels::{central_difference, Stencil};
use crate::rng::GaussianStream;

/// Relative threshold below which negative circulant eigenvalues are clamped.
pub const EIGEN_CLAMP_TOLERANCE: f64 = 1e-10;

/// Largest size accepted by the dense reference generator.
pub const CHOLESKY_MAX_N: usize = 2048;

/// Largest grid accepted by [`eigen_moment_stats`].
pub const EIGEN_MAX_N: usize = 4096;

/// Unit-spacing, unit-variance fGn increments.
#[derive(Clone, Debug, PartialEq)]
pub struct FgnSample {
    pub hurst: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl FgnSample {
    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// Values observed on the uniform grid `t_j = j·T/m`, `j = 0..=m`.
///
/// The grid itself is never materialized; times are recomputed from `(T, m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePath {
    horizon: f64,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(horizon: f64, values: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(HurstError::domain(format!("horizon {horizon} must be positive")));
        }
        if values.len() < 2 {
            return Err(HurstError::domain("a path needs at least two grid points"));
        }
        Ok(Self { horizon, values })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of steps; there are `m + 1` values.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.horizon / self.m() as f64
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.m() as f64
    }

    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Keep every `factor`-th grid point. The result lives on `m / factor` steps.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.m() % factor != 0 {
            return Err(HurstError::domain(format!(
                "cannot coarsen {} steps by {factor}",
                self.m()
            )));
        }
        let values = self.values.iter().step_by(factor).copied().collect();
        Self::new(self.horizon, values)
    }

    /// `a·x + b` applied pointwise.
    pub fn affine_map(&self, a: f64, b: f64) -> Self {
        Self {
            horizon: self.horizon,
            values: self.values.iter().map(|x| a * x + b).collect(),
        }
    }
}

/// Autocovariance of unit fGn: `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(k: i64, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    Ok(acov(k as f64, hurst))
}

fn acov(k: f64, hurst: f64) -> f64 {
    0.5 * central_difference(Stencil::Second, 2.0 * hurst, k)
}

/// Covariance of second-order increments of `B^H` on the grid `i/n` at lag `l`.
///
/// `Cov(Δ²B_{i/n}, Δ²B_{j/n}) = −½ n^{−2H} Δ⁴|l|^{2H}` with `l = i − j`.
pub fn second_increment_lag_cov(lag: i64, n: usize, hurst: f64) -> f64 {
    -0.5 * (n as f64).powf(-2.0 * hurst) * central_difference(Stencil::Fourth, 2.0 * hurst, lag as f64)
}

/// `Cov(Δ²B^H_{i/n}, Δ²B^H_{j/n})` for `2 ≤ i, j ≤ n`.
pub fn second_increment_cov(i: usize, j: usize, n: usize, hurst: f64) -> Result<f64> {
    check_hurst(hurst)?;
    if i < 2 || j < 2 || i > n || j > n {
        return Err(HurstError::domain(format!(
            "indices ({i}, {j}) outside 2..={n}"
        )));
    }
    Ok(second_increment_lag_cov(i as i64 - j as i64, n, hurst))
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_fft(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

/// Eigenvalues of the minimal circulant embedding of the first `n` fGn lags.
fn circulant_eigenvalues(n: usize, hurst: f64) -> Result<Vec<f64>> {
    let size = 2 * (n - 1);
    let mut row: Vec<Complex<f64>> = Vec::with_capacity(size);
    for k in 0..n {
        row.push(Complex::new(acov(k as f64, hurst), 0.0));
    }
    for k in (1..n - 1).rev() {
        row.push(Complex::new(acov(k as f64, hurst), 0.0));
    }
    forward_fft(size).process(&mut row);

    let max = row.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let min = row.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    if min < -EIGEN_CLAMP_TOLERANCE * max {
        return Err(HurstError::Synthesis {
            hurst,
            n,
            min_eigenvalue: min,
        });
    }
    Ok(row.into_iter().map(|z| z.re.max(0.0)).collect())
}

/// `n` increments of unit fGn by circulant embedding.
///
/// The output is a deterministic function of `(n, hurst, seed)`.
pub fn generate_fgn(n: usize, hurst: f64, seed: u64) -> Result<FgnSample> {
    check_hurst(hurst)?;
    if n < 2 {
        return Err(HurstError::domain(format!("need n >= 2 increments, got {n}")));
    }
    let eigenvalues = circulant_eigenvalues(n, hurst)?;
    let size = eigenvalues.len();
    let mut gauss = GaussianStream::new(seed);
    let mut buf: Vec<Complex<f64>> = eigenvalues
        .iter()
        .map(|&lam| {
            let (re, im) = gauss.pair();
            Complex::new(re, im) * (lam / size as f64).sqrt()
        })
        .collect();
    forward_fft(size).process(&mut buf);
    Ok(FgnSample {
        hurst,
        spacing: 1.0,
        values: buf[..n].iter().map(|z| z.re).collect(),
    })
}

/// Exact O(n³) reference generator; factor once and sample many times.
pub struct CholeskyFgn {
    hurst: f64,
    lower: DMatrix<f64>,
}

impl CholeskyFgn {
    pub fn new(n: usize, hurst: f64) -> Result<Self> {
        check_hurst(hurst)?;
        if n == 0 || n > CHOLESKY_MAX_N {
            return Err(HurstError::domain(format!(
                "dense fGn reference needs 1 <= n <= {CHOLESKY_MAX_N}, got {n}"
            )));
        }
        let cov = DMatrix::from_fn(n, n, |i, j| acov(i as f64 - j as f64, hurst));
        let chol = cov
            .cholesky()
            .ok_or(HurstError::Factorization { hurst, n })?;
        Ok(Self {
            hurst,
            lower: chol.l(),
        })
    }

    pub fn sample(&self, seed: u64) -> FgnSample {
        let n = self.lower.nrows();
        let mut gauss = GaussianStream::new(seed);
        let mut z = vec![0.0; n];
        gauss.fill(&mut z);
        let x = &self.lower * DVector::from_vec(z);
        FgnSample {
            hurst: self.hurst,
            spacing: 1.0,
            values: x.iter().copied().collect(),
        }
    }
}

pub fn cholesky_fgn_oracle(n: usize, hurst: f64, seed: u64) -> Result<FgnSample> {
    Ok(CholeskyFgn::new(n, hurst)?.sample(seed))
}

/// Cumulative sum of fGn scaled to `B^H` on `[0, T]` with `m` steps.
pub fn fbm_path(m: usize, horizon: f64, hurst: f64, seed: u64) -> Result<SamplePath> {
    if m < 4 {
        return Err(HurstError::domain(format!("need m >= 4 steps, got {m}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(HurstError::domain(format!("horizon {horizon} must be positive")));
    }
    let noise = generate_fgn(m, hurst, seed)?;
    let scale = (horizon / m as f64).powf(hurst);
    let mut values = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    values.push(acc);
    for z in noise.values {
        acc += scale * z;
        values.push(acc);
    }
    SamplePath::new(horizon, values)
}

/// Spectral moments of the covariance matrix of `Δ²B^H(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenMoments {
    /// Σλ, the trace.
    pub sum: f64,
    /// Σλ², the squared Frobenius norm.
    pub sum_sq: f64,
    /// Largest eigenvalue.
    pub max: f64,
}

/// Σλ and Σλ² of the second-increment covariance, without an eigensolve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenSums {
    pub sum: f64,
    pub sum_sq: f64,
}

fn second_increment_lags(n: usize, hurst: f64) -> Result<Vec<f64>> {
    check_hurst(hurst)?;
    if !(3..=EIGEN_MAX_N).contains(&n) {
        return Err(HurstError::domain(format!(
            "eigen moments need 3 <= n <= {EIGEN_MAX_N}, got {n}"
        )));
    }
    Ok((0..n - 1)
        .map(|l| second_increment_lag_cov(l as i64, n, hurst))
        .collect())
}

fn sums_from_lags(lags: &[f64]) -> EigenSums {
    let dim = lags.len();
    let sum = dim as f64 * lags[0];
    let off: f64 = lags
        .iter()
        .enumerate()
        .skip(1)
        .map(|(l, c)| (dim - l) as f64 * c * c)
        .sum();
    EigenSums {
        sum,
        sum_sq: dim as f64 * lags[0] * lags[0] + 2.0 * off,
    }
}

/// `tr C` and `tr C²` for the `(n−1)×(n−1)` Toeplitz covariance of second increments.
pub fn eigen_sums(n: usize, hurst: f64) -> Result<EigenSums> {
    Ok(sums_from_lags(&second_increment_lags(n, hurst)?))
}

/// Eigenvalue moments of the `(n−1)×(n−1)` Toeplitz covariance of second increments.
///
/// The two sums come from the trace identities `Σλ = tr C` and `Σλ² = tr C²`
/// evaluated lag by lag; the largest eigenvalue from Lanczos iteration with
/// full reorthogonalization.
pub fn eigen_moment_stats(n: usize, hurst: f64) -> Result<EigenMoments> {
    let lags = second_increment_lags(n, hurst)?;
    let sums = sums_from_lags(&lags);
    let max = toeplitz_max_eigenvalue(&lags)?;
    Ok(EigenMoments {
        sum: sums.sum,
        sum_sq: sums.sum_sq,
        max,
    })
}

fn toeplitz_matvec(lags: &[f64], x: &[f64], y: &mut [f64]) {
    let dim = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, xj) in x.iter().enumerate() {
            acc += lags[i.abs_diff(j)] * xj;
        }
        *yi = acc;
    }
    debug_assert_eq!(dim, lags.len());
}

fn toeplitz_max_eigenvalue(lags: &[f64]) -> Result<f64> {
    let dim = lags.len();
    if dim == 1 {
        return Ok(lags[0]);
    }
    let max_steps = dim.min(400);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_steps);
    let mut alpha = Vec::with_capacity(max_steps);
    let mut beta: Vec<f64> = Vec::with_capacity(max_steps);

    let mut v: Vec<f64> = (0..dim)
        .map(|i| 1.0 + if i % 2 == 0 { 2.0 } else { -2.0 } + (i % 7) as f64 / 7.0)
        .collect();
    normalize(&mut v);
    let mut w = vec![0.0; dim];
    let mut last = f64::NAN;

    for step in 0..max_steps {
        toeplitz_matvec(lags, &v, &mut w);
        let a = dot(&w, &v);
        alpha.push(a);
        basis.push(v.clone());
        // Full reorthogonalization (twice is enough).
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = dot(&w, &w).sqrt();

        if step % 5 == 4 || b < 1e-14 * a.abs() || step + 1 == max_steps {
            let k = alpha.len();
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let ritz = t
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            if (ritz - last).abs() <= 1e-13 * ritz.abs() || b < 1e-14 * a.abs() {
                return Ok(ritz);
            }
            last = ritz;
        }
        if b < 1e-14 * a.abs() {
            break;
        }
        beta.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
    if last.is_finite() {
        Ok(last)
    } else {
        Err(HurstError::Numeric("Lanczos iteration did not converge".into()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    for x in v {
        *x /= norm;
    }
}
