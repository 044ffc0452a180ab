//! Pathwise simulation of `X_t = ξ + ∫ f(X) ds + ∫ g(X) dB^H` on a uniform grid.
//!
//! For `H > 1/2` the stochastic integral is a Young integral, so the usual
//! Taylor argument gives the Milstein step
//!
//! ```text
//! X_{j+1} = X_j + f(X_j)Δt + g(X_j)ΔB_j + ½ g(X_j) g'(X_j) (ΔB_j)²
//! ```
//!
//! An Euler step (dropping the last term) is exposed for comparison only.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_hurst_long_memory, HurstError, Result};
use crate::fbm::{fbm_path, SamplePath};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An SDE given by drift `f`, diffusion `g`, its derivative `g'` and `X_0`.
#[derive(Clone)]
pub struct ProcessSpec {
    pub name: String,
    pub drift: ScalarFn,
    pub diffusion: ScalarFn,
    pub diffusion_deriv: ScalarFn,
    pub x0: f64,
}

impl fmt::Debug for ProcessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProcessSpec")
            .field("name", &self.name)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

impl ProcessSpec {
    pub fn new(
        name: impl Into<String>,
        drift: impl Fn(f64) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64) -> f64 + Send + Sync + 'static,
        diffusion_deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x0: f64,
    ) -> Self {
        Self {
            name: name.into(),
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            diffusion_deriv: Arc::new(diffusion_deriv),
            x0,
        }
    }

    /// Process I: `dX = sin X dt + cos X dB^H`, `X_0 = 1`.
    pub fn process_i() -> Self {
        Self::new("I", f64::sin, f64::cos, |x: f64| -x.sin(), 1.0)
    }

    /// Process II: `dX = sin X dt + (2 + cos X) dB^H`, `X_0 = 1`.
    pub fn process_ii() -> Self {
        Self::new("II", f64::sin, |x: f64| 2.0 + x.cos(), |x: f64| -x.sin(), 1.0)
    }

    /// `f(x) = a + b·x`, `g(x) = c + d·x`.
    pub fn affine(drift: (f64, f64), diffusion: (f64, f64), x0: f64) -> Self {
        let (a, b) = drift;
        let (c, d) = diffusion;
        Self::new(
            format!("affine({a},{b};{c},{d})"),
            move |x| a + b * x,
            move |x| c + d * x,
            move |_| d,
            x0,
        )
    }

    /// Look up a registered process by name (`"I"` or `"II"`).
    pub fn registry(name: &str) -> Result<Self> {
        match name {
            "I" => Ok(Self::process_i()),
            "II" => Ok(Self::process_ii()),
            other => Err(HurstError::domain(format!(
                "unknown process {other:?}; registered processes are I and II"
            ))),
        }
    }

    /// Whether `|g|` is bounded away from zero, as the known-g estimator requires.
    /// Only answered for the registry entries.
    pub fn diffusion_bounded_away_from_zero(&self) -> Option<bool> {
        match self.name.as_str() {
            "I" => Some(false),
            "II" => Some(true),
            _ => None,
        }
    }
}

/// Time-stepping rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Milstein,
    /// Reference only: Milstein without the `½gg'(ΔB)²` term.
    Euler,
}

/// A simulated solution together with the fBm path that drove it.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub path: SamplePath,
    pub driver: SamplePath,
}

/// Simulate `spec` on `m` steps of `[0, T]`, driven by `fbm_path(m, T, H, seed)`.
pub fn simulate(
    spec: &ProcessSpec,
    m: usize,
    horizon: f64,
    hurst: f64,
    seed: u64,
) -> Result<Simulation> {
    check_hurst_long_memory(hurst)?;
    let driver = fbm_path(m, horizon, hurst, seed)?;
    let path = simulate_with_driver(spec, &driver, m, horizon)?;
    Ok(Simulation { path, driver })
}

/// Same recursion as [`simulate`] with caller-supplied fBm values.
pub fn simulate_with_driver(
    spec: &ProcessSpec,
    driver: &SamplePath,
    m: usize,
    horizon: f64,
) -> Result<SamplePath> {
    simulate_with_driver_scheme(spec, driver, m, horizon, Scheme::Milstein)
}

pub fn simulate_with_driver_scheme(
    spec: &ProcessSpec,
    driver: &SamplePath,
    m: usize,
    horizon: f64,
    scheme: Scheme,
) -> Result<SamplePath> {
    if driver.m() != m || driver.horizon() != horizon {
        return Err(HurstError::domain(format!(
            "driver grid ({} steps on [0, {}]) does not match requested ({m} steps on [0, {horizon}])",
            driver.m(),
            driver.horizon()
        )));
    }
    let values = integrate_increments(spec, driver.step(), driver.increments(), scheme)?;
    SamplePath::new(horizon, values)
}

/// Run the recursion over an arbitrary stream of driver increments.
///
/// Returns `X_0, X_1, …`, one value more than the number of increments.
pub fn integrate_increments(
    spec: &ProcessSpec,
    dt: f64,
    increments: impl IntoIterator<Item = f64>,
    scheme: Scheme,
) -> Result<Vec<f64>> {
    let increments = increments.into_iter();
    let mut values = Vec::with_capacity(increments.size_hint().0 + 1);
    let mut x = spec.x0;
    if !x.is_finite() {
        return Err(HurstError::Simulation { step: 0, value: x });
    }
    values.push(x);
    for (j, db) in increments.enumerate() {
        let g = (spec.diffusion)(x);
        let mut next = x + (spec.drift)(x) * dt + g * db;
        if scheme == Scheme::Milstein {
            next += 0.5 * g * (spec.diffusion_deriv)(x) * db * db;
        }
        if !next.is_finite() {
            return Err(HurstError::Simulation {
                step: j + 1,
                value: next,
            });
        }
        x = next;
        values.push(x);
    }
    Ok(values)
}
