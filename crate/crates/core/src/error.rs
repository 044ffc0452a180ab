use thiserror::Error;

/// Everything that can go wrong while generating, simulating or estimating.
#[derive(Debug, Error)]
pub enum HurstError {
    /// An argument is outside the domain of the operation.
    #[error("{0}")]
    Domain(String),

    /// The circulant embedding produced a materially negative eigenvalue.
    #[error("circulant embedding is not nonnegative for H = {hurst}, n = {n} (min eigenvalue {min_eigenvalue:e})")]
    Synthesis {
        hurst: f64,
        n: usize,
        min_eigenvalue: f64,
    },

    /// Dense Cholesky factorization of an fGn covariance failed.
    #[error("fGn covariance matrix is not numerically positive definite (H = {hurst}, n = {n})")]
    Factorization { hurst: f64, n: usize },

    /// The SDE recursion left the finite floats.
    #[error("non-finite state {value} at step {step}")]
    Simulation { step: usize, value: f64 },

    /// A statistic cannot be inverted because it lies outside the image of phi.
    #[error("statistic {value:e} outside invertible range ({lo:e}, {hi:e})")]
    Range { value: f64, lo: f64, hi: f64 },

    /// |g(X)| fell below the admissible threshold for the known-g estimator.
    #[error("diffusion coefficient {value:e} at grid index {index} is too close to zero")]
    NearZeroDiffusion { index: usize, value: f64 },

    /// The path carries no usable quadratic variation.
    #[error("{0}")]
    DegeneratePath(String),

    /// Numerical guard tripped (series non-convergence, NaN statistics).
    #[error("{0}")]
    Numeric(String),

    /// Malformed input file or configuration.
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HurstError {
    /// Stable machine-readable code, printed by the CLI as `error: <code>: <message>`.
    pub fn code(&self) -> &'static str {
        match self {
            HurstError::Domain(_) => "domain",
            HurstError::Synthesis { .. } => "synthesis",
            HurstError::Factorization { .. } => "factorization",
            HurstError::Simulation { .. } => "simulation",
            HurstError::Range { .. } => "range",
            HurstError::NearZeroDiffusion { .. } => "near-zero-diffusion",
            HurstError::DegeneratePath(_) => "degenerate-path",
            HurstError::Numeric(_) => "numeric",
            HurstError::Input(_) => "input",
            HurstError::Io(_) => "io",
            HurstError::Json(_) => "json",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HurstError::Domain(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        HurstError::DegeneratePath(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HurstError>;

pub(crate) fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(HurstError::domain(format!("Hurst index {hurst} outside (0, 1)")))
    }
}

pub(crate) fn check_hurst_long_memory(hurst: f64) -> Result<()> {
    if hurst > 0.5 && hurst < 1.0 {
        Ok(())
    } else {
        Err(HurstError::domain(format!("Hurst index {hurst} outside (1/2, 1)")))
    }
}
