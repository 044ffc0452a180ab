//! Hurst index estimation for SDEs driven by fractional Brownian motion.
//!
//! The crate covers the whole pipeline of a simulation study:
//!
//! * [`fbm`]: exact fGn/fBm synthesis by circulant embedding, a dense
//!   Cholesky reference, and closed-form covariances of second increments;
//! * [`sde`]: Milstein simulation of `dX = f(X)dt + g(X)dB^H`;
//! * [`quadvar`]: second-order quadratic variations and the localization
//!   windows `W⁽¹⁾`, `W⁽²⁾` with their selectors;
//! * [`estimate`]: the known-diffusion estimator `Ĥ_n = φ_{n,T}^{-1}(S_n)`
//!   and the localized log-ratio estimator `H_n(k)`, with standard errors;
//! * [`variance`]: the asymptotic variance constants `σ²`, `σ*²`, `σ_H²`;
//! * [`experiment`]: replicated Monte-Carlo runs with tabulated summaries.
//!
//! ```
//! use hurstqv::{estimate, fbm, quadvar};
//!
//! let design = quadvar::GridDesign::square(60)?;
//! let path = fbm::fbm_path(design.m_n(), 1.0, 0.7, 17)?;
//! let est = estimate::estimate_localized(&path, &design, quadvar::Selector::NearMeanBoth, Some(0.95))?;
//! assert!((est.h_hat - 0.7).abs() < 0.1);
//! # Ok::<(), hurstqv::HurstError>(())
//! ```

pub mod cli;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod fbm;
mod kernels;
pub mod pathio;
pub mod rng;
pub mod sde;
pub mod quadvar;
pub mod variance;

pub use error::{HurstError, Result};
