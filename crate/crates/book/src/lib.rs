//! The guide's chapters as rustdoc modules, so `cargo test` runs every
//! listing in `book/src` as a doc-test.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/fbm.md")]
pub mod fbm {}
#[doc = include_str!("../../../book/src/sde.md")]
pub mod sde {}
#[doc = include_str!("../../../book/src/quadratic-variation.md")]
pub mod quadratic_variation {}
#[doc = include_str!("../../../book/src/estimators.md")]
pub mod estimators {}
#[doc = include_str!("../../../book/src/variance.md")]
pub mod variance {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
