//! Convex staircase regression experiments: data distribution, spline
//! hypothesis class, standard/robust/augmented/self-trained estimators,
//! exact risk metrics, and the sweep harness behind the CLI.

pub mod distribution;
pub mod error;
pub mod estimators;
pub mod harness;
mod hash;
pub mod metrics;
pub mod rst;
pub mod spline;

pub use error::{Error, Result};
