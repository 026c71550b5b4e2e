//! Graph matching by projected fixed-point iteration with a
//! Frobenius-regularized assignment projection.
//!
//! The library is organized around a dense [`matrix::Matrix`] carrier:
//!
//! - [`graph`]: attributed graphs and the quadratic matching objective;
//! - [`projection`]: the doubly stochastic projection stack, including
//!   the scaling normalization loop and a Dykstra reference projector;
//! - [`assignment`]: Hungarian discretization plus an exhaustive
//!   reference solver;
//! - [`solver`]: the outer fixed-point loop and its baseline variant;
//! - [`precision`]: software-emulated reduced-precision execution;
//! - [`metrics`]: matching error and node accuracy;
//! - [`harness`]: synthetic instance generation and the batch runner.
//!
//! The `parallel` feature (on by default) runs matrix products and
//! independent batch cells on rayon; results are bit-identical to the
//! sequential fallback.

pub mod assignment;
pub mod error;
pub mod graph;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod precision;
pub mod projection;
pub mod rng;
pub mod solver;

pub use error::{FramError, Result};
pub use matrix::Matrix;
