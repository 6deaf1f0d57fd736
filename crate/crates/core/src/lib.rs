//! Sequential target-seeking optimization for expensive, noisy processes.
//!
//! A process maps a vector of controllable parameters to a vector of
//! measured outcomes. Given a target outcome and an acceptance box around
//! it, the optimizer suggests parameter vectors whose measurements move
//! toward the target, spending as few evaluations as possible. Each
//! iteration rotates the outcome space so the target sits at the origin,
//! compresses the parameter space onto partial-least-squares directions,
//! fits low-order polynomials level by level, and solves for roots; when
//! a level has no root, a space-filling fallback keeps the search moving.
//!
//! The crate also ships the comparison harness used to study the method:
//! test-model oracles with Gaussian measurement noise, an NSGA-II and a
//! random-search baseline on the same evaluation budget, multi-path
//! simulation with common random numbers, and quantile/bias summaries.
//!
//! Multi-path simulation fans out across threads when the `parallel`
//! feature (default) is enabled; results are byte-identical regardless
//! of thread count because every path derives its own RNG stream.

pub mod baselines;
pub mod dataspace;
pub mod error;
pub mod optimizer;
pub mod parallel;
pub mod reduction;
pub mod regression;
pub mod rootsearch;
pub mod simbench;

pub use error::{Error, Result};
