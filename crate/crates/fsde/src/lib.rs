//! Pathwise machinery for the equation dx = σ(x) dB driven by fractional
//! Brownian motion with Hurst index in [1/2, 1), where σ takes one constant
//! value on each side of zero (a two-level "skew" coefficient).
//!
//! Module map:
//! - [`fbm`]: exact path synthesis (dense Cholesky and circulant embedding),
//!   grid Hölder norms, Monte Carlo covariance estimates.
//! - [`skew`]: the two-level coefficient, its Lipschitz mollification, the
//!   increasing transforms that linearize both, and their sup gaps, which
//!   decay exactly like 1/n.
//! - [`frac`]: one-sided fractional derivatives of sampled paths and the
//!   derivative-pairing evaluation of ∫ f dg, cross-checkable against
//!   left-endpoint Riemann–Stieltjes sums.
//! - [`solver`]: exact and mollified pathwise solutions by transform
//!   inversion, residual diagnostics, and convergence studies.
//! - [`stats`]: the small statistical toolbox used by the verification
//!   layers.
//!
//! Everything numeric is generic over [`Scalar`] (impls for `f64` and
//! `f32`); the `*64` aliases below fix the default double-precision types.
//! Every stochastic entry point takes an explicit seed, and one seed fully
//! determines one path regardless of thread count.

pub mod error;
pub mod fbm;
pub mod frac;
pub mod grid;
pub mod scalar;
pub mod skew;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases for the main types.
pub type TimeGrid64 = grid::TimeGrid<f64>;
pub type SamplePath64 = grid::SamplePath<f64>;
pub type Hurst64 = fbm::Hurst<f64>;
pub type SkewParams64 = skew::SkewParams<f64>;
pub type TransformFamily64 = skew::TransformFamily<f64>;
pub type SolutionPath64 = solver::SolutionPath<f64>;
pub type ConvergenceReport64 = solver::ConvergenceReport<f64>;
