//! Simulation and numerical verification for finite- and infinite-dimensional
//! Kolmogorov diffusions.
//!
//! The crate is organised bottom-up:
//!
//! * [`wiener`]: a weighted sequence-space model of an abstract Wiener space,
//!   finite-rank coordinate projections and exact Brownian path sampling.
//! * [`gauss`]: the exact Gaussian law of `(B_t, ∫B_s ds)`: covariance, heat
//!   kernel, exact sampling, density ratios and `L^q` norms of shifted laws.
//! * [`drift`]: generalized diffusions `(B_t, ∫F(B_s) ds)` with structured
//!   drift descriptions, assumption validators and path integrators.
//! * [`bounds`]: closed-form constants, control distances, `Γ`/`Γ₂` forms and
//!   Girsanov paths.
//! * [`harness`]: Monte Carlo and quadrature verification of every inequality,
//!   plus finite-dimensional convergence studies.
//!
//! All randomness flows through [`rng::Seed`], which derives independent
//! counter-based streams so that results do not depend on the number of worker
//! threads.

pub mod bounds;
pub mod drift;
pub mod error;
pub mod gauss;
pub mod harness;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod wiener;

pub use error::{Error, Result};
pub use rng::Seed;
