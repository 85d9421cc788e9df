//! Numerical core for sharp complex-convexity inequalities on spheres and
//! hypercontractivity of ultraspherical measures on the circle.
//!
//! Everything here is pure floating-point computation: Gauss rules for the
//! reduced ultraspherical measures `dmu_lambda(t) = 2 c_{2 lambda} (1 - t^2)^(lambda - 1/2) dt`,
//! spherical means reduced to one dimension, and grid verifiers that turn
//! each inequality into a [`VerifyReport`] carrying the worst margin and the
//! parameter that attains it.
//!
//! The crate is `no_std` (it needs `alloc`); IO, CLI and parallel drivers
//! live in the `sharpconvex` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod convexity;
mod error;
pub mod grid;
pub mod logsobolev;
mod math;
pub mod quadrature;
mod report;
pub mod specfun;
pub mod spherical_means;
pub mod ultraspherical;

pub use error::{Error, Result};
pub use quadrature::{Integrator, IntegratorConfig, QuadRule};
pub use report::VerifyReport;

/// Default margin tolerance for every inequality verification.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
