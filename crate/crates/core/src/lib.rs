//! Tug-of-war with space-dependent probabilities.
//!
//! The crate discretizes the dynamic programming operator of the ε-game whose
//! values approximate the normalized p(x)-Laplacian, iterates it monotonically
//! from both sides to a certified fixed point, simulates the game itself, and
//! ships diagnostics (Hölder modulus, barrier inequalities, boundary estimate,
//! Taylor coefficients, ε-convergence tables).
//!
//! Points are `nalgebra::Vector3<f64>` in every dimension; planar problems keep
//! the third coordinate at zero.

pub mod analysis;
#[cfg(feature = "cli")]
pub mod cli;
pub mod dpp;
mod error;
pub mod game;
pub mod geometry;
mod timing;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use geometry::{point2, point3, BoundaryData, Domain, ExponentField, Point, Region};
