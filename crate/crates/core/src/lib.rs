//! Numerical tools for the liquid drop functional
//! `𝓔(Ω) = Per Ω + D(Ω)`, perimeter plus Coulomb (or Riesz) self-energy of a
//! set in three dimensions.
//!
//! * [`geometry`]: ball configurations, voxel sets and axisymmetric bodies with
//!   their volume, perimeter, diameter and concentration.
//! * [`riesz`]: exact and discretised Riesz energies.
//! * [`ballmodel`]: closed-form results for balls and unions of separated balls.
//! * [`curve`]: shape-optimised upper bounds for the minimal energy `E(A)` and
//!   diagnostics of the resulting curves.
//! * [`decomposition`]: splitting a set along a sphere and measuring how
//!   perimeter and energy fail to be additive.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ballmodel;
pub mod curve;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod riesz;

pub use error::{Error, Result};
pub use geometry::{AxisymmetricShape, Ball, BallConfiguration, Measure, Shape, VoxelSet};
pub use riesz::{EnergyBreakdown, RieszParams};
