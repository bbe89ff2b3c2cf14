//! Set representations and their geometric measures.
//!
//! Three representations of a bounded set in three dimensions are supported:
//! finite unions of disjoint balls (exact), voxel occupancy grids (any
//! measurable set, at resolution `h`), and rotationally symmetric star-shaped
//! bodies with a Legendre-expanded boundary (the shape optimiser's search
//! family).

mod axisym;
mod ball;
pub mod io;
mod voxel;

pub use axisym::DEFAULT_QUADRATURE;
pub use axisym::{AxisymmetricShape, MeridianProfile, Spheroid};
pub use ball::{Ball, BallConfiguration};
pub(crate) use voxel::cell_equivalent_radius;
pub use voxel::{face_count_perimeter, VoxelSet};

use crate::error::Result;

pub type Point3 = [f64; 3];

pub(crate) fn distance(a: &Point3, b: &Point3) -> f64 {
    distance_sq(a, b).sqrt()
}

pub(crate) fn distance_sq(a: &Point3, b: &Point3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Geometric measures shared by every set representation.
pub trait Measure {
    /// Lebesgue measure.
    fn volume(&self) -> f64;
    /// Perimeter in the De Giorgi sense (surface area for smooth boundaries).
    fn perimeter(&self) -> f64;
    /// Essential diameter; undefined for the empty set.
    fn diameter(&self) -> Result<f64>;
}

/// Any supported representation of a set.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Balls(BallConfiguration),
    Voxels(VoxelSet),
    Axisymmetric(AxisymmetricShape),
}

impl Shape {
    /// Occupancy grid at spacing `h`; voxel sets are returned unchanged.
    pub fn voxelize(&self, h: f64) -> Result<VoxelSet> {
        match self {
            Shape::Balls(b) => b.voxelize(h),
            Shape::Voxels(v) => Ok(v.clone()),
            Shape::Axisymmetric(s) => s.voxelize(h),
        }
    }
}

impl Measure for Shape {
    fn volume(&self) -> f64 {
        match self {
            Shape::Balls(b) => b.volume(),
            Shape::Voxels(v) => v.volume(),
            Shape::Axisymmetric(s) => s.volume(),
        }
    }

    fn perimeter(&self) -> f64 {
        match self {
            Shape::Balls(b) => b.perimeter(),
            Shape::Voxels(v) => v.perimeter(),
            Shape::Axisymmetric(s) => s.perimeter(),
        }
    }

    fn diameter(&self) -> Result<f64> {
        match self {
            Shape::Balls(b) => b.diameter(),
            Shape::Voxels(v) => v.diameter(),
            Shape::Axisymmetric(s) => s.diameter(),
        }
    }
}

impl From<BallConfiguration> for Shape {
    fn from(value: BallConfiguration) -> Self {
        Shape::Balls(value)
    }
}

impl From<VoxelSet> for Shape {
    fn from(value: VoxelSet) -> Self {
        Shape::Voxels(value)
    }
}

impl From<AxisymmetricShape> for Shape {
    fn from(value: AxisymmetricShape) -> Self {
        Shape::Axisymmetric(value)
    }
}
