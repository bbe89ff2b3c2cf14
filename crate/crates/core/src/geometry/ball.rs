use std::f64::consts::PI;

use super::{distance, Measure, Point3, VoxelSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point3,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point3, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn volume(&self) -> f64 {
        4.0 * PI / 3.0 * self.radius.powi(3)
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }

    /// Ball of the given volume centred at the origin.
    pub fn with_volume(volume: f64) -> Self {
        Self::new([0.0; 3], (3.0 * volume / (4.0 * PI)).cbrt())
    }
}

/// A finite list of pairwise disjoint closed balls.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BallConfiguration {
    balls: Vec<Ball>,
}

impl BallConfiguration {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        for (index, b) in balls.iter().enumerate() {
            if !(b.radius.is_finite() && b.radius > 0.0) {
                return Err(Error::NonPositiveRadius {
                    index,
                    radius: b.radius,
                });
            }
            if b.center.iter().any(|c| !c.is_finite()) {
                return Err(Error::OutOfDomain {
                    name: "ball center",
                    value: f64::NAN,
                });
            }
        }
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                if distance(&balls[i].center, &balls[j].center) <= balls[i].radius + balls[j].radius
                {
                    return Err(Error::Overlap {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Self { balls })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(ball: Ball) -> Self {
        Self { balls: vec![ball] }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn translated(&self, shift: Point3) -> Self {
        let balls = self
            .balls
            .iter()
            .map(|b| {
                Ball::new(
                    [
                        b.center[0] + shift[0],
                        b.center[1] + shift[1],
                        b.center[2] + shift[2],
                    ],
                    b.radius,
                )
            })
            .collect();
        Self { balls }
    }

    /// Dilation about the origin by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        crate::error::check_positive("scale factor", factor)?;
        let balls = self
            .balls
            .iter()
            .map(|b| Ball::new(b.center.map(|c| c * factor), b.radius * factor))
            .collect();
        Ok(Self { balls })
    }

    /// Cell occupied iff its centre lies in some ball.
    pub fn voxelize(&self, h: f64) -> Result<VoxelSet> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidSpacing(h));
        }
        if self.balls.is_empty() {
            return VoxelSet::empty(h);
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for b in &self.balls {
            for a in 0..3 {
                lo[a] = lo[a].min(b.center[a] - b.radius);
                hi[a] = hi[a].max(b.center[a] + b.radius);
            }
        }
        VoxelSet::from_predicate(lo, hi, h, |p| {
            self.balls
                .iter()
                .any(|b| super::distance_sq(p, &b.center) < b.radius * b.radius)
        })
    }
}

impl Measure for BallConfiguration {
    fn volume(&self) -> f64 {
        self.balls.iter().map(Ball::volume).sum()
    }

    fn perimeter(&self) -> f64 {
        self.balls.iter().map(Ball::area).sum()
    }

    fn diameter(&self) -> Result<f64> {
        let mut best: Option<f64> = None;
        for (i, a) in self.balls.iter().enumerate() {
            let mut d = 2.0 * a.radius;
            for b in &self.balls[i + 1..] {
                d = d.max(distance(&a.center, &b.center) + a.radius + b.radius);
            }
            best = Some(best.map_or(d, |x: f64| x.max(d)));
        }
        best.ok_or(Error::EmptySet)
    }
}
