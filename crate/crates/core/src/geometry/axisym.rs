use std::f64::consts::PI;

use super::{Measure, VoxelSet};
use crate::error::{Error, Result};
use crate::numeric::{legendre_table, GaussLegendre};

/// Default Gauss–Legendre order for boundary integrals.
pub const DEFAULT_QUADRATURE: usize = 64;

/// Uniform θ samples used to certify positivity of the boundary radius.
const POSITIVITY_SAMPLES: usize = 1025;

/// Meridian `θ ↦ r(θ)` of a body of revolution about the z axis, star-shaped
/// with respect to the origin.
pub trait MeridianProfile {
    fn radius(&self, theta: f64) -> f64;
    /// `dr/dθ`.
    fn radius_derivative(&self, theta: f64) -> f64;

    /// Largest distance between boundary points, from a θ × θ grid over the
    /// meridian and its mirror image across the axis.
    fn profile_diameter(&self, samples: usize) -> f64 {
        let pts: Vec<(f64, f64)> = (0..=samples)
            .map(|i| {
                let t = PI * i as f64 / samples as f64;
                let r = self.radius(t);
                (r * t.sin(), r * t.cos())
            })
            .collect();
        let mut best = 0.0f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i..] {
                let d = (a.0 + b.0).powi(2) + (a.1 - b.1).powi(2);
                best = best.max(d);
            }
        }
        best.sqrt()
    }
}

/// Star-shaped body of revolution with boundary
/// `r(θ) = R₀ (1 + Σ_{l=2}^{L} c_l P_l(cos θ))`.
///
/// The monopole is absorbed into `R₀`; the dipole (a translation at first
/// order) is not part of the family.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AxisymmetricShape {
    base_radius: f64,
    /// `coefficients[i]` multiplies `P_{i+2}`.
    coefficients: Vec<f64>,
}

impl AxisymmetricShape {
    pub fn new(base_radius: f64, coefficients: Vec<f64>) -> Result<Self> {
        crate::error::check_positive("base radius", base_radius)?;
        if let Some(&c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::OutOfDomain {
                name: "Legendre coefficient",
                value: c,
            });
        }
        let shape = Self {
            base_radius,
            coefficients,
        };
        shape.check_positive_boundary()?;
        Ok(shape)
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        Self::new(radius, Vec::new())
    }

    /// The shape with the given deformation, rescaled to volume `volume`.
    pub fn with_volume_and_coefficients(volume: f64, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(1.0, coefficients)?.with_volume(volume)
    }

    pub fn base_radius(&self) -> f64 {
        self.base_radius
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Highest Legendre degree present (1 for a sphere).
    pub fn max_degree(&self) -> usize {
        self.coefficients.len() + 1
    }

    /// Dilation about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        crate::error::check_positive("scale factor", factor)?;
        Ok(Self {
            base_radius: self.base_radius * factor,
            coefficients: self.coefficients.clone(),
        })
    }

    /// Same deformation, `R₀` rescaled so the volume equals `volume`.
    pub fn with_volume(&self, volume: f64) -> Result<Self> {
        crate::error::check_positive("volume", volume)?;
        let current = self.volume();
        self.scaled((volume / current).cbrt())
    }

    /// `(r, dr/dx)` at `x = cos θ`.
    pub fn radius_at_cos(&self, x: f64) -> (f64, f64) {
        let n = self.coefficients.len() + 2;
        let mut stack = [0.0f64; 64];
        let mut heap = Vec::new();
        let buf = if 2 * n <= stack.len() {
            &mut stack[..2 * n]
        } else {
            heap.resize(2 * n, 0.0);
            &mut heap[..]
        };
        let (values, derivs) = buf.split_at_mut(n);
        legendre_table(x, values, derivs);
        let mut r = 1.0;
        let mut dr = 0.0;
        for (i, c) in self.coefficients.iter().enumerate() {
            r += c * values[i + 2];
            dr += c * derivs[i + 2];
        }
        (self.base_radius * r, self.base_radius * dr)
    }

    /// θ values at which positivity is checked: a uniform grid plus the
    /// default quadrature nodes.
    fn check_angles() -> impl Iterator<Item = f64> {
        let rule = GaussLegendre::new(DEFAULT_QUADRATURE);
        let uniform =
            (0..POSITIVITY_SAMPLES).map(|i| PI * i as f64 / (POSITIVITY_SAMPLES - 1) as f64);
        uniform.chain(rule.nodes.into_iter().map(f64::acos))
    }

    fn check_positive_boundary(&self) -> Result<()> {
        for theta in Self::check_angles() {
            let (r, _) = self.radius_at_cos(theta.cos());
            if r.is_nan() || r <= 0.0 {
                return Err(Error::NonPositiveBoundary { theta });
            }
        }
        Ok(())
    }

    /// Smallest over largest boundary radius on the positivity check grid.
    pub fn neck_ratio(&self) -> f64 {
        let (lo, hi) = Self::check_angles()
            .map(|t| self.radius_at_cos(t.cos()).0)
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            });
        lo / hi
    }

    /// `(2π/3) ∫_{-1}^{1} r(x)³ dx`; exact once the rule has `(3L + 1)/2` nodes.
    pub fn volume_with(&self, rule: &GaussLegendre) -> f64 {
        2.0 * PI / 3.0 * rule.integrate(-1.0, 1.0, |x| self.radius_at_cos(x).0.powi(3))
    }

    /// `2π ∫_{-1}^{1} r sqrt(r² + (1 - x²) r_x²) dx`.
    pub fn perimeter_with(&self, rule: &GaussLegendre) -> f64 {
        2.0 * PI
            * rule.integrate(-1.0, 1.0, |x| {
                let (r, dr) = self.radius_at_cos(x);
                r * (r * r + (1.0 - x * x) * dr * dr).sqrt()
            })
    }

    /// Cell occupied iff its centre lies strictly inside the boundary.
    pub fn voxelize(&self, h: f64) -> Result<VoxelSet> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidSpacing(h));
        }
        let reach = (0..=POSITIVITY_SAMPLES)
            .map(|i| self.radius(PI * i as f64 / POSITIVITY_SAMPLES as f64))
            .fold(0.0f64, f64::max)
            * 1.01;
        VoxelSet::from_predicate([-reach; 3], [reach; 3], h, |p| {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if norm == 0.0 {
                return true;
            }
            norm < self.radius_at_cos(p[2] / norm).0
        })
    }
}

impl MeridianProfile for AxisymmetricShape {
    fn radius(&self, theta: f64) -> f64 {
        self.radius_at_cos(theta.cos()).0
    }

    fn radius_derivative(&self, theta: f64) -> f64 {
        -theta.sin() * self.radius_at_cos(theta.cos()).1
    }
}

impl Measure for AxisymmetricShape {
    fn volume(&self) -> f64 {
        self.volume_with(&GaussLegendre::new(DEFAULT_QUADRATURE))
    }

    fn perimeter(&self) -> f64 {
        self.perimeter_with(&GaussLegendre::new(DEFAULT_QUADRATURE))
    }

    fn diameter(&self) -> Result<f64> {
        Ok(self.profile_diameter(720))
    }
}

/// Spheroid with polar semi-axis `polar` (along z) and equatorial semi-axis
/// `equatorial`. Not in the Legendre family; used as an exact reference body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spheroid {
    pub polar: f64,
    pub equatorial: f64,
}

impl Spheroid {
    pub fn volume(&self) -> f64 {
        4.0 * PI / 3.0 * self.polar * self.equatorial * self.equatorial
    }
}

impl MeridianProfile for Spheroid {
    fn radius(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        1.0 / (s * s / (self.equatorial * self.equatorial) + c * c / (self.polar * self.polar))
            .sqrt()
    }

    fn radius_derivative(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let r = self.radius(theta);
        -r.powi(3)
            * s
            * c
            * (1.0 / (self.equatorial * self.equatorial) - 1.0 / (self.polar * self.polar))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_measures_are_exact() {
        let s = AxisymmetricShape::sphere(1.0).unwrap();
        assert!((s.volume() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((s.perimeter() - 4.0 * PI).abs() < 1e-12);
        assert!((s.diameter().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_boundary() {
        // r(0) = 1 + c_2 < 0
        let err = AxisymmetricShape::new(1.0, vec![-1.5]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveBoundary { .. }));
        assert!(AxisymmetricShape::new(0.0, vec![]).is_err());
        assert!(AxisymmetricShape::new(1.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn volume_matches_theta_quadrature() {
        let s = AxisymmetricShape::new(1.3, vec![0.2, -0.05, 0.03]).unwrap();
        let rule = GaussLegendre::new(200);
        let theta_form =
            2.0 * PI / 3.0 * rule.integrate(0.0, PI, |t| s.radius(t).powi(3) * t.sin());
        assert!((s.volume() - theta_form).abs() < 1e-12);
        let perim_theta = 2.0
            * PI
            * rule.integrate(0.0, PI, |t| {
                let r = s.radius(t);
                let dr = s.radius_derivative(t);
                r * t.sin() * (r * r + dr * dr).sqrt()
            });
        assert!((s.perimeter() - perim_theta).abs() < 1e-10);
    }

    #[test]
    fn with_volume_normalizes() {
        let s = AxisymmetricShape::with_volume_and_coefficients(7.0, vec![0.3, 0.1]).unwrap();
        assert!((s.volume() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn radius_derivative_matches_finite_difference() {
        let s = AxisymmetricShape::new(1.0, vec![0.2, 0.1, -0.04, 0.02]).unwrap();
        for &t in &[0.1, 0.7, 1.5, 2.9] {
            let fd = (s.radius(t + 1e-6) - s.radius(t - 1e-6)) / 2e-6;
            assert!((s.radius_derivative(t) - fd).abs() < 1e-8);
        }
        let sp = Spheroid {
            polar: 2.0,
            equatorial: 0.7,
        };
        for &t in &[0.1, 0.7, 1.5, 2.9] {
            let fd = (sp.radius(t + 1e-6) - sp.radius(t - 1e-6)) / 2e-6;
            assert!((sp.radius_derivative(t) - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn spheroid_diameter_is_long_axis() {
        let sp = Spheroid {
            polar: 2.0,
            equatorial: 0.7,
        };
        assert!((sp.profile_diameter(720) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn prolate_shape_is_voxelized_consistently() {
        let s = AxisymmetricShape::with_volume_and_coefficients(4.0, vec![0.25]).unwrap();
        let coarse = (s.voxelize(0.1).unwrap().volume() - 4.0).abs();
        let fine = (s.voxelize(0.05).unwrap().volume() - 4.0).abs();
        assert!(coarse < 0.1 && fine < 0.05);
    }
}
