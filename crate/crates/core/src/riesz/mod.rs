//! Riesz interaction energies `I_λ(E) = ½ ∬_{E×E} |x − y|^{−λ} dx dy` and the
//! Coulomb energy `D = I₁` in three dimensions.
//!
//! Ball configurations are handled in closed form (Newton's theorem for the
//! cross terms), voxel sets by cell-pair sums, and axisymmetric bodies by a
//! boundary-integral reduction that is smooth in the shape parameters.

mod boundary;
mod voxel;

pub use boundary::{axisymmetric_energy, coulomb_energy_profile};
pub use voxel::{cross_energy, potential_at, riesz_energy_voxel};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, AxisymmetricShape, BallConfiguration, Measure, Shape};
use crate::numeric::{unit_ball_volume, unit_sphere_area, GaussLegendre};

/// Ambient dimension `d` and Riesz exponent `λ ∈ (0, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszParams {
    dim: u32,
    exponent: f64,
}

impl RieszParams {
    pub fn new(dim: u32, exponent: f64) -> Result<Self> {
        if dim < 2 || !(exponent > 0.0 && exponent < dim as f64) {
            return Err(Error::InvalidRiesz { dim, exponent });
        }
        Ok(Self { dim, exponent })
    }

    /// `d = 3`, `λ = 1`: the liquid drop case.
    pub fn coulomb() -> Self {
        Self {
            dim: 3,
            exponent: 1.0,
        }
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_coulomb(&self) -> bool {
        self.dim == 3 && self.exponent == 1.0
    }

    pub(crate) fn require_three_dimensional(&self) -> Result<()> {
        if self.dim == 3 {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "set energies are implemented for d = 3 only",
            ))
        }
    }
}

impl Default for RieszParams {
    fn default() -> Self {
        Self::coulomb()
    }
}

/// Volume, perimeter, Riesz energy and `total = perimeter + riesz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub volume: f64,
    pub perimeter: f64,
    pub riesz: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(volume: f64, perimeter: f64, riesz: f64) -> Self {
        Self {
            volume,
            perimeter,
            riesz,
            total: perimeter + riesz,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// `total / volume`; undefined for the empty set.
    pub fn per_particle(&self) -> Result<f64> {
        if self.volume > 0.0 {
            Ok(self.total / self.volume)
        } else {
            Err(Error::EmptySet)
        }
    }

    /// Breakdown of the dilation `ℓΩ` (Coulomb scaling: `ℓ³`, `ℓ²`, `ℓ⁵`).
    pub fn dilated(&self, factor: f64) -> Self {
        Self::new(
            self.volume * factor.powi(3),
            self.perimeter * factor.powi(2),
            self.riesz * factor.powi(5),
        )
    }
}

/// Self-energy `I_λ(B_R)` of a ball in three dimensions.
///
/// Closed form of `½|B|² ∫₀^{2R} t^{−λ} ρ_R(t) dt`, where `ρ_R` is the density of
/// the distance between two independent uniform points of the ball.
pub fn ball_self_energy(radius: f64, params: &RieszParams) -> Result<f64> {
    params.require_three_dimensional()?;
    let lambda = params.exponent;
    let volume = 4.0 * PI / 3.0 * radius.powi(3);
    if params.is_coulomb() {
        return Ok(0.6 * volume * volume / radius);
    }
    let bracket = 3.0 * 2f64.powf(3.0 - lambda) / (3.0 - lambda)
        - 9.0 * 2f64.powf(4.0 - lambda) / (4.0 * (4.0 - lambda))
        + 3.0 * 2f64.powf(6.0 - lambda) / (16.0 * (6.0 - lambda));
    Ok(0.5 * volume * volume * radius.powf(-lambda) * bracket)
}

/// `D = Σ_i (3/5)Q_i²/r_i + Σ_{i<j} Q_iQ_j/|c_i − c_j|`, exact for disjoint balls.
pub fn coulomb_energy_balls(config: &BallConfiguration) -> f64 {
    let balls = config.balls();
    let mut total = 0.0;
    for (i, a) in balls.iter().enumerate() {
        let qa = a.volume();
        total += 0.6 * qa * qa / a.radius;
        for b in &balls[i + 1..] {
            total += qa * b.volume() / distance(&a.center, &b.center);
        }
    }
    total
}

/// Sharp bound `sup_x ∫_F |x − y|^{−λ} dy ≤ σ_{d−1} ρ^{d−λ}/(d − λ)` with
/// `ρ = (|F|/ω_d)^{1/d}`: the potential of the centred ball of the same volume.
pub fn potential_sup_bound(volume: f64, params: &RieszParams) -> Result<f64> {
    if !(volume >= 0.0) || !volume.is_finite() {
        return Err(Error::OutOfDomain {
            name: "volume",
            value: volume,
        });
    }
    let d = params.dim as f64;
    let rho = (volume / unit_ball_volume(params.dim)).powf(1.0 / d);
    Ok(unit_sphere_area(params.dim) * rho.powf(d - params.exponent) / (d - params.exponent))
}

/// Energy breakdown of any supported representation.
///
/// Ball configurations are exact for the Coulomb case and for a single ball
/// with any exponent. Axisymmetric bodies use the Coulomb boundary integral;
/// voxelize them first for other exponents.
pub fn total_energy(shape: &Shape, params: &RieszParams) -> Result<EnergyBreakdown> {
    params.require_three_dimensional()?;
    match shape {
        Shape::Balls(config) => {
            let riesz =
                if params.is_coulomb() {
                    coulomb_energy_balls(config)
                } else {
                    match config.balls() {
                        [] => 0.0,
                        [ball] => ball_self_energy(ball.radius, params)?,
                        _ => return Err(Error::Unsupported(
                            "cross terms between balls are closed-form only for the Coulomb kernel",
                        )),
                    }
                };
            Ok(EnergyBreakdown::new(
                config.volume(),
                config.perimeter(),
                riesz,
            ))
        }
        Shape::Voxels(v) => Ok(EnergyBreakdown::new(
            v.volume(),
            v.perimeter(),
            riesz_energy_voxel(v, params)?,
        )),
        Shape::Axisymmetric(s) => {
            if !params.is_coulomb() {
                return Err(Error::Unsupported(
                    "axisymmetric energies use the Coulomb boundary integral; voxelize for other exponents",
                ));
            }
            Ok(axisymmetric_energy(
                s,
                &GaussLegendre::new(crate::geometry::DEFAULT_QUADRATURE),
            ))
        }
    }
}

/// Coulomb breakdown of an axisymmetric body with the default quadrature.
pub fn axisymmetric_breakdown(shape: &AxisymmetricShape) -> EnergyBreakdown {
    axisymmetric_energy(
        shape,
        &GaussLegendre::new(crate::geometry::DEFAULT_QUADRATURE),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ball;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const UNIT_BALL_D: f64 = 16.0 * PI * PI / 15.0;

    /// Monte Carlo estimate of `½ ∬ |x−y|^{−λ}` over the unit ball.
    fn monte_carlo_ball_energy(lambda: f64, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut point = || loop {
            let p: [f64; 3] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if p.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                return p;
            }
        };
        let mut acc = 0.0;
        for _ in 0..samples {
            let a = point();
            let b = point();
            acc += distance(&a, &b).powf(-lambda);
        }
        let v = 4.0 * PI / 3.0;
        0.5 * v * v * acc / samples as f64
    }

    #[test]
    fn params_validation() {
        assert!(RieszParams::new(3, 3.0).is_err());
        assert!(RieszParams::new(3, 0.0).is_err());
        assert!(RieszParams::new(1, 0.5).is_err());
        assert!(RieszParams::new(2, 1.5).is_ok());
        assert!(RieszParams::default().is_coulomb());
    }

    #[test]
    fn unit_ball_coulomb_energy() {
        let d = coulomb_energy_balls(&BallConfiguration::single(Ball::new([0.0; 3], 1.0)));
        assert!((d - UNIT_BALL_D).abs() < 1e-13);
        assert!((d - 10.52758).abs() < 1e-5);
        assert_eq!(coulomb_energy_balls(&BallConfiguration::empty()), 0.0);
    }

    #[test]
    fn monte_carlo_confirms_ball_self_energy() {
        let mc = monte_carlo_ball_energy(1.0, 400_000, 7);
        assert!((mc / UNIT_BALL_D - 1.0).abs() < 0.01, "mc {mc}");
    }

    #[test]
    fn general_exponent_self_energy_against_monte_carlo() {
        for &lambda in &[0.5, 1.5, 2.0] {
            let p = RieszParams::new(3, lambda).unwrap();
            let exact = ball_self_energy(1.0, &p).unwrap();
            let mc = monte_carlo_ball_energy(lambda, 400_000, 11);
            assert!(
                (mc / exact - 1.0).abs() < 0.02,
                "lambda {lambda}: {exact} vs {mc}"
            );
        }
        // the general expression reduces to (3/5) Q² / R at λ = 1
        let near = RieszParams::new(3, 1.0 + 1e-9).unwrap();
        assert!((ball_self_energy(1.0, &near).unwrap() / UNIT_BALL_D - 1.0).abs() < 1e-8);
    }

    #[test]
    fn two_ball_coulomb_energy() {
        let c = BallConfiguration::new(vec![
            Ball::new([0.0; 3], 1.0),
            Ball::new([10.0, 0.0, 0.0], 1.0),
        ])
        .unwrap();
        let q = 4.0 * PI / 3.0;
        assert!((coulomb_energy_balls(&c) - (2.0 * UNIT_BALL_D + q * q / 10.0)).abs() < 1e-12);
    }

    #[test]
    fn sup_bound_examples() {
        let p = RieszParams::coulomb();
        assert!((potential_sup_bound(4.0 * PI / 3.0, &p).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert_eq!(potential_sup_bound(0.0, &p).unwrap(), 0.0);
        assert!(potential_sup_bound(-1.0, &p).is_err());
        // d = 2, λ = 1: unit disc potential at its centre is 2π
        let p2 = RieszParams::new(2, 1.0).unwrap();
        assert!((potential_sup_bound(PI, &p2).unwrap() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn total_energy_of_unit_ball() {
        let s = Shape::Balls(BallConfiguration::single(Ball::new([0.0; 3], 1.0)));
        let e = total_energy(&s, &RieszParams::coulomb()).unwrap();
        assert!((e.total - (4.0 * PI + UNIT_BALL_D)).abs() < 1e-12);
        assert!((e.total - 23.0940).abs() < 1e-4);
        assert_eq!(e.total, e.perimeter + e.riesz);
        let empty = total_energy(
            &Shape::Balls(BallConfiguration::empty()),
            &RieszParams::coulomb(),
        )
        .unwrap();
        assert_eq!(empty, EnergyBreakdown::zero());
    }

    #[test]
    fn unsupported_combinations_are_rejected() {
        let two = BallConfiguration::new(vec![
            Ball::new([0.0; 3], 1.0),
            Ball::new([5.0, 0.0, 0.0], 1.0),
        ])
        .unwrap();
        let p = RieszParams::new(3, 2.0).unwrap();
        assert!(matches!(
            total_energy(&Shape::Balls(two), &p),
            Err(Error::Unsupported(_))
        ));
        let p2 = RieszParams::new(2, 1.0).unwrap();
        let one = BallConfiguration::single(Ball::new([0.0; 3], 1.0));
        assert!(total_energy(&Shape::Balls(one), &p2).is_err());
    }
}
