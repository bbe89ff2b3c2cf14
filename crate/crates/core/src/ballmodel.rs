//! Closed-form results for balls and for unions of infinitely separated balls.
//!
//! For a ball of volume `A`, `𝓔 = p A^{2/3} + q A^{5/3}` with
//! `p = Per B/|B|^{2/3}` and `q = D(B)/|B|^{5/3}`, `B` the unit ball.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::geometry::Shape;
use crate::riesz::{total_energy, EnergyBreakdown, RieszParams};

/// Coefficients of the ball curve `e_ball(A) = p A^{−1/3} + q A^{2/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallCurveParams {
    pub p: f64,
    pub q: f64,
}

impl BallCurveParams {
    /// From `|B| = 4π/3`, `Per B = 4π` and `D(B) = 16π²/15`.
    pub fn coulomb() -> Self {
        let volume = 4.0 * PI / 3.0;
        let area = 4.0 * PI;
        let coulomb = 16.0 * PI * PI / 15.0;
        Self {
            p: area / volume.powf(2.0 / 3.0),
            q: coulomb / volume.powf(5.0 / 3.0),
        }
    }
}

impl Default for BallCurveParams {
    fn default() -> Self {
        Self::coulomb()
    }
}

/// `e_ball(A)`, energy per particle of a ball of volume `A`.
pub fn ball_energy_per_particle(a: f64) -> Result<f64> {
    check_positive("mass", a)?;
    let BallCurveParams { p, q } = BallCurveParams::coulomb();
    Ok(p * a.powf(-1.0 / 3.0) + q * a.powf(2.0 / 3.0))
}

/// Breakdown of a ball of volume `A` from the scaling law.
pub fn ball_breakdown(a: f64) -> Result<EnergyBreakdown> {
    check_positive("mass", a)?;
    let BallCurveParams { p, q } = BallCurveParams::coulomb();
    Ok(EnergyBreakdown::new(
        a,
        p * a.powf(2.0 / 3.0),
        q * a.powf(5.0 / 3.0),
    ))
}

/// `A_*^{ball} = p/(2q)`, the minimiser of `e_ball`.
pub fn critical_ball_mass() -> f64 {
    let BallCurveParams { p, q } = BallCurveParams::coulomb();
    p / (2.0 * q)
}

/// `Per Ω − (d − λ) I_λ(Ω)`, the derivative of `ℓ ↦ 𝓔(ℓΩ)/|ℓΩ|` at `ℓ = 1`
/// up to sign. For the Coulomb case this is `Per − 2D`.
pub fn virial_residual(shape: &Shape, params: &RieszParams) -> Result<f64> {
    Ok(virial_residual_of(&total_energy(shape, params)?, params))
}

pub fn virial_residual_of(b: &EnergyBreakdown, params: &RieszParams) -> f64 {
    b.perimeter - (params.dim() as f64 - params.exponent()) * b.riesz
}

/// Best dilation of a unit-volume Coulomb body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleOptimum {
    /// `ℓ = (Per ω / 2D(ω))^{1/3}`.
    pub scale: f64,
    /// `min_ℓ 𝓔(ℓω)/|ℓω| = 2^{−2/3}·3·(Per ω)^{2/3} D(ω)^{1/3}`.
    pub energy_per_particle: f64,
}

/// Optimal dilation from the breakdown of a body with `|ω| = 1`.
pub fn optimal_scale(unit: &EnergyBreakdown) -> Result<ScaleOptimum> {
    if (unit.volume - 1.0).abs() > 1e-9 {
        return Err(Error::OutOfDomain {
            name: "volume of the body to rescale (must be 1)",
            value: unit.volume,
        });
    }
    if !(unit.riesz > 0.0) {
        return Err(Error::EmptySet);
    }
    Ok(ScaleOptimum {
        scale: (unit.perimeter / (2.0 * unit.riesz)).cbrt(),
        energy_per_particle: 2f64.powf(-2.0 / 3.0) * 3.0 * scale_invariant_ratio(unit)?,
    })
}

/// `(Per Ω)^{2/3} D(Ω)^{1/3} / |Ω|`, invariant under dilation.
pub fn scale_invariant_ratio(b: &EnergyBreakdown) -> Result<f64> {
    if !(b.volume > 0.0) {
        return Err(Error::EmptySet);
    }
    Ok(b.perimeter.powf(2.0 / 3.0) * b.riesz.cbrt() / b.volume)
}

/// Minimum of `e_ball(A/k)` over the number of balls `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissociationResult {
    pub k: u64,
    pub energy_per_particle: f64,
    pub per_ball_mass: f64,
}

/// `ẽ(A) = min_k e_ball(A/k)`; the smallest minimising `k` is returned.
///
/// The surface term `p (k/A)^{1/3}` alone grows without bound in `k`, so the
/// scan stops as soon as it exceeds the incumbent.
pub fn dissociation_energy(a: f64) -> Result<DissociationResult> {
    check_positive("mass", a)?;
    let BallCurveParams { p, .. } = BallCurveParams::coulomb();
    let mut best = DissociationResult {
        k: 1,
        energy_per_particle: ball_energy_per_particle(a)?,
        per_ball_mass: a,
    };
    let mut k = 2u64;
    while p * (k as f64 / a).cbrt() <= best.energy_per_particle {
        let mass = a / k as f64;
        let e = ball_energy_per_particle(mass)?;
        if e < best.energy_per_particle {
            best = DissociationResult {
                k,
                energy_per_particle: e,
                per_ball_mass: mass,
            };
        }
        k += 1;
    }
    Ok(best)
}

/// `a_k`, the mass at which `k` and `k + 1` balls have equal energy.
pub fn dissociation_threshold(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::OutOfDomain {
            name: "ball count",
            value: 0.0,
        });
    }
    let BallCurveParams { p, q } = BallCurveParams::coulomb();
    let k0 = k as f64;
    let k1 = k0 + 1.0;
    Ok(p / q * (k1.cbrt() - k0.cbrt()) / (k0.powf(-2.0 / 3.0) - k1.powf(-2.0 / 3.0)))
}

/// Parameter `λ > 0` of the two-ball splitting function (unrelated to the
/// Riesz exponent).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitParams {
    lambda: f64,
}

impl SplitParams {
    pub fn new(lambda: f64) -> Result<Self> {
        check_positive("split parameter", lambda)?;
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

fn check_fraction(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name: "mass fraction",
            value: theta,
        })
    }
}

/// `f(θ) = θ^{2/3} + (1−θ)^{2/3} + λ(θ^{5/3} + (1−θ)^{5/3})`.
pub fn split_function(theta: f64, s: &SplitParams) -> Result<f64> {
    check_fraction(theta)?;
    let u = 1.0 - theta;
    Ok(theta.powf(2.0 / 3.0)
        + u.powf(2.0 / 3.0)
        + s.lambda * (theta.powf(5.0 / 3.0) + u.powf(5.0 / 3.0)))
}

/// `f'(θ)` on the open interval.
pub fn split_derivative(theta: f64, s: &SplitParams) -> Result<f64> {
    check_fraction(theta)?;
    let a = theta.cbrt();
    let b = (1.0 - theta).cbrt();
    Ok(2.0 / 3.0 * (1.0 / a - 1.0 / b) + 5.0 * s.lambda / 3.0 * (a * a - b * b))
}

/// `g(θ) = ((1−θ)^{2/3} − θ^{2/3}) / (θ^{−1/3} − (1−θ)^{−1/3})`, which equals
/// `ab(a + b)` with `a = θ^{1/3}`, `b = (1−θ)^{1/3}`; in particular `g(1/2) = 1`
/// and `g(0) = g(1) = 0`.
pub fn split_companion(theta: f64) -> Result<f64> {
    check_fraction(theta)?;
    let a = theta.cbrt();
    let b = (1.0 - theta).cbrt();
    Ok(a * b * (a + b))
}
