//! Structural diagnostics of binding curves and local probes of the ball.

use serde::Serialize;

use super::shape_at_volume;
use crate::ballmodel::optimal_scale;
use crate::error::{check_positive, Error, Result};
use crate::geometry::AxisymmetricShape;
use crate::numeric::{bisect, GaussLegendre};
use crate::riesz::axisymmetric_energy;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditivityViolation {
    pub mass: f64,
    pub part: f64,
    /// `E(A) − E(A') − E(A − A')`, above the tolerance.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub tolerance: f64,
    pub triples_checked: usize,
    pub subadditivity_violations: Vec<SubadditivityViolation>,
    /// Largest `E(A) − E(A') − E(A − A')` over the checked triples.
    pub max_subadditivity_excess: f64,
    /// Per interior grid point, secant value of `A^{−2/3}E` minus the value
    /// itself; positive entries are concavity defects.
    pub concavity_defects: Vec<(f64, f64)>,
    pub max_concavity_defect: f64,
    /// Argmin of `E/A`, ties to the smaller mass.
    pub a_star: f64,
    /// Last mass of the initial strictly decreasing run of `E/A`.
    pub a_zero: f64,
}

/// Subadditivity over grid-compatible triples `A = A' + (A − A')`, secant
/// concavity of `A^{−2/3}E(A)` on consecutive grid points, and the `A_*`, `A₀`
/// estimates. `tolerance` absorbs the slack of upper-bound estimates.
pub fn structural_checks(
    masses: &[f64],
    energies: &[f64],
    tolerance: f64,
) -> Result<StructuralReport> {
    if masses.is_empty() || masses.len() != energies.len() {
        return Err(Error::EmptySet);
    }
    let n = masses.len();
    let lookup = |target: f64| {
        masses
            .iter()
            .position(|&m| (m - target).abs() <= 1e-9 * target.abs().max(1.0))
    };
    let mut violations = Vec::new();
    let mut max_excess = f64::NEG_INFINITY;
    let mut triples = 0;
    for i in 0..n {
        for j in 0..n {
            if masses[j] >= masses[i] {
                break;
            }
            if let Some(k) = lookup(masses[i] - masses[j]) {
                triples += 1;
                let excess = energies[i] - energies[j] - energies[k];
                max_excess = max_excess.max(excess);
                if excess > tolerance {
                    violations.push(SubadditivityViolation {
                        mass: masses[i],
                        part: masses[j],
                        excess,
                    });
                }
            }
        }
    }

    let phi: Vec<f64> = masses
        .iter()
        .zip(energies)
        .map(|(a, e)| e * a.powf(-2.0 / 3.0))
        .collect();
    let mut defects = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let t = (masses[i] - masses[i - 1]) / (masses[i + 1] - masses[i - 1]);
        let secant = phi[i - 1] + t * (phi[i + 1] - phi[i - 1]);
        defects.push((masses[i], secant - phi[i]));
    }
    let max_defect = defects
        .iter()
        .map(|d| d.1)
        .fold(f64::NEG_INFINITY, f64::max);

    let per: Vec<f64> = masses.iter().zip(energies).map(|(a, e)| e / a).collect();
    let mut star = 0;
    for i in 1..n {
        if per[i] < per[star] {
            star = i;
        }
    }
    let mut zero = 0;
    while zero + 1 < n && per[zero + 1] < per[zero] {
        zero += 1;
    }
    Ok(StructuralReport {
        tolerance,
        triples_checked: triples,
        subadditivity_violations: violations,
        max_subadditivity_excess: max_excess,
        concavity_defects: defects,
        max_concavity_defect: max_defect,
        a_star: masses[star],
        a_zero: masses[zero],
    })
}

fn mode_vector(l: usize, value: f64) -> Result<Vec<f64>> {
    if l < 2 {
        return Err(Error::OutOfDomain {
            name: "Legendre mode (must be ≥ 2)",
            value: l as f64,
        });
    }
    let mut c = vec![0.0; l - 1];
    c[l - 2] = value;
    Ok(c)
}

fn energy_at(a: f64, coefficients: &[f64], rule: &GaussLegendre) -> Result<f64> {
    let (_, e) = shape_at_volume(a, coefficients, rule)?;
    if e.total.is_finite() {
        Ok(e.total)
    } else {
        Err(Error::Unsupported(
            "boundary quadrature produced a non-finite energy",
        ))
    }
}

/// `κ_l(A) = (𝓔₊ + 𝓔₋ − 2𝓔₀)/(2ε²)`, where `𝓔±` is the energy of the body
/// with `c_l = ±ε` at volume `A` and `𝓔₀` that of the ball. Negative values
/// mean the ball is not a local minimiser along mode `l`.
pub fn stability_probe(a: f64, l: usize, eps: f64, rule: &GaussLegendre) -> Result<f64> {
    check_positive("mass", a)?;
    check_positive("deformation amplitude", eps)?;
    let plus = energy_at(a, &mode_vector(l, eps)?, rule)?;
    let minus = energy_at(a, &mode_vector(l, -eps)?, rule)?;
    let ball = energy_at(a, &[], rule)?;
    Ok((plus + minus - 2.0 * ball) / (2.0 * eps * eps))
}

/// Mass at which `κ_l` changes sign, by bisection on `[lo, hi]`.
pub fn kappa_threshold(
    l: usize,
    eps: f64,
    rule: &GaussLegendre,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut failure = None;
    let root = bisect(
        |a| match stability_probe(a, l, eps, rule) {
            Ok(k) => k,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
        "stability coefficient",
    );
    match failure {
        Some(e) => Err(e),
        None => root,
    }
}

/// Central-difference derivatives of `𝓔` along `c_2, …, c_L` at the ball of
/// volume `A`.
pub fn ball_gradient(
    a: f64,
    max_degree: usize,
    eps: f64,
    rule: &GaussLegendre,
) -> Result<Vec<f64>> {
    check_positive("deformation amplitude", eps)?;
    (2..=max_degree)
        .map(|l| {
            let plus = energy_at(a, &mode_vector(l, eps)?, rule)?;
            let minus = energy_at(a, &mode_vector(l, -eps)?, rule)?;
            Ok((plus - minus) / (2.0 * eps))
        })
        .collect()
}

/// `|Per − 2D|/𝓔` after dilating the body to its optimal scale.
pub fn rescaled_virial_residual(shape: &AxisymmetricShape, rule: &GaussLegendre) -> Result<f64> {
    let unit = shape.scaled(shape.volume_with(rule).cbrt().recip())?;
    let opt = optimal_scale(&axisymmetric_energy(&unit, rule))?;
    let e = axisymmetric_energy(&unit.scaled(opt.scale)?, rule);
    Ok((e.perimeter - 2.0 * e.riesz).abs() / e.total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiameterReport {
    /// `(A, diam/A, running max of diam/A)`.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_ratio: f64,
}

/// `diam/A` per grid point and its running maximum, an empirical estimate of
/// the constant in a diameter bound `diam ≤ C A`.
pub fn diameter_monitor(masses: &[f64], diameters: &[f64]) -> DiameterReport {
    let mut running = f64::NEG_INFINITY;
    let rows: Vec<(f64, f64, f64)> = masses
        .iter()
        .zip(diameters)
        .map(|(&a, &d)| {
            let r = d / a;
            if r.is_finite() {
                running = running.max(r);
            }
            (a, r, running)
        })
        .collect();
    DiameterReport {
        rows,
        max_ratio: running,
    }
}
