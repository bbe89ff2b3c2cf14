//! Coulomb energy of a uniformly charged body of revolution as a boundary
//! integral.
//!
//! Using `Δ_x |x − y| = 2/|x − y|` and the divergence theorem twice,
//!
//! ```text
//! ∬_{Ω×Ω} dx dy / |x − y| = −½ ∮∮ |x − y| n_x·n_y dS_x dS_y .
//! ```
//!
//! For an axisymmetric surface the azimuthal integral reduces to complete
//! elliptic integrals, leaving a double integral over the meridian angle. The
//! integrand is continuous with a mild `d² log d` singularity on the diagonal,
//! so the inner integral is split at the outer node and both halves use
//! Gauss–Legendre. The result is smooth in the shape parameters, which the
//! finite-difference probes rely on.

use std::f64::consts::PI;

use super::EnergyBreakdown;
use crate::geometry::{AxisymmetricShape, MeridianProfile};
use crate::numeric::{elliptic_ke_complement, GaussLegendre};

/// Below this elliptic parameter the cosine-weighted integral uses its series.
const SERIES_LIMIT: f64 = 1e-3;

#[derive(Clone, Copy)]
struct MeridianPoint {
    rho: f64,
    z: f64,
    /// Outward normal scaled by the meridian speed, `(−z', ρ')`.
    n_rho: f64,
    n_z: f64,
}

fn meridian_point(profile: &impl MeridianProfile, theta: f64) -> MeridianPoint {
    let (s, c) = theta.sin_cos();
    let r = profile.radius(theta);
    let dr = profile.radius_derivative(theta);
    let d_rho = dr * s + r * c;
    let d_z = dr * c - r * s;
    MeridianPoint {
        rho: r * s,
        z: r * c,
        n_rho: -d_z,
        n_z: d_rho,
    }
}

/// `∫₀^{2π} √(a − b cos φ) (w_ρ cos φ + w_z) dφ` for the two points, with
/// `w_ρ = n1ρ n2ρ` and `w_z = n1z n2z`.
fn azimuthal_integral(p: &MeridianPoint, q: &MeridianPoint) -> f64 {
    let dz = p.z - q.z;
    let sum = (p.rho + q.rho).powi(2) + dz * dz; // a + b
    let diff = (p.rho - q.rho).powi(2) + dz * dz; // a − b
    if sum == 0.0 {
        return 0.0;
    }
    let m1 = diff / sum; // 1 − m
    let m = 1.0 - m1;
    let scale = 4.0 * sum.sqrt();
    let (k, e) = elliptic_ke_complement(m1);
    // ∫₀^{π/2} √(1 − m sin²ψ)(2 sin²ψ − 1) dψ
    let cos_part = if m < SERIES_LIMIT {
        0.5 * PI * (-m / 8.0 - m * m / 32.0 - 15.0 * m.powi(3) / 1024.0 - 35.0 * m.powi(4) / 4096.0)
    } else {
        2.0 * (m1 * k - (m1 - m) * e) / (3.0 * m) - e
    };
    scale * (p.n_rho * q.n_rho * cos_part + p.n_z * q.n_z * e)
}

/// `D(Ω) = ½ ∬ |x − y|^{−1}` for the body bounded by `profile`, with an
/// `n`-point rule on the outer integral and `2n` points on the split inner one.
pub fn coulomb_energy_profile(profile: &impl MeridianProfile, rule: &GaussLegendre) -> f64 {
    let outer: Vec<(f64, f64)> = rule.on(0.0, PI).collect();
    let terms: Vec<f64> = outer
        .iter()
        .map(|&(theta, w_outer)| {
            let p = meridian_point(profile, theta);
            let mut inner = 0.0;
            for (lo, hi) in [(0.0, theta), (theta, PI)] {
                for (t, w) in rule.on(lo, hi) {
                    let q = meridian_point(profile, t);
                    inner += w * q.rho * azimuthal_integral(&p, &q);
                }
            }
            w_outer * p.rho * inner
        })
        .collect();
    // D = ½ · (−½) · 2π · ∫∫ ρ₁ρ₂ (...) dθ dθ'
    -0.5 * PI * crate::numeric::compensated_sum(terms)
}

/// Volume, perimeter and Coulomb energy of an axisymmetric shape, all with
/// the same Gauss–Legendre order.
pub fn axisymmetric_energy(shape: &AxisymmetricShape, rule: &GaussLegendre) -> EnergyBreakdown {
    EnergyBreakdown::new(
        shape.volume_with(rule),
        shape.perimeter_with(rule),
        coulomb_energy_profile(shape, rule),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Spheroid;
    use crate::numeric::GaussLegendre;

    /// `(3Q²/10) ∫₀^∞ ds / √((a²+s)(b²+s)²)` for a spheroid with polar semi-axis
    /// `a > b`, in closed form.
    fn prolate_spheroid_energy(a: f64, b: f64) -> f64 {
        let q = 4.0 * PI / 3.0 * a * b * b;
        let c = (a * a - b * b).sqrt();
        let integral = 2.0 / c * (c / a).atanh();
        0.3 * q * q * integral
    }

    #[test]
    fn sphere_energy_is_exact() {
        let s = AxisymmetricShape::sphere(1.0).unwrap();
        let d = coulomb_energy_profile(&s, &GaussLegendre::new(64));
        assert!((d / (16.0 * PI * PI / 15.0) - 1.0).abs() < 1e-9, "D = {d}");
        let d2 = coulomb_energy_profile(&s.scaled(2.0).unwrap(), &GaussLegendre::new(64));
        assert!((d2 / d - 32.0).abs() < 1e-9);
    }

    #[test]
    fn prolate_spheroid_against_ellipsoid_formula() {
        for &(a, b) in &[(1.5, 1.0), (3.0, 0.8)] {
            let sp = Spheroid {
                polar: a,
                equatorial: b,
            };
            let d = coulomb_energy_profile(&sp, &GaussLegendre::new(64));
            let exact = prolate_spheroid_energy(a, b);
            assert!(
                (d / exact - 1.0).abs() < 1e-7,
                "a={a} b={b}: {d} vs {exact}"
            );
        }
    }

    #[test]
    fn cosine_series_matches_closed_form_at_the_switch() {
        let m = SERIES_LIMIT;
        let m1 = 1.0 - m;
        let (k, e) = elliptic_ke_complement(m1);
        let closed = 2.0 * (m1 * k - (m1 - m) * e) / (3.0 * m) - e;
        let series = 0.5
            * PI
            * (-m / 8.0 - m * m / 32.0 - 15.0 * m.powi(3) / 1024.0 - 35.0 * m.powi(4) / 4096.0);
        assert!((closed - series).abs() < 1e-12);
        // and against direct quadrature
        let rule = GaussLegendre::new(64);
        for &m in &[0.3, 0.9] {
            let (k, e) = elliptic_ke_complement(1.0 - m);
            let closed = 2.0 * ((1.0 - m) * k - (1.0 - 2.0 * m) * e) / (3.0 * m) - e;
            let quad = rule.integrate(0.0, PI / 2.0, |t| {
                let s2 = t.sin().powi(2);
                (1.0 - m * s2).sqrt() * (2.0 * s2 - 1.0)
            });
            assert!((closed - quad).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn boundary_integral_agrees_with_voxel_sum() {
        let s = AxisymmetricShape::with_volume_and_coefficients(4.0 * PI / 3.0, vec![0.3, 0.05])
            .unwrap();
        let exact = coulomb_energy_profile(&s, &GaussLegendre::new(64));
        let v = s.voxelize(0.06).unwrap();
        let voxel =
            super::super::riesz_energy_voxel(&v, &super::super::RieszParams::coulomb()).unwrap();
        // compare per unit charge squared to remove the voxel volume error
        let vol = crate::geometry::Measure::volume(&v);
        let scaled = voxel * (4.0 * PI / 3.0 / vol).powf(5.0 / 3.0);
        assert!((scaled / exact - 1.0).abs() < 0.01, "{scaled} vs {exact}");
    }
}
