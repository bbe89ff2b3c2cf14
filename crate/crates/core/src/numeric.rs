//! Small numerical kernels shared across the crate: Gauss–Legendre rules,
//! Legendre polynomials, complete elliptic integrals, and 1-D searches.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are returned in increasing order.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    let mut d_prev = 0.0;
    let mut d = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    for l in 2..=n {
        let lf = l as f64;
        let p_next = ((2.0 * lf - 1.0) * x * p - (lf - 1.0) * p_prev) / lf;
        // P_l' = P_{l-2}' + (2l - 1) P_{l-1}
        let d_next = d_prev + (2.0 * lf - 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Fills `values[l] = P_l(x)` and `derivs[l] = P_l'(x)` for `l = 0..values.len()`.
pub fn legendre_table(x: f64, values: &mut [f64], derivs: &mut [f64]) {
    let n = values.len();
    debug_assert_eq!(n, derivs.len());
    if n == 0 {
        return;
    }
    values[0] = 1.0;
    derivs[0] = 0.0;
    if n == 1 {
        return;
    }
    values[1] = x;
    derivs[1] = 1.0;
    for l in 2..n {
        let lf = l as f64;
        values[l] = ((2.0 * lf - 1.0) * x * values[l - 1] - (lf - 1.0) * values[l - 2]) / lf;
        derivs[l] = derivs[l - 2] + (2.0 * lf - 1.0) * values[l - 1];
    }
}

/// Complete elliptic integrals `(K(m), E(m))` with parameter `m = k²` in `[0, 1)`,
/// computed by the arithmetic-geometric mean.
pub fn elliptic_ke(m: f64) -> (f64, f64) {
    debug_assert!((0.0..1.0).contains(&m), "elliptic parameter {m}");
    elliptic_ke_complement(1.0 - m)
}

/// `(K(m), E(m))` from the complementary parameter `m1 = 1 − m` in `(0, 1]`,
/// which keeps full relative accuracy of `1 − m` near the logarithmic
/// singularity.
pub fn elliptic_ke_complement(m1: f64) -> (f64, f64) {
    let m1 = m1.max(f64::MIN_POSITIVE);
    let mut a = 1.0;
    let mut b = m1.sqrt();
    let mut c2_sum = 0.5 * (1.0 - m1);
    let mut pow2 = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        pow2 *= 2.0;
        c2_sum += pow2 * c * c;
        a = a_next;
        b = b_next;
        if c.abs() <= 1e-17 * a {
            break;
        }
    }
    let k = PI / (2.0 * a);
    (k, k * (1.0 - c2_sum))
}

/// Golden-section search driven by a comparison predicate.
///
/// `cmp(x1, x2)` orders `f(x1)` against `f(x2)`; passing a comparator that
/// factors out `x1 - x2` analytically lets the search resolve the minimiser far
/// below the `sqrt(eps)` floor of value comparisons.
pub fn golden_section_by(
    mut cmp: impl FnMut(f64, f64) -> Ordering,
    lo: f64,
    hi: f64,
    tol: f64,
) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    while (b - a).abs() > tol {
        if cmp(c, d) == Ordering::Less {
            b = d;
        } else {
            a = c;
        }
        let next_c = b - inv_phi * (b - a);
        let next_d = a + inv_phi * (b - a);
        if next_c == c && next_d == d {
            break;
        }
        c = next_c;
        d = next_d;
    }
    0.5 * (a + b)
}

/// Golden-section search on function values.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    golden_section_by(
        |x1, x2| f(x1).partial_cmp(&f(x2)).unwrap_or(Ordering::Equal),
        lo,
        hi,
        tol,
    )
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    what: &'static str,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(what));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Volume of the unit ball in `d` dimensions.
pub fn unit_ball_volume(d: u32) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Surface area of the unit sphere `S^{d-1}`.
pub fn unit_sphere_area(d: u32) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// Sum with Neumaier compensation; order-dependent but reproducible.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
