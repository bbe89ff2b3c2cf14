//! Cell-pair sums on voxel sets.
//!
//! Pairs of distinct cells use the kernel at the cell centres; each cell's own
//! contribution is the self-energy of the ball of equal volume. The cost is
//! `O(N²)` in the number of occupied cells. Per-row partial sums are reduced
//! in cell order, so results do not depend on the thread count.

use rayon::prelude::*;

use super::{ball_self_energy, RieszParams};
use crate::error::{Error, Result};
use crate::geometry::{Point3, VoxelSet};
use crate::numeric::compensated_sum;

/// Largest offset table built before falling back to direct evaluation.
const MAX_TABLE: usize = 1 << 25;

fn kernel(dist_sq: f64, lambda: f64) -> f64 {
    if lambda == 1.0 {
        1.0 / dist_sq.sqrt()
    } else if lambda == 2.0 {
        1.0 / dist_sq
    } else {
        dist_sq.powf(-0.5 * lambda)
    }
}

/// Kernel values indexed by absolute integer cell offsets.
struct OffsetKernel {
    extent: [usize; 3],
    h2: f64,
    lambda: f64,
    table: Option<Vec<f64>>,
}

impl OffsetKernel {
    fn new(extent: [usize; 3], h: f64, lambda: f64) -> Self {
        let h2 = h * h;
        let size = extent.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e));
        let table = size.filter(|&s| s <= MAX_TABLE).map(|size| {
            let mut t = vec![0.0; size];
            for dz in 0..extent[2] {
                for dy in 0..extent[1] {
                    for dx in 0..extent[0] {
                        let d2 = (dx * dx + dy * dy + dz * dz) as f64;
                        if d2 > 0.0 {
                            t[dx + extent[0] * (dy + extent[1] * dz)] = kernel(d2 * h2, lambda);
                        }
                    }
                }
            }
            t
        });
        Self {
            extent,
            h2,
            lambda,
            table,
        }
    }

    #[inline]
    fn get(&self, a: &[i64; 3], b: &[i64; 3]) -> f64 {
        let dx = (a[0] - b[0]).unsigned_abs() as usize;
        let dy = (a[1] - b[1]).unsigned_abs() as usize;
        let dz = (a[2] - b[2]).unsigned_abs() as usize;
        match &self.table {
            Some(t) => t[dx + self.extent[0] * (dy + self.extent[1] * dz)],
            None => kernel((dx * dx + dy * dy + dz * dz) as f64 * self.h2, self.lambda),
        }
    }
}

fn extent_of(cells: &[[i64; 3]]) -> [usize; 3] {
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for c in cells {
        for a in 0..3 {
            lo[a] = lo[a].min(c[a]);
            hi[a] = hi[a].max(c[a]);
        }
    }
    [0, 1, 2].map(|a| {
        if cells.is_empty() {
            0
        } else {
            (hi[a] - lo[a] + 1) as usize
        }
    })
}

/// `I_λ(V)`: midpoint cell-pair sum plus the equal-volume-ball self term per cell.
pub fn riesz_energy_voxel(set: &VoxelSet, params: &RieszParams) -> Result<f64> {
    params.require_three_dimensional()?;
    let cells = set.occupied_cells();
    if cells.is_empty() {
        return Ok(0.0);
    }
    let h = set.spacing();
    let self_term = ball_self_energy(crate::geometry::cell_equivalent_radius(h), params)?;
    let kern = OffsetKernel::new(extent_of(&cells), h, params.exponent());
    let rows: Vec<f64> = (0..cells.len())
        .into_par_iter()
        .map(|i| {
            let a = &cells[i];
            cells[i + 1..].iter().map(|b| kern.get(a, b)).sum::<f64>()
        })
        .collect();
    let cell_volume = set.cell_volume();
    Ok(cells.len() as f64 * self_term + cell_volume * cell_volume * compensated_sum(rows))
}

/// Cell count, then the centre of the first occupied cell. Two cell-disjoint
/// sets never share a key.
fn canonical_key(set: &VoxelSet) -> (usize, [u64; 3]) {
    let first = set.occupied_cells()[0];
    let c = set.center(first);
    (set.count(), c.map(f64::to_bits))
}

/// `∬_{F×G} |x − y|^{−λ} dx dy` for cell-disjoint sets on a shared lattice.
///
/// With this normalisation `I_λ(F ∪ G) = I_λ(F) + I_λ(G) + cross_energy(F, G)`.
/// The arguments are put in a canonical order first, so swapping them gives
/// the identical sum.
pub fn cross_energy(f: &VoxelSet, g: &VoxelSet, params: &RieszParams) -> Result<f64> {
    params.require_three_dimensional()?;
    if f.is_empty() || g.is_empty() {
        return Ok(0.0);
    }
    let (f, g) = if canonical_key(g) < canonical_key(f) {
        (g, f)
    } else {
        (f, g)
    };
    let off = f.lattice_offset(g)?;
    if f.shares_cells_with(g)? {
        return Err(Error::CellOverlap);
    }
    let fc = f.occupied_cells();
    let gc: Vec<[i64; 3]> = g
        .occupied_cells()
        .into_iter()
        .map(|c| [c[0] + off[0], c[1] + off[1], c[2] + off[2]])
        .collect();
    if fc.is_empty() || gc.is_empty() {
        return Ok(0.0);
    }
    let joint: Vec<[i64; 3]> = fc.iter().chain(&gc).copied().collect();
    let kern = OffsetKernel::new(extent_of(&joint), f.spacing(), params.exponent());
    let rows: Vec<f64> = fc
        .par_iter()
        .map(|a| gc.iter().map(|b| kern.get(a, b)).sum::<f64>())
        .collect();
    let cell_volume = f.cell_volume();
    Ok(cell_volume * cell_volume * compensated_sum(rows))
}

/// `∫_V |x − y|^{−λ} dy` by the midpoint rule. A cell whose centre coincides
/// with `x` contributes the potential at the centre of its equal-volume ball.
pub fn potential_at(set: &VoxelSet, x: &Point3, params: &RieszParams) -> Result<f64> {
    params.require_three_dimensional()?;
    let h = set.spacing();
    let lambda = params.exponent();
    let r_eq = crate::geometry::cell_equivalent_radius(h);
    let own = 4.0 * std::f64::consts::PI * r_eq.powf(3.0 - lambda) / (3.0 - lambda);
    let tiny = (1e-9 * h) * (1e-9 * h);
    let terms = set.occupied_centers().into_iter().map(|c| {
        let d2 = crate::geometry::distance_sq(x, &c);
        if d2 <= tiny {
            own
        } else {
            set.cell_volume() * kernel(d2, lambda)
        }
    });
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, BallConfiguration, Measure};
    use std::f64::consts::PI;

    fn voxel_ball(h: f64) -> VoxelSet {
        BallConfiguration::single(Ball::new([0.0; 3], 1.0))
            .voxelize(h)
            .unwrap()
    }

    #[test]
    fn single_cell_is_self_term_only() {
        let h = 0.3;
        let v = VoxelSet::new([0.0; 3], h, [1, 1, 1], vec![true]).unwrap();
        let r_eq = (3.0 * h * h * h / (4.0 * PI)).cbrt();
        let q = h * h * h;
        let e = riesz_energy_voxel(&v, &RieszParams::coulomb()).unwrap();
        assert!((e - 0.6 * q * q / r_eq).abs() < 1e-15);
    }

    #[test]
    fn empty_set_has_zero_energy() {
        let v = VoxelSet::empty(0.1).unwrap();
        assert_eq!(
            riesz_energy_voxel(&v, &RieszParams::coulomb()).unwrap(),
            0.0
        );
        let b = voxel_ball(0.25);
        assert_eq!(cross_energy(&b, &v, &RieszParams::coulomb()).unwrap(), 0.0);
    }

    #[test]
    fn divergent_exponent_is_rejected_at_construction() {
        assert!(RieszParams::new(3, 3.0).is_err());
    }

    #[test]
    fn coarse_voxel_ball_is_close_to_analytic() {
        let d = riesz_energy_voxel(&voxel_ball(0.1), &RieszParams::coulomb()).unwrap();
        assert!((d / (16.0 * PI * PI / 15.0) - 1.0).abs() < 0.02, "D = {d}");
    }

    #[test]
    fn cross_energy_is_symmetric_and_rejects_overlap() {
        let a = voxel_ball(0.25);
        let b = a.translated_cells([24, 4, 0]);
        let p = RieszParams::coulomb();
        assert_eq!(
            cross_energy(&a, &b, &p).unwrap(),
            cross_energy(&b, &a, &p).unwrap()
        );
        assert_eq!(cross_energy(&a, &a, &p), Err(Error::CellOverlap));
    }

    #[test]
    fn discrete_additivity_identity() {
        let a = voxel_ball(0.2);
        let b = a.translated_cells([13, 0, 0]);
        for lambda in [1.0, 0.7, 2.0] {
            let p = RieszParams::new(3, lambda).unwrap();
            let union = a.union(&b).unwrap();
            let lhs = riesz_energy_voxel(&union, &p).unwrap();
            let rhs = riesz_energy_voxel(&a, &p).unwrap()
                + riesz_energy_voxel(&b, &p).unwrap()
                + cross_energy(&a, &b, &p).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs,
                "lambda {lambda}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn table_and_direct_kernels_agree() {
        let t = OffsetKernel::new([4, 4, 4], 0.1, 1.3);
        let direct = OffsetKernel {
            table: None,
            ..OffsetKernel::new([0, 0, 0], 0.1, 1.3)
        };
        let a = [0, 1, 2];
        let b = [3, 0, 0];
        assert_eq!(t.get(&a, &b), direct.get(&a, &b));
    }

    #[test]
    fn potential_is_below_sharp_bound() {
        let v = voxel_ball(0.1);
        let p = RieszParams::coulomb();
        let bound = super::super::potential_sup_bound(v.volume(), &p).unwrap();
        let centers = v.occupied_centers();
        let max = centers
            .iter()
            .step_by(7)
            .map(|x| potential_at(&v, x, &p).unwrap())
            .fold(0.0f64, f64::max);
        assert!(max <= bound * 1.02, "max {max} vs bound {bound}");
        assert!(max >= bound * 0.95);
    }
}
