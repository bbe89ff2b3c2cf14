//! Splitting a voxel set along a sphere.
//!
//! A radius is chosen in a caller-supplied interval where the set meets the
//! sphere in little area; the set is then cut into the inside part `F` and the
//! outside part `G`, and the failure of perimeter and Riesz energy to be
//! additive is measured.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_positive, Error, Result};
use crate::geometry::{distance, Measure, Point3, VoxelSet};
use crate::riesz::{cross_energy, RieszParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusSelection {
    pub radius: f64,
    /// Estimated area of `∂B_r ∩ E`.
    pub slice: f64,
    /// `|E ∩ (B_{R_hi + h/2} ∖ B_{R_lo − h/2})| / (R_hi − R_lo)`: the grid
    /// minimum never exceeds this.
    pub average_bound: f64,
    pub candidates: usize,
}

fn sorted_distances(set: &VoxelSet, center: &Point3) -> Vec<f64> {
    let mut d: Vec<f64> = set
        .occupied_centers()
        .iter()
        .map(|c| distance(c, center))
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Number of sorted distances in the open interval `(lo, hi)`.
fn count_between(sorted: &[f64], lo: f64, hi: f64) -> usize {
    let a = sorted.partition_point(|&d| d <= lo);
    let b = sorted.partition_point(|&d| d < hi);
    b.saturating_sub(a)
}

/// Slice estimate `|E ∩ (B_{r+h/2} ∖ B_{r−h/2})| / h`, centres counted in the
/// open shell.
pub fn slice_measure(set: &VoxelSet, r: f64, center: &Point3) -> f64 {
    let h = set.spacing();
    let sorted = sorted_distances(set, center);
    count_between(&sorted, r - 0.5 * h, r + 0.5 * h) as f64 * set.cell_volume() / h
}

/// Radius in `[r_lo, r_hi]` minimising the slice estimate over the grid
/// `r_lo + i·h/2`; ties go to the smallest radius.
pub fn select_split_radius(
    set: &VoxelSet,
    r_lo: f64,
    r_hi: f64,
    center: &Point3,
) -> Result<RadiusSelection> {
    check_positive("inner radius", r_lo)?;
    if !(r_hi > r_lo) || !r_hi.is_finite() {
        return Err(Error::OutOfDomain {
            name: "outer radius (must exceed the inner radius)",
            value: r_hi,
        });
    }
    let h = set.spacing();
    let step = 0.5 * h;
    let sorted = sorted_distances(set, center);
    let n = ((r_hi - r_lo) / step).floor() as usize + 1;
    let cell = set.cell_volume();
    let slices: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = r_lo + i as f64 * step;
            count_between(&sorted, r - 0.5 * h, r + 0.5 * h) as f64 * cell / h
        })
        .collect();
    let mut best = 0;
    for (i, s) in slices.iter().enumerate() {
        if *s < slices[best] {
            best = i;
        }
    }
    let annulus =
        count_between(&sorted, r_lo - step - 1e-12 * h, r_hi + step + 1e-12 * h) as f64 * cell;
    Ok(RadiusSelection {
        radius: r_lo + best as f64 * step,
        slice: slices[best],
        average_bound: annulus / (r_hi - r_lo),
        candidates: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    pub radius: f64,
    /// Cells with centre in the open ball `B_r`.
    #[serde(skip)]
    pub inside: VoxelSet,
    /// The remaining cells.
    #[serde(skip)]
    pub outside: VoxelSet,
    pub inside_volume: f64,
    pub outside_volume: f64,
    pub slice: f64,
    /// `Per F + Per G − Per E`.
    pub perimeter_defect: f64,
    /// `I_λ(E) − I_λ(F) − I_λ(G)`, the full cross term.
    pub riesz_defect: f64,
}

pub fn split(set: &VoxelSet, r: f64, center: &Point3, params: &RieszParams) -> Result<SplitResult> {
    check_positive("split radius", r)?;
    let inside = set.filtered(|c| distance(c, center) < r);
    let outside = set.filtered(|c| distance(c, center) >= r);
    let perimeter_defect = inside.perimeter() + outside.perimeter() - set.perimeter();
    let riesz_defect = cross_energy(&inside, &outside, params)?;
    Ok(SplitResult {
        radius: r,
        inside_volume: inside.volume(),
        outside_volume: outside.volume(),
        slice: slice_measure(set, r, center),
        perimeter_defect,
        riesz_defect,
        inside,
        outside,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    /// Actual translation, `separation` rounded to whole cells.
    pub separation: f64,
    /// `∬_{E × (E+s)} |x − y|^{−λ}`.
    pub cross: f64,
    /// `|E|² / s^λ`.
    pub far_field: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingReport {
    pub exponent: f64,
    pub rows: Vec<SeparationRow>,
    /// Cross terms strictly decrease along increasing separations.
    pub monotone: bool,
}

/// Cross energy between `E` and a copy translated along x by each separation.
pub fn vanishing_sequence_demo(
    set: &VoxelSet,
    separations: &[f64],
    params: &RieszParams,
) -> Result<VanishingReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let h = set.spacing();
    let q = set.volume();
    let lambda = params.exponent();
    let mut rows = Vec::with_capacity(separations.len());
    for &s in separations {
        check_positive("separation", s)?;
        let cells = (s / h).round() as i64;
        let moved = set.translated_cells([cells, 0, 0]);
        let actual = cells as f64 * h;
        let cross = cross_energy(set, &moved, params)?;
        let far_field = q * q / actual.powf(lambda);
        rows.push(SeparationRow {
            separation: actual,
            cross,
            far_field,
            ratio: cross / far_field,
        });
    }
    let mut order: Vec<&SeparationRow> = rows.iter().collect();
    order.sort_by(|a, b| a.separation.total_cmp(&b.separation));
    let monotone = order.windows(2).all(|w| w[1].cross < w[0].cross);
    Ok(VanishingReport {
        exponent: lambda,
        rows,
        monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationReport {
    /// `sup_a |B_1(a) ∩ E|` over the half-spacing lattice.
    pub concentration: f64,
    pub volume: f64,
    pub perimeter: f64,
    /// `|E| / (Per E + |E|)`.
    pub ratio: f64,
}

pub fn concentration_report(set: &VoxelSet) -> Result<ConcentrationReport> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let volume = set.volume();
    let perimeter = set.perimeter();
    Ok(ConcentrationReport {
        concentration: set.concentration(1.0)?,
        volume,
        perimeter,
        ratio: volume / (perimeter + volume),
    })
}
