use std::f64::consts::PI;

use liquid_drop::ballmodel::BallCurveParams;
use liquid_drop::riesz::{
    ball_self_energy, coulomb_energy_balls, cross_energy, potential_at, potential_sup_bound,
    riesz_energy_voxel, total_energy,
};
use liquid_drop::{Ball, BallConfiguration, Measure, RieszParams, Shape, VoxelSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: f64 = 4.0 * PI / 3.0;

fn ball_at(x: f64, h: f64) -> VoxelSet {
    BallConfiguration::single(Ball::new([x, 0.0, 0.0], 1.0))
        .voxelize(h)
        .unwrap()
}

/// Translate `set` along x by `cells` and re-express it in the original frame,
/// so both lie on one lattice.
fn shifted(set: &VoxelSet, cells: i64) -> VoxelSet {
    set.translated_cells([cells, 0, 0])
}

#[test]
fn two_balls_ten_apart() {
    let pair = BallConfiguration::new(vec![
        Ball::new([0.0; 3], 1.0),
        Ball::new([10.0, 0.0, 0.0], 1.0),
    ])
    .unwrap();
    let exact = 2.0 * 16.0 * PI * PI / 15.0 + Q * Q / 10.0;
    assert!((coulomb_energy_balls(&pair) - exact).abs() < 1e-12);
    assert_eq!(coulomb_energy_balls(&BallConfiguration::empty()), 0.0);

    let a = ball_at(0.0, 0.05);
    let b = shifted(&a, 200);
    let c = cross_energy(&a, &b, &RieszParams::coulomb()).unwrap();
    assert!((c / (Q * Q / 10.0) - 1.0).abs() < 0.01, "{c}");
}

#[test]
fn cross_term_follows_the_far_field_law() {
    let p = RieszParams::coulomb();
    let a = ball_at(0.0, 0.1);
    let c10 = cross_energy(&a, &shifted(&a, 100), &p).unwrap();
    let c20 = cross_energy(&a, &shifted(&a, 200), &p).unwrap();
    assert!((c10 / c20 - 2.0).abs() < 0.02);
    assert_eq!(
        cross_energy(&a, &VoxelSet::empty(0.1).unwrap(), &p).unwrap(),
        0.0
    );
}

#[test]
fn cross_energy_is_symmetric() {
    let p = RieszParams::new(3, 1.5).unwrap();
    let f = VoxelSet::cuboid([0.0; 3], [1.0, 0.5, 0.5], 0.1).unwrap();
    let g = shifted(&ball_at(0.0, 0.1), 25);
    assert_eq!(
        cross_energy(&f, &g, &p).unwrap(),
        cross_energy(&g, &f, &p).unwrap()
    );
}

#[test]
fn potential_decays_like_charge_over_distance() {
    let p = RieszParams::coulomb();
    let a = ball_at(0.0, 0.1);
    for s in [10.0, 20.0, 40.0] {
        let u = potential_at(&a, &[s, 0.0, 0.0], &p).unwrap();
        assert!((u * s / a.volume() - 1.0).abs() < 0.02);
    }
}

#[test]
fn potential_stays_below_the_rearrangement_bound() {
    let p = RieszParams::coulomb();
    let bound = potential_sup_bound(Q, &p).unwrap();
    assert!((bound - 2.0 * PI).abs() < 1e-12);
    assert_eq!(potential_sup_bound(0.0, &p).unwrap(), 0.0);
    let a = ball_at(0.0, 0.1);
    let mut best = 0.0f64;
    for i in 0..=20 {
        let x = -0.5 + 0.05 * i as f64;
        best = best.max(potential_at(&a, &[x, 0.0, 0.0], &p).unwrap());
    }
    assert!(
        best <= 1.02 * potential_sup_bound(a.volume(), &p).unwrap(),
        "{best}"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let slab = VoxelSet::cuboid([0.0; 3], [2.0, 1.0, 0.3], 0.1).unwrap();
    let b = potential_sup_bound(slab.volume(), &p).unwrap();
    for _ in 0..50 {
        let x = [
            rng.gen_range(-0.5..2.5),
            rng.gen_range(-0.5..1.5),
            rng.gen_range(-0.5..0.8),
        ];
        assert!(potential_at(&slab, &x, &p).unwrap() <= 1.02 * b);
    }
}

#[test]
fn ball_maximises_energy_at_fixed_volume() {
    let p = RieszParams::coulomb();
    let sets = [
        VoxelSet::cuboid([0.0; 3], [2.0, 1.0, 0.5], 0.1).unwrap(),
        VoxelSet::cuboid([0.0; 3], [1.0, 1.0, 1.0], 0.1).unwrap(),
        BallConfiguration::new(vec![
            Ball::new([0.0; 3], 0.7),
            Ball::new([1.6, 0.0, 0.0], 0.7),
        ])
        .unwrap()
        .voxelize(0.1)
        .unwrap(),
    ];
    for s in &sets {
        let r = (3.0 * s.volume() / (4.0 * PI)).cbrt();
        let ball = ball_self_energy(r, &p).unwrap();
        assert!(riesz_energy_voxel(s, &p).unwrap() <= ball * 1.01);
    }
}

#[test]
fn adding_cells_never_lowers_the_energy() {
    let p = RieszParams::new(3, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut occupancy = vec![false; 6 * 6 * 6];
    let mut last = 0.0;
    for _ in 0..40 {
        let i = rng.gen_range(0..occupancy.len());
        occupancy[i] = true;
        let v = VoxelSet::new([0.0; 3], 0.2, [6, 6, 6], occupancy.clone()).unwrap();
        let e = riesz_energy_voxel(&v, &p).unwrap();
        assert!(e >= last);
        last = e;
    }
}

#[test]
fn voxel_sum_is_additive_over_a_partition() {
    let p = RieszParams::new(3, 2.0).unwrap();
    let e = VoxelSet::cuboid([0.0; 3], [1.5, 1.0, 0.6], 0.1).unwrap();
    let f = e.filtered(|c| c[0] + c[1] < 1.1);
    let g = e.filtered(|c| c[0] + c[1] >= 1.1);
    let whole = riesz_energy_voxel(&e, &p).unwrap();
    let parts = riesz_energy_voxel(&f, &p).unwrap()
        + riesz_energy_voxel(&g, &p).unwrap()
        + cross_energy(&f, &g, &p).unwrap();
    assert!((whole - parts).abs() <= 1e-12 * whole);
}

#[test]
fn riesz_self_energy_of_the_ball() {
    // ½|B|² E|x − y|^{−λ}, with the distance density 3t² − 9t³/4 + 3t⁵/16 on [0, 2]
    let mc = |lambda: f64| {
        let moment = 3.0 * 2f64.powf(3.0 - lambda) / (3.0 - lambda)
            - 9.0 / 4.0 * 2f64.powf(4.0 - lambda) / (4.0 - lambda)
            + 3.0 / 16.0 * 2f64.powf(6.0 - lambda) / (6.0 - lambda);
        0.5 * Q * Q * moment
    };
    let two = ball_self_energy(1.0, &RieszParams::new(3, 2.0).unwrap()).unwrap();
    assert!((two - 2.0 * PI * PI).abs() < 1e-12);
    for lambda in [0.5, 1.0, 1.5, 2.5] {
        let e = ball_self_energy(1.0, &RieszParams::new(3, lambda).unwrap()).unwrap();
        assert!((e / mc(lambda) - 1.0).abs() < 1e-12, "lambda {lambda}");
    }
}

#[test]
fn ball_total_energy_is_the_ball_curve() {
    let BallCurveParams { p, q } = BallCurveParams::coulomb();
    for a in [0.1, 1.0, 2.5, 7.0, 40.0] {
        let r = (3.0 * a / (4.0 * PI)).cbrt();
        let s = Shape::Balls(BallConfiguration::single(Ball::new([0.0; 3], r)));
        let e = total_energy(&s, &RieszParams::coulomb()).unwrap();
        let expected = p * a.powf(2.0 / 3.0) + q * a.powf(5.0 / 3.0);
        assert!((e.total / expected - 1.0).abs() < 1e-12);
    }
}
