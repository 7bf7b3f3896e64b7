mod common;

use common::{from_na, matrix_log, random_pose, rng, to_na, twist_matrix};
use demosuff::geometry::{sclerp, screw_exp, screw_log, OrientationSet, Pose, Quat, Region, Vec3};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn compose_associativity_against_matrix_product() {
    let mut r = rng(11);
    for _ in 0..200 {
        let (a, b, c) = (random_pose(&mut r, 2.0), random_pose(&mut r, 2.0), random_pose(&mut r, 2.0));
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        let oracle = from_na(&(to_na(&a) * to_na(&b) * to_na(&c)));
        assert!(left.distance(&right) < 1e-9);
        assert!(left.distance(&oracle) < 1e-9);
    }
}

#[test]
fn screw_log_matches_matrix_logarithm() {
    let mut r = rng(12);
    let mut checked = 0;
    while checked < 200 {
        let g = random_pose(&mut r, 1.0);
        if g.rotation().angle() > 3.0 {
            continue;
        }
        let log = matrix_log(&to_na(&g));
        let (omega, v) = screw_log(&g).twist();
        let ours = twist_matrix(omega, v);
        let diff = (ours - log).abs().max();
        assert!(diff < 1e-8, "component difference {diff} for {g:?}");
        checked += 1;
    }
}

#[test]
fn sclerp_matches_matrix_exponential() {
    let mut r = rng(13);
    for _ in 0..200 {
        let g1 = random_pose(&mut r, 1.0);
        let g2 = random_pose(&mut r, 1.0);
        let rel = screw_log(&g1.relative_to(&g2));
        let (omega, v) = rel.twist();
        let oracle = to_na(&g1) * (twist_matrix(omega, v) * 0.37).exp();
        let ours = sclerp(&g1, &g2, 0.37);
        assert!(ours.distance(&from_na(&oracle)) < 1e-8);
    }
}

#[test]
fn log_exp_round_trip_on_random_poses() {
    let mut r = rng(14);
    for _ in 0..1000 {
        let g = random_pose(&mut r, 3.0);
        assert!(screw_exp(&screw_log(&g), 1.0).distance(&g) < 1e-9);
    }
}

#[test]
fn sclerp_preserves_screw_axis() {
    let mut r = rng(15);
    for _ in 0..100 {
        let g1 = random_pose(&mut r, 1.0);
        let g2 = random_pose(&mut r, 1.0);
        let reference = screw_log(&g1.relative_to(&g2));
        if reference.is_identity || reference.angle < 1e-3 {
            continue;
        }
        for k in 1..10 {
            let tau = k as f64 / 10.0;
            let s = screw_log(&g1.relative_to(&sclerp(&g1, &g2, tau)));
            assert!((s.axis_direction - reference.axis_direction).max_abs() < 1e-7);
            assert!((s.axis_point - reference.axis_point).max_abs() < 1e-7);
        }
    }
}

#[test]
fn near_half_turn_axis_extraction() {
    let axis = Vec3::new(0.2, -0.5, 0.7).try_normalize(0.0).unwrap();
    for angle in [std::f64::consts::PI - 1e-7, std::f64::consts::PI] {
        let g = Pose::new(Quat::from_axis_angle(axis, angle), Vec3::new(0.1, 0.2, 0.3));
        let s = screw_log(&g);
        assert!((s.axis_direction.dot(&axis).abs() - 1.0).abs() < 1e-9);
        assert!(screw_exp(&s, 1.0).distance(&g) < 1e-9);
    }
}

#[test]
fn octant_uniformity_chi_square() {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let region =
        Region::new(Vec3::new(0.0, -1.0, 2.0), Vec3::new(1.0, 1.0, 2.5), OrientationSet::Fixed(Quat::identity()))
            .unwrap();
    let c = region.center();
    let mut counts = [0usize; 8];
    let mut r = rng(16);
    let n = 100_000;
    for _ in 0..n {
        let p = region.sample(&mut r).translation();
        let idx = usize::from(p.x >= c.x) | usize::from(p.y >= c.y) << 1 | usize::from(p.z >= c.z) << 2;
        counts[idx] += 1;
    }
    let expected = n as f64 / 8.0;
    let stat: f64 = counts.iter().map(|&k| (k as f64 - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(7.0).unwrap().inverse_cdf(0.99);
    assert!(stat < critical, "chi-square {stat} >= {critical}");
}

proptest! {
    #[test]
    fn canonical_form_is_stable(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_pose(&mut r, 2.0);
        prop_assert!(g.rotation().w >= 0.0);
        let round = screw_exp(&screw_log(&g), 1.0);
        prop_assert!(round.rotation().w >= 0.0);
        let inv = g.inverse();
        prop_assert!(inv.rotation().w >= 0.0);
    }

    #[test]
    fn sclerp_endpoints_are_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g1 = random_pose(&mut r, 2.0);
        let g2 = random_pose(&mut r, 2.0);
        prop_assert!(sclerp(&g1, &g2, 0.0).distance(&g1) < 1e-12);
        prop_assert!(sclerp(&g1, &g2, 1.0).distance(&g2) < 1e-12);
        let tau: f64 = r.random();
        prop_assert!(sclerp(&g1, &g2, tau).is_finite());
    }
}
