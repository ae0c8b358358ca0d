use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::contour::{normalize, Label, RawContour};
use crate::geometry::max_point_error;
use crate::synthetic::{circle_points, ellipse_points, random_curve};

fn canonical(points: Vec<Point>, n: usize) -> NormalizedCurve {
    let raw = RawContour::new("t", points, Label::Unlabeled("t".into())).unwrap();
    normalize(&raw, n).unwrap()
}

fn circle(n: usize) -> NormalizedCurve {
    canonical(circle_points(4000, 1.0), n)
}

fn ellipse(n: usize) -> NormalizedCurve {
    canonical(ellipse_points(4000, 2.0, 0.5), n)
}

fn random_pair(seed: u64, n: usize) -> (NormalizedCurve, NormalizedCurve) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = normalize(&random_curve(&mut rng, 240, "a".into()), n).unwrap();
    let b = normalize(&random_curve(&mut rng, 240, "b".into()), n).unwrap();
    (a, b)
}

#[test]
fn circle_has_unit_speed_and_closes() {
    let s = to_srvf(&circle(295)).unwrap();
    for v in s.q() {
        assert!((v.norm() - 1.0).abs() < 1e-3);
    }
    assert!(s.closure_residual().norm() < 1e-3);
}

#[test]
fn srvf_has_unit_norm() {
    let (a, _) = random_pair(1, 295);
    for c in [a, ellipse(295), circle(101)] {
        assert!((to_srvf(&c).unwrap().norm_sq() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn stationary_point_is_rejected() {
    let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
    assert_eq!(from_points(&pts).unwrap_err(), SrvfError::Stationary { index: 0 });
}

#[test]
fn round_trip_reproduces_the_curve() {
    let (a, _) = random_pair(2, 295);
    for c in [circle(295), ellipse(295), a] {
        let back = from_srvf(&to_srvf(&c).unwrap());
        let err = max_point_error(&back, c.points());
        assert!(err < 1e-3, "{err}");
    }
}

#[test]
fn circle_round_trip_keeps_radius() {
    let back = from_srvf(&to_srvf(&circle(295)).unwrap());
    for p in &back {
        assert!((p.norm() - 1.0 / (2.0 * PI)).abs() < 1e-3);
    }
}

#[test]
fn constant_q_is_an_open_segment() {
    let s = SrvfCurve::from_samples(vec![Point::new(1.0, 0.0); 50]);
    let pts = from_srvf(&s);
    assert!(pts.iter().all(|p| p.y.abs() < 1e-15));
    assert!((pts[49].x - pts[0].x - 49.0 / 50.0).abs() < 1e-12);
    assert!((s.closure_residual() - Point::new(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn projection_fixes_closed_curves() {
    let s = to_srvf(&ellipse(295)).unwrap();
    let p = project_closed(&s).unwrap();
    let moved = s.q().iter().zip(p.q()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(moved < 1e-6);
}

#[test]
fn projection_closes_a_perturbed_curve() {
    let (a, _) = random_pair(3, 295);
    let s = to_srvf(&a).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    use rand_distr::{Distribution, StandardNormal};
    let noisy: Vec<Point> = s
        .q()
        .iter()
        .map(|v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let w: f64 = StandardNormal.sample(&mut rng);
            v + Point::new(z, w) * 0.01
        })
        .collect();
    let noisy = SrvfCurve::from_samples(noisy);
    assert!(noisy.closure_residual().norm() > 1e-4);
    let p = project_closed(&noisy).unwrap();
    assert!(p.closure_residual().norm() < 1e-6);
    assert!((p.norm_sq() - 1.0).abs() < 1e-9);
}

#[test]
fn projection_never_returns_an_open_segment() {
    let s = SrvfCurve::from_samples(vec![Point::new(1.0, 0.0); 50]);
    match project_closed(&s) {
        Ok(p) => assert!(p.closure_residual().norm() < 1e-6),
        Err(SrvfError::NoConvergence { residual }) => assert!(residual >= 1e-6),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn sphere_distance_extremes() {
    let s = to_srvf(&ellipse(295)).unwrap();
    assert!(sphere_distance(&s, &s).unwrap() < 1e-6);
    let neg = s.rotated(&(-Matrix2::identity()));
    assert!((sphere_distance(&s, &neg).unwrap() - PI).abs() < 1e-6);
    let other = to_srvf(&circle(100)).unwrap();
    assert_eq!(
        sphere_distance(&s, &other).unwrap_err(),
        SrvfError::GridMismatch { left: 295, right: 100 }
    );
}

/// Tangent angles of the unit-length ellipse `(a cos φ, b sin φ)` at arc
/// length `j/n` from `(a, 0)`, from a dense Simpson arc-length table.
fn tangent_oracle(a: f64, b: f64, n: usize) -> Vec<f64> {
    let dense = 1 << 20;
    let speed = |phi: f64| (a * phi.sin()).hypot(b * phi.cos());
    let h = 2.0 * PI / dense as f64;
    let mut cum = vec![0.0; dense + 1];
    for i in 0..dense {
        let (p0, p1) = (i as f64 * h, (i + 1) as f64 * h);
        cum[i + 1] = cum[i] + h / 6.0 * (speed(p0) + 4.0 * speed(0.5 * (p0 + p1)) + speed(p1));
    }
    let total = cum[dense];
    (0..n)
        .map(|j| {
            let target = j as f64 / n as f64 * total;
            let i = cum.partition_point(|c| *c < target).max(1) - 1;
            let phi = (i as f64 + (target - cum[i]) / (cum[i + 1] - cum[i]).max(1e-300)) * h;
            (b * phi.cos()).atan2(-a * phi.sin())
        })
        .collect()
}

#[test]
fn circle_ellipse_distance_matches_quadrature() {
    // Arc-length parameterized unit-length curves have |β'| = 1, so q is the
    // unit tangent and ⟨q₁, q₂⟩ = ∫ cos(θ₁ − θ₂).
    let n = 4096;
    let tc = tangent_oracle(1.0, 1.0, n);
    let te = tangent_oracle(2.0, 0.5, n);
    let inner: f64 = tc.iter().zip(&te).map(|(x, y)| (x - y).cos()).sum::<f64>() / n as f64;
    let oracle = inner.abs().acos();
    let d = srvf_distance_fixed(&circle(295), &ellipse(295), RotationMode::FlipOnly).unwrap();
    assert!((d - oracle).abs() < 1e-3, "{d} vs {oracle}");
}

#[test]
fn flip_alignment_undoes_a_half_turn() {
    let a = closed_srvf(&ellipse(295)).unwrap();
    let b = a.rotated(&(-Matrix2::identity()));
    let r = align_rotation(&a, &b, RotationMode::FlipOnly).unwrap();
    assert_eq!(r.rotation, -Matrix2::identity());
    assert!(fixed_distance(&a, &b, RotationMode::FlipOnly).unwrap() < 1e-6);
    for mode in [RotationMode::None, RotationMode::FlipOnly, RotationMode::Procrustes] {
        let same = align_rotation(&a, &a, mode).unwrap();
        assert!((same.rotation - Matrix2::identity()).norm() < 1e-12);
        assert!(fixed_distance(&a, &a, mode).unwrap() < 1e-6);
    }
}

#[test]
fn procrustes_recovers_an_arbitrary_rotation() {
    let (c, _) = random_pair(4, 295);
    let a = closed_srvf(&c).unwrap();
    let b = a.rotated(&geometry::rotation(1.1));
    let r = align_rotation(&a, &b, RotationMode::Procrustes).unwrap();
    assert!((r.rotation - geometry::rotation(-1.1)).norm() < 1e-9);
    assert!((r.rotation.determinant() - 1.0).abs() < 1e-10);
    assert!(fixed_distance(&a, &b, RotationMode::Procrustes).unwrap() < 1e-6);
    let aligned = r.apply(&b);
    assert!(sphere_distance(&a, &aligned).unwrap() < 1e-6);
}

#[test]
fn fixed_distance_is_symmetric_and_zero_on_self() {
    let (a, b) = random_pair(5, 295);
    for mode in [RotationMode::None, RotationMode::FlipOnly, RotationMode::Procrustes] {
        let ab = srvf_distance_fixed(&a, &b, mode).unwrap();
        let ba = srvf_distance_fixed(&b, &a, mode).unwrap();
        assert!((ab - ba).abs() < 1e-9);
        assert!(srvf_distance_fixed(&a, &a, mode).unwrap() < 1e-6);
    }
}

#[test]
fn shift_search_recovers_a_start_shift() {
    let (c, _) = random_pair(6, 295);
    let a = closed_srvf(&c).unwrap();
    let b = a.shifted(40);
    let opts = ElasticOptions { shift_step: 5, rotation: RotationMode::FlipOnly, ..Default::default() };
    let r = elastic_distance(&a, &b, &opts).unwrap();
    assert!(r.d < 1e-6);
    assert_eq!(r.alignment.shift, 255);
}

#[test]
fn unit_step_search_is_brute_force() {
    let (a, b) = random_pair(7, 120);
    let (a, b) = (closed_srvf(&a).unwrap(), closed_srvf(&b).unwrap());
    for rotation in [RotationMode::None, RotationMode::FlipOnly, RotationMode::Procrustes] {
        let opts = ElasticOptions { shift_step: 1, rotation, use_dp: false, dp_grid: DpGrid::Banded };
        let fast = elastic_distance(&a, &b, &opts).unwrap().d;
        let brute = (0..120)
            .map(|s| fixed_distance(&a, &b.shifted(s), rotation).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(fast, brute);
    }
}

#[test]
fn dp_recovers_a_known_warp() {
    let n = 200;
    let (c, _) = random_pair(8, n);
    let a = closed_srvf(&c).unwrap();
    // Reparameterize `a` by a smooth increasing map with fixed ends.
    let gamma: Vec<f64> = (0..=n)
        .map(|j| {
            let t = j as f64 / n as f64;
            t + 0.04 * (2.0 * PI * t).sin()
        })
        .collect();
    let b = dp::reparameterize(a.q(), &gamma);
    let rigid = ElasticOptions { shift_step: 1, rotation: RotationMode::FlipOnly, use_dp: false, dp_grid: DpGrid::Banded };
    let warped = ElasticOptions { use_dp: true, ..rigid };
    let d_rigid = elastic_distance(&a, &b, &rigid).unwrap().d;
    let r = elastic_distance(&a, &b, &warped).unwrap();
    assert!(r.alignment.used_dp);
    assert!(r.d < 0.5 * d_rigid, "{} vs {d_rigid}", r.d);
    let g = r.alignment.gamma.as_ref().unwrap();
    assert_eq!(g.len(), n + 1);
    assert_eq!(g[0], 0.0);
    assert_eq!(g[n], 1.0);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
    let full = ElasticOptions { dp_grid: DpGrid::Full, ..warped };
    assert!(elastic_distance(&a, &b, &full).unwrap().d <= r.d + 1e-12);
}

#[test]
fn geodesic_endpoints_and_monotone_frames() {
    let a = closed_srvf(&circle(295)).unwrap();
    let b0 = closed_srvf(&ellipse(295)).unwrap();
    let align = align_rotation(&a, &b0, RotationMode::FlipOnly).unwrap();
    let b = align.apply(&b0);
    let frames = srvf_geodesic(&a, &b, 5).unwrap();
    assert_eq!(frames.len(), 7);
    assert!(max_point_error(&frames[0], &from_srvf(&a)) < 1e-3);
    assert!(max_point_error(&frames[6], &from_srvf(&b)) < 1e-3);
    let to_end: Vec<f64> = frames
        .iter()
        .map(|f| sphere_distance(&closed(f), &b).unwrap())
        .collect();
    assert!(to_end.windows(2).all(|w| w[1] < w[0]), "{to_end:?}");
}

fn closed(points: &[Point]) -> SrvfCurve {
    project_closed(&from_points(points).unwrap()).unwrap()
}

#[test]
fn geodesic_to_self_is_constant() {
    let a = closed_srvf(&ellipse(101)).unwrap();
    let frames = srvf_geodesic(&a, &a, 3).unwrap();
    let first = from_srvf(&a);
    for f in &frames {
        assert!(max_point_error(f, &first) < 1e-12);
    }
    let neg = a.rotated(&(-Matrix2::identity()));
    assert_eq!(srvf_geodesic(&a, &neg, 3).unwrap_err(), SrvfError::NonUniqueGeodesic);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn distance_ordering_chain(seed in any::<u64>()) {
        let (a, b) = random_pair(seed, 151);
        let (a, b) = (closed_srvf(&a).unwrap(), closed_srvf(&b).unwrap());
        let none = fixed_distance(&a, &b, RotationMode::None).unwrap();
        let flip = fixed_distance(&a, &b, RotationMode::FlipOnly).unwrap();
        let proc = fixed_distance(&a, &b, RotationMode::Procrustes).unwrap();
        prop_assert!(proc <= flip && flip <= none);
        let shift = ElasticOptions { shift_step: 5, rotation: RotationMode::Procrustes, use_dp: false, dp_grid: DpGrid::Banded };
        let with_dp = ElasticOptions { use_dp: true, ..shift };
        let d_shift = elastic_distance(&a, &b, &shift).unwrap().d;
        let d_dp = elastic_distance(&a, &b, &with_dp).unwrap().d;
        prop_assert!(d_dp <= d_shift && d_shift <= flip);
        prop_assert!(d_dp >= 0.0 && none <= PI);
    }
}
