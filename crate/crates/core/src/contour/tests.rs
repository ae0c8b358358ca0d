use std::f64::consts::PI;
use std::io::Write;

use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::synthetic::{circle_points, ellipse_points, random_curve, square_points};

fn raw(points: Vec<Point>) -> RawContour {
    RawContour::new("t", points, Label::Unlabeled("t".into())).unwrap()
}

fn unit_square() -> RawContour {
    raw(square_points(1.0, 1))
}

fn assert_normalized_invariants(c: &NormalizedCurve) {
    let pts = c.points();
    let len = geometry::perimeter(pts);
    assert!((len - 1.0).abs() < 1e-9, "length {len}");
    let m = geometry::mean(pts);
    assert!(m.norm() < 1e-9, "centroid {m:?}");
    let edges = c.edge_lengths();
    let h = 1.0 / c.n() as f64;
    for e in &edges {
        assert!(((e - h) / h).abs() < 1e-6, "edge {e} vs {h}");
    }
    assert!(geometry::signed_area(pts) > 0.0);
    let max_x = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    assert!(pts[0].x >= max_x - 1e-12);
}

/// Arc-length position of `p` along a closed polygon: the oracle projects the
/// point onto the nearest edge.
fn arc_position(poly: &[Point], p: Point) -> f64 {
    let m = poly.len();
    let mut acc = 0.0;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        let d = b - a;
        let t = ((p - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        let dist = (a + d * t - p).norm();
        if dist < best.0 {
            best = (dist, acc + t * d.norm());
        }
        acc += d.norm();
    }
    assert!(best.0 < 1e-12, "point not on polygon");
    best.1
}

#[test]
fn too_few_points_is_degenerate() {
    let err = RawContour::new("x", vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)], Label::Normal)
        .unwrap_err();
    assert!(err.to_string().contains("degenerate contour"));
    // Duplicates are removed before counting.
    let err = RawContour::new(
        "x",
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 0.0)],
        Label::Normal,
    )
    .unwrap_err();
    assert!(matches!(err, ContourError::Degenerate { count: 2, .. }));
}

#[test]
fn self_intersecting_contour_rejected() {
    let bowtie = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
    assert!(matches!(
        RawContour::new("b", bowtie, Label::Normal),
        Err(ContourError::SelfIntersecting { .. })
    ));
}

#[test]
fn orient_ccw_cases() {
    let ccw = unit_square();
    assert_eq!(orient_ccw(&ccw).unwrap(), ccw);

    let mut pts = square_points(1.0, 1);
    pts.reverse();
    let cw = raw(pts);
    let fixed = orient_ccw(&cw).unwrap();
    assert!(fixed.signed_area() > 0.0);
    let mut a: Vec<_> = fixed.points().iter().map(|p| (p.x, p.y)).collect();
    let mut b: Vec<_> = cw.points().iter().map(|p| (p.x, p.y)).collect();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(a, b);

    let line = RawContour {
        id: "line".into(),
        label: Label::Normal,
        points: vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)],
    };
    assert!(matches!(orient_ccw(&line), Err(ContourError::Collinear { .. })));
}

#[test]
fn resample_square_corners_and_midpoints() {
    let sq = unit_square();
    let four = resample_equidistant(&sq, 4).unwrap();
    for (p, q) in four.points().iter().zip(sq.points()) {
        assert!((p - q).norm() < 1e-12);
    }
    let eight = resample_equidistant(&sq, 8).unwrap();
    let expected = [
        (0.0, 0.0),
        (0.5, 0.0),
        (1.0, 0.0),
        (1.0, 0.5),
        (1.0, 1.0),
        (0.5, 1.0),
        (0.0, 1.0),
        (0.0, 0.5),
    ];
    for (p, e) in eight.points().iter().zip(expected) {
        assert!((p - Point::new(e.0, e.1)).norm() < 1e-12, "{p:?} vs {e:?}");
    }
    assert!(matches!(resample_equidistant(&sq, 2), Err(ContourError::SampleCount(2))));
}

#[test]
fn resample_dense_circle_is_uniform() {
    let poly = circle_points(1000, 3.0);
    let c = raw(poly.clone());
    let r = resample_equidistant(&c, 295).unwrap();
    assert_eq!(r.len(), 295);
    assert_eq!(r.points()[0], poly[0]);
    let chords: Vec<f64> = (0..295).map(|i| (r.points()[(i + 1) % 295] - r.points()[i]).norm()).collect();
    let mean = chords.iter().sum::<f64>() / 295.0;
    let dev = chords.iter().map(|c| ((c - mean) / mean).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-6, "chord deviation {dev}");
    // The arc-length oracle: positions along the source polygon advance by
    // (nearly) the same amount. Chords cut across source vertices, so the
    // arc steps agree with L/n only to second order in the vertex angle.
    let total = geometry::perimeter(&poly);
    let pos: Vec<f64> = r.points().iter().map(|p| arc_position(&poly, *p)).collect();
    for i in 0..294 {
        let step = pos[i + 1] - pos[i];
        assert!(((step - total / 295.0) / (total / 295.0)).abs() < 1e-4);
    }
}

#[test]
fn principal_axis_cases() {
    let e = ellipse_points(400, 4.0, 1.0);
    let axis = principal_axis(&e);
    assert!(!axis.degenerate);
    assert!(axis.angle.abs() < 1e-12 || (axis.angle - PI).abs() < 1e-12);

    // Uniform-parameter samples of an ellipse have zero cross moment, so the
    // rotated covariance has its eigenvector exactly at the rotation angle.
    let rot = 37.0f64.to_radians();
    let rotated = geometry::rotate_all(&e, rot);
    assert_relative_eq!(principal_axis(&rotated).angle, rot, epsilon = 1e-6);

    let circle = principal_axis(&circle_points(400, 2.0));
    assert!(circle.degenerate);
    assert_eq!(circle.angle, 0.0);
}

#[test]
fn normalize_circle_any_pose() {
    let base = raw(circle_points(590, 1.0));
    let moved = base.transformed(7.5, 0.0, Point::new(-3.0, 12.0));
    for c in [&base, &moved] {
        let nc = normalize(c, 295).unwrap();
        assert_normalized_invariants(&nc);
        assert!(nc.meta().degenerate_axis);
        // Circumradius of a regular 295-gon of unit perimeter.
        let expected = 1.0 / (2.0 * 295.0 * (PI / 295.0).sin());
        assert_relative_eq!(expected, 1.0 / (2.0 * PI), max_relative = 1e-4);
        for p in nc.points() {
            assert!((p.norm() - expected).abs() < 1e-9);
        }
    }
    // Off-grid source polygon: samples sit on chords of the 720-gon.
    let nc = normalize(&raw(circle_points(720, 4.0)), 295).unwrap();
    for p in nc.points() {
        assert_relative_eq!(p.norm(), 1.0 / (2.0 * PI), max_relative = 1e-4);
    }
}

#[test]
fn normalize_aligns_tilted_ellipse() {
    let rot = 37.0f64.to_radians();
    let c = raw(ellipse_points(600, 4.0, 1.0)).transformed(2.0, rot, Point::new(1.0, -1.0));
    let nc = normalize(&c, 295).unwrap();
    assert_normalized_invariants(&nc);
    let axis = principal_axis(nc.points());
    assert!(axis.angle < 1e-9 || PI - axis.angle < 1e-9, "axis {}", axis.angle);
    let applied = nc.meta().rotation.rem_euclid(PI);
    assert!((applied - rot).abs() < 1e-6, "recorded rotation {applied}");
    // Start is the (a, 0) vertex of the ellipse.
    assert!(nc.points()[0].y.abs() < 1e-9);
    assert!(nc.points()[0].x > 0.0);
}

#[test]
fn normalize_is_idempotent() {
    let c = raw(ellipse_points(500, 3.0, 1.0)).transformed(1.0, 0.3, Point::new(0.0, 0.0));
    let once = normalize(&c, 295).unwrap();
    let twice = normalize(&once.to_raw(), 295).unwrap();
    assert!(geometry::max_point_error(once.points(), twice.points()) < 1e-9);
}

#[test]
fn align_fixes_start_on_shifted_ellipse() {
    let canonical = normalize(&raw(ellipse_points(800, 4.0, 1.0)), 295).unwrap();
    let start = canonical.points()[0];
    let max_x = canonical.points().iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(start.x, max_x);
    assert!(start.y.abs() < 1e-12);

    for shift in [57, 140] {
        let again = align_and_fix_start(&canonical.shifted(shift).to_raw());
        assert!(geometry::max_point_error(again.points(), canonical.points()) < 1e-12);
    }
}

#[test]
fn align_circle_starts_at_max_x() {
    let canonical = normalize(&raw(circle_points(590, 1.0)), 295).unwrap();
    let again = align_and_fix_start(&canonical.shifted(100).to_raw());
    assert_eq!(again.meta().rotation, 0.0);
    let max_x = again.points().iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    assert!(again.points()[0].x >= max_x - 1e-15);
}

#[test]
fn load_manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cell = dir.path().join("cellA.csv");
    std::fs::write(&cell, "0,0\n1,0\n0.5,1\n").unwrap();
    let manifest = dir.path().join("manifest.csv");
    std::fs::write(&manifest, "path,label\ncellA.csv,Normal\ncellA.csv,leafy\n").unwrap();
    let cs = load_contours(&manifest).unwrap();
    assert_eq!(cs.len(), 2);
    assert_eq!(cs[0].len(), 3);
    assert_eq!(cs[0].label(), &Label::Normal);
    assert_eq!(cs[0].id(), "cellA");
    assert_eq!(cs[1].label(), &Label::Unlabeled("leafy".into()));
}

#[test]
fn load_manifest_errors_name_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        let mut f = std::fs::File::create(&p).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        p
    };
    write("two.csv", "0,0\n1,0\n");
    write("bad.csv", "0,0\n1,zz\n0,1\n");
    write("ok.csv", "0,0\n1,0\n0,1\n");

    let m = write("m1.csv", "path,label\nok.csv,Normal\ntwo.csv,Sickle\n");
    let msg = load_contours(&m).unwrap_err().to_string();
    assert!(msg.contains("row 3") && msg.contains("degenerate contour"), "{msg}");

    let m = write("m2.csv", "path,label\nmissing.csv,Normal\n");
    let msg = load_contours(&m).unwrap_err().to_string();
    assert!(msg.contains("row 2") && msg.contains("missing.csv"), "{msg}");

    let m = write("m3.csv", "path,label\nbad.csv,Other\n");
    let msg = load_contours(&m).unwrap_err().to_string();
    assert!(msg.contains("row 2") && msg.contains("line 2"), "{msg}");

    let m = write("m4.csv", "path,label\nok.csv,Normal,extra\n");
    assert!(matches!(load_contours(&m), Err(ContourError::Manifest { row: 2, .. })));

    assert!(matches!(load_contours(dir.path().join("nope.csv")), Err(ContourError::Io { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_pose_and_start(
        seed in any::<u64>(),
        shift in 0usize..300,
        scale in 0.1f64..10.0,
        angle in 0.0f64..(2.0 * PI),
        dx in -50.0f64..50.0,
        dy in -50.0f64..50.0,
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = random_curve(&mut rng, 300, "r".into());
        let base = normalize(&c, 295).unwrap();
        prop_assume!(!base.meta().degenerate_axis);
        let (sx, sy) = orientation_skew(base.points());
        prop_assume!(sx.abs().max(sy.abs()) > 1e-2);
        let moved = c.shifted(shift).transformed(scale, angle, Point::new(dx, dy));
        let other = normalize(&moved, 295).unwrap();
        prop_assert!(geometry::max_point_error(base.points(), other.points()) < 1e-4);
        let again = normalize(&base.to_raw(), 295).unwrap();
        prop_assert!(geometry::max_point_error(base.points(), again.points()) < 1e-9);
    }
}
