//! Synthetic contours for tests, benchmarks and demos.
//!
//! Noise is a smooth random radial modulation (harmonics 2 through 6) whose
//! RMS amplitude is the requested fraction of the radius. Contours from
//! active-contour segmentation are smooth, so per-vertex jitter would
//! overstate what real data looks like to derivative-based metrics.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::contour::{Label, RawContour};
use crate::geometry::Point;

/// Regular polygon approximating a circle, first vertex at angle 0.
pub fn circle_points(vertices: usize, radius: f64) -> Vec<Point> {
    (0..vertices)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / vertices as f64;
            Point::new(radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// Axis-aligned ellipse sampled uniformly in the angular parameter, first
/// vertex at `(a, 0)`.
pub fn ellipse_points(vertices: usize, a: f64, b: f64) -> Vec<Point> {
    (0..vertices)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / vertices as f64;
            Point::new(a * t.cos(), b * t.sin())
        })
        .collect()
}

/// Counterclockwise square `[0, side]²` with `per_side` vertices on each edge,
/// starting at the origin corner.
pub fn square_points(side: f64, per_side: usize) -> Vec<Point> {
    let corners = [
        Point::new(0.0, 0.0),
        Point::new(side, 0.0),
        Point::new(side, side),
        Point::new(0.0, side),
    ];
    let mut out = Vec::with_capacity(4 * per_side);
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        for j in 0..per_side {
            out.push(a + (b - a) * (j as f64 / per_side as f64));
        }
    }
    out
}

/// Shape families of the synthetic three-class corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeKind {
    Circle,
    Ellipse { aspect: f64 },
    Square,
}

impl ShapeKind {
    /// Class label used for this family in the three-class corpus.
    pub fn label(self) -> Label {
        match self {
            ShapeKind::Circle => Label::Normal,
            ShapeKind::Ellipse { .. } => Label::Sickle,
            ShapeKind::Square => Label::OtherDeformation,
        }
    }

    fn base_points(self, vertices: usize) -> Vec<Point> {
        match self {
            ShapeKind::Circle => circle_points(vertices, 1.0),
            ShapeKind::Ellipse { aspect } => ellipse_points(vertices, aspect.sqrt(), 1.0 / aspect.sqrt()),
            ShapeKind::Square => {
                let per_side = (vertices / 4).max(1);
                square_points(2.0, per_side).into_iter().map(|p| p - Point::new(1.0, 1.0)).collect()
            }
        }
    }
}

/// Smooth radial modulation `1 + Σ c_k cos(kφ + φ_k)`, RMS ≈ `noise`.
fn radial_noise<R: Rng>(rng: &mut R, noise: f64) -> impl Fn(f64) -> f64 {
    let harmonics: Vec<(f64, f64, f64)> = (2..=6)
        .map(|k| {
            let z: f64 = StandardNormal.sample(rng);
            let phase = rng.random_range(0.0..2.0 * PI);
            (k as f64, noise * (2.0f64 / 5.0).sqrt() * z, phase)
        })
        .collect();
    move |phi| 1.0 + harmonics.iter().map(|(k, c, ph)| c * (k * phi + ph).cos()).sum::<f64>()
}

/// One noisy instance of `kind` under a random similarity transform and a
/// random start vertex.
pub fn noisy_shape<R: Rng>(kind: ShapeKind, noise: f64, vertices: usize, rng: &mut R, id: String) -> RawContour {
    let modulation = radial_noise(rng, noise);
    let mut points: Vec<Point> = kind
        .base_points(vertices)
        .into_iter()
        .map(|p| p * modulation(p.y.atan2(p.x)))
        .collect();
    let start = rng.random_range(0..points.len());
    points.rotate_left(start);
    let scale = rng.random_range(0.5..3.0);
    let angle = rng.random_range(0.0..2.0 * PI);
    let offset = Point::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
    RawContour::new(id, points, kind.label())
        .expect("synthetic shapes are simple")
        .transformed(scale, angle, offset)
}

/// Circle / 4:1 ellipse / square corpus, `per_class` of each, labeled
/// Normal / Sickle / Other.
pub fn three_class_corpus(per_class: usize, noise: f64, seed: u64) -> Vec<RawContour> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [ShapeKind::Circle, ShapeKind::Ellipse { aspect: 4.0 }, ShapeKind::Square];
    let mut out = Vec::with_capacity(3 * per_class);
    for kind in kinds {
        for i in 0..per_class {
            let id = format!("{}-{i:03}", kind.label().name().to_ascii_lowercase());
            out.push(noisy_shape(kind, noise, 240, &mut rng, id));
        }
    }
    out
}

/// A random smooth simple closed curve: a star-shaped radial Fourier series,
/// stretched by a random factor and placed at a random pose.
pub fn random_curve<R: Rng>(rng: &mut R, vertices: usize, id: String) -> RawContour {
    let harmonics: Vec<(f64, f64, f64)> = (2..=5)
        .map(|k| {
            let amp = rng.random_range(0.0..0.25) / k as f64;
            (k as f64, amp, rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let stretch = rng.random_range(1.0..2.5);
    let mut points: Vec<Point> = (0..vertices)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / vertices as f64;
            let r = 1.0 + harmonics.iter().map(|(k, a, ph)| a * (k * phi + ph).cos()).sum::<f64>();
            Point::new(stretch * r * phi.cos(), r * phi.sin())
        })
        .collect();
    let start = rng.random_range(0..vertices);
    points.rotate_left(start);
    let angle = rng.random_range(0.0..2.0 * PI);
    let scale = rng.random_range(0.5..2.0);
    let offset = Point::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    RawContour::new(id, points, Label::Unlabeled("random".into()))
        .expect("star-shaped curves are simple")
        .transformed(scale, angle, offset)
}

/// `count` random curves from a seeded generator.
pub fn random_curves(count: usize, vertices: usize, seed: u64) -> Vec<RawContour> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|i| random_curve(&mut rng, vertices, format!("random-{i:04}"))).collect()
}
