//! Contour ingestion and canonicalization.
//!
//! A [`RawContour`] is whatever polygon came off disk. [`normalize`] turns it
//! into a [`NormalizedCurve`]: counterclockwise, `n` samples with equal
//! spacing, centroid at the origin, unit length, major axis along `x`, and
//! the sample of largest `x` first. Every shape-space distance in this crate
//! works on normalized curves, so two curves agree on all of these
//! conventions before any distance is taken.

mod io;
mod resample;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Point};

pub use io::{load_contours, read_contour_file, write_contour_file, write_manifest, ManifestRow};
pub use resample::resample_closed;

/// Sample count used for every curve unless configured otherwise.
pub const DEFAULT_SAMPLES: usize = 295;

/// Relative eigenvalue gap below which the covariance is treated as isotropic.
const AXIS_GAP: f64 = 1e-12;
const MAX_CANONICAL_PASSES: usize = 8;
const SKEW_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum ContourError {
    #[error("degenerate contour `{id}`: {count} distinct points, need at least 3")]
    Degenerate { id: String, count: usize },
    #[error("degenerate (collinear) contour `{id}`")]
    Collinear { id: String },
    #[error("contour `{id}` is not simple: edges {first} and {second} intersect")]
    SelfIntersecting { id: String, first: usize, second: usize },
    #[error("contour `{id}` contains a non-finite coordinate")]
    NonFinite { id: String },
    #[error("sample count must be at least 3, got {0}")]
    SampleCount(usize),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest `{path}` row {row}: {message}")]
    Manifest { path: String, row: usize, message: String },
    #[error("contour file `{path}` line {line}: {message}")]
    Parse { path: String, line: usize, message: String },
}

/// Class label of a contour.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Normal,
    Sickle,
    OtherDeformation,
    Unlabeled(String),
}

impl Label {
    /// Parses the manifest spelling. Anything unrecognized is kept verbatim.
    pub fn parse(text: &str) -> Self {
        let t = text.trim();
        match t.to_ascii_lowercase().as_str() {
            "normal" | "n" | "circular" => Label::Normal,
            "sickle" | "s" | "elongated" => Label::Sickle,
            "other" | "od" | "otherdeformation" | "other_deformation" | "other deformation" => {
                Label::OtherDeformation
            }
            _ => Label::Unlabeled(t.to_string()),
        }
    }

    /// Short name used in reports and manifests.
    pub fn name(&self) -> &str {
        match self {
            Label::Normal => "Normal",
            Label::Sickle => "Sickle",
            Label::OtherDeformation => "Other",
            Label::Unlabeled(name) => name,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered simple polygon, closed implicitly from the last point back to
/// the first.
#[derive(Debug, Clone, PartialEq)]
pub struct RawContour {
    id: String,
    label: Label,
    points: Vec<Point>,
}

impl RawContour {
    /// Validates and builds a contour. Consecutive duplicate points (including
    /// a repeated first point at the end) are dropped before the checks.
    pub fn new(
        id: impl Into<String>,
        points: Vec<Point>,
        label: Label,
    ) -> Result<Self, ContourError> {
        let id = id.into();
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(ContourError::NonFinite { id });
        }
        let mut deduped: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if deduped.last() != Some(&p) {
                deduped.push(p);
            }
        }
        while deduped.len() > 1 && deduped.first() == deduped.last() {
            deduped.pop();
        }
        if deduped.len() < 3 {
            return Err(ContourError::Degenerate { id, count: deduped.len() });
        }
        if let Some((first, second)) = geometry::find_self_intersection(&deduped) {
            return Err(ContourError::SelfIntersecting { id, first, second });
        }
        Ok(Self { id, label, points: deduped })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn signed_area(&self) -> f64 {
        geometry::signed_area(&self.points)
    }

    /// Returns a copy with the point list cyclically shifted so that the old
    /// `points[shift]` comes first.
    pub fn shifted(&self, shift: usize) -> Self {
        let mut points = self.points.clone();
        let len = points.len();
        points.rotate_left(shift % len);
        Self { points, ..self.clone() }
    }

    /// Applies `p -> scale * R(angle) p + offset` to every point.
    pub fn transformed(&self, scale: f64, angle: f64, offset: Point) -> Self {
        let r = geometry::rotation(angle);
        let points = self.points.iter().map(|p| r * p * scale + offset).collect();
        Self { points, ..self.clone() }
    }

    fn with_points(&self, points: Vec<Point>) -> Self {
        Self { id: self.id.clone(), label: self.label.clone(), points }
    }
}

/// Provenance carried by a normalized curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub source_id: String,
    pub label: Label,
    /// Rotation (radians) that was applied to the source to put its major
    /// axis on the `x` axis.
    pub rotation: f64,
    /// True when the source had no distinguishable major axis.
    pub degenerate_axis: bool,
}

/// A canonical curve: see the module docs for the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCurve {
    points: Vec<Point>,
    meta: CurveMeta,
}

impl NormalizedCurve {
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn meta(&self) -> &CurveMeta {
        &self.meta
    }

    pub fn id(&self) -> &str {
        &self.meta.source_id
    }

    pub fn label(&self) -> &Label {
        &self.meta.label
    }

    /// Sample count.
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Same curve with its start moved to sample `shift`. The result keeps
    /// every invariant except the start-point rule.
    pub fn shifted(&self, shift: usize) -> Self {
        let mut points = self.points.clone();
        points.rotate_left(shift % self.n());
        Self { points, meta: self.meta.clone() }
    }

    /// Reinterprets the samples as a raw polygon.
    pub fn to_raw(&self) -> RawContour {
        RawContour {
            id: self.meta.source_id.clone(),
            label: self.meta.label.clone(),
            points: self.points.clone(),
        }
    }

    /// Lengths of the `n` edges, including the closing one.
    pub fn edge_lengths(&self) -> Vec<f64> {
        let n = self.n();
        (0..n).map(|i| (self.points[(i + 1) % n] - self.points[i]).norm()).collect()
    }
}

/// Major-axis estimate from a point covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisEstimate {
    /// Angle of the major axis, folded into `[0, π)`.
    pub angle: f64,
    /// Covariance is isotropic; `angle` is reported as 0.
    pub degenerate: bool,
}

/// Direction of the principal eigenvector of the 2×2 covariance of `points`.
pub fn principal_axis(points: &[Point]) -> AxisEstimate {
    let c = geometry::mean(points);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - c;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let half_diff = 0.5 * (sxx - syy);
    let gap = 2.0 * half_diff.hypot(sxy);
    let trace = sxx + syy;
    if !(trace > 0.0) || gap <= AXIS_GAP * trace {
        return AxisEstimate { angle: 0.0, degenerate: true };
    }
    let mut angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    if angle < 0.0 {
        angle += PI;
    }
    if angle >= PI {
        angle -= PI;
    }
    AxisEstimate { angle, degenerate: false }
}

/// Reverses the point order of clockwise contours.
pub fn orient_ccw(c: &RawContour) -> Result<RawContour, ContourError> {
    let area = c.signed_area();
    let scale = geometry::perimeter(c.points()).powi(2);
    if !(area.abs() > 1e-12 * scale) {
        return Err(ContourError::Collinear { id: c.id.clone() });
    }
    if area > 0.0 {
        return Ok(c.clone());
    }
    let mut points = c.points.clone();
    // Keep the first vertex first so the resampling anchor is unchanged.
    points[1..].reverse();
    Ok(c.with_points(points))
}

/// Places `n` points on the polygon, starting at its first vertex, with all
/// `n` consecutive distances (closing edge included) equal.
pub fn resample_equidistant(c: &RawContour, n: usize) -> Result<RawContour, ContourError> {
    if n < 3 {
        return Err(ContourError::SampleCount(n));
    }
    Ok(c.with_points(resample_closed(c.points(), n)))
}

/// Full canonicalization pipeline.
pub fn normalize(c: &RawContour, n: usize) -> Result<NormalizedCurve, ContourError> {
    if n < 3 {
        return Err(ContourError::SampleCount(n));
    }
    let oriented = orient_ccw(c)?;
    let mut canon = canonicalize(oriented.points(), n, false);
    // The major axis fixes the pose only up to a half turn. Prefer the half
    // turn with positive third moments, deciding on the finished samples and
    // redoing the whole pipeline from the source when the other one wins.
    if skew_prefers_flip(&canon.points) {
        canon = canonicalize(oriented.points(), n, true);
    }
    let meta = CurveMeta {
        source_id: c.id.clone(),
        label: c.label.clone(),
        rotation: wrap_angle(canon.rotation),
        degenerate_axis: canon.degenerate,
    };
    Ok(NormalizedCurve { points: canon.points, meta })
}

struct Canonical {
    points: Vec<Point>,
    rotation: f64,
    degenerate: bool,
}

fn canonicalize(source: &[Point], n: usize, half_turn: bool) -> Canonical {
    let mut points = source.to_vec();
    let mut rotation = 0.0;
    let mut degenerate = false;
    for pass in 0..MAX_CANONICAL_PASSES {
        let step = canonical_pass(&points, n, half_turn && pass == 0);
        points = step.points;
        rotation += step.rotation;
        if pass == 0 {
            degenerate = step.degenerate;
        }
        if pass > 0 && step.rotation.abs() < 1e-12 && step.anchor == 0 {
            break;
        }
    }
    Canonical { points, rotation, degenerate }
}

/// Rotates a centered, unit-length, counterclockwise, equally spaced curve so
/// its major axis lies on `x`, then starts the sample list at the sample of
/// largest `x` (ties go to the smallest index).
pub fn align_and_fix_start(c: &RawContour) -> NormalizedCurve {
    let (mut points, mut rotation, degenerate) = align_points(c.points(), false);
    if skew_prefers_flip(&points) {
        for p in &mut points {
            *p = -*p;
        }
        rotation = wrap_angle(rotation + PI);
    }
    let anchor = argmax_x(&points);
    let mut points = points;
    points.rotate_left(anchor);
    NormalizedCurve {
        points,
        meta: CurveMeta {
            source_id: c.id.clone(),
            label: c.label.clone(),
            rotation,
            degenerate_axis: degenerate,
        },
    }
}

struct PassResult {
    points: Vec<Point>,
    rotation: f64,
    anchor: usize,
    degenerate: bool,
}

/// One round of center, scale, align, anchor and resample. Repeating it
/// reaches a fixed point after a pass or two, because resampling an equally
/// spaced polygon from one of its own vertices reproduces it.
fn canonical_pass(points: &[Point], n: usize, half_turn: bool) -> PassResult {
    let centered = center_and_scale(points);
    let (mut aligned, rotation, degenerate) = align_points(&centered, half_turn);
    let anchor = argmax_x(&aligned);
    aligned.rotate_left(anchor);
    let samples = resample_closed(&aligned, n);
    PassResult { points: center_and_scale(&samples), rotation, anchor, degenerate }
}

fn center_and_scale(points: &[Point]) -> Vec<Point> {
    let c = geometry::mean(points);
    let centered: Vec<Point> = points.iter().map(|p| p - c).collect();
    let len = geometry::perimeter(&centered);
    centered.into_iter().map(|p| p / len).collect()
}

/// Smallest rotation putting the major axis on `x`, optionally followed by a
/// half turn.
fn align_points(points: &[Point], half_turn: bool) -> (Vec<Point>, f64, bool) {
    let axis = principal_axis(points);
    let mut angle = axis.angle;
    if angle > 0.5 * PI {
        angle -= PI;
    }
    let mut rotated = geometry::rotate_all(points, -angle);
    if half_turn {
        for p in &mut rotated {
            *p = -*p;
        }
        angle += PI;
    }
    (rotated, wrap_angle(angle), axis.degenerate)
}

/// Third moments `Σx³` and `Σy³` of the points, each divided by
/// `Σ(|x|³ + |y|³)`. After [`normalize`] at least one is positive unless
/// the shape is nearly symmetric, in which case its half-turn is ambiguous.
pub fn orientation_skew(points: &[Point]) -> (f64, f64) {
    let (mut m3x, mut m3y, mut scale) = (0.0, 0.0, 0.0);
    for p in points {
        m3x += p.x.powi(3);
        m3y += p.y.powi(3);
        scale += p.x.abs().powi(3) + p.y.abs().powi(3);
    }
    (m3x / scale, m3y / scale)
}

/// Sign test on the normalized third moments. Near-symmetric shapes (both
/// moments within `SKEW_TOL`) keep their orientation, which keeps sampling
/// noise from flipping them.
fn skew_prefers_flip(points: &[Point]) -> bool {
    let (m3x, m3y) = orientation_skew(points);
    let tol = SKEW_TOL;
    if m3x.abs() > tol {
        m3x < 0.0
    } else if m3y.abs() > tol {
        m3y < 0.0
    } else {
        false
    }
}

fn argmax_x(points: &[Point]) -> usize {
    let max = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    points.iter().position(|p| p.x >= max - tol).unwrap_or(0)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

#[cfg(test)]
mod tests;
