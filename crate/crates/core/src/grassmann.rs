//! Shape space of closed curves as the Grassmannian of 2-planes.
//!
//! A unit-length closed curve `α` with tangent angle `θ` and speed `|α'|`
//! maps to the function pair
//!
//! ```text
//! e = √(2|α'|) cos(θ/2),   f = √(2|α'|) sin(θ/2)
//! ```
//!
//! on `[0, 2π)` (length 1, so `l` drops out). Closure of the curve is exactly
//! orthonormality of `(e, f)` in `L²`, and the curve comes back from the
//! pair through `α(t) = ½∫₀ᵗ (e + i f)²`. Only the plane spanned by the pair
//! matters: rotating the curve rotates the basis inside its plane. The
//! geodesic distance between two planes is the norm of their two Jordan
//! angles.
//!
//! Samples are taken per polygon edge: sample `j` describes the edge from
//! point `j` to point `j + 1` and sits at `t = (j + ½)·2π/n`. With that
//! choice the discrete pair of a closed polygon is orthonormal up to rounding
//! and the basic map returns the polygon itself.

use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen};
use thiserror::Error;

use crate::contour::NormalizedCurve;
use crate::geometry::{self, Point};

/// Largest possible distance, `π/√2`.
pub const MAX_DISTANCE: f64 = 2.221_441_469_079_183;

#[derive(Debug, Error, PartialEq)]
pub enum GrassmannError {
    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },
    #[error("conjugate-point geodesic: a Jordan angle equals π/2")]
    ConjugatePoint,
    #[error("shift step must be at least 1")]
    ZeroStep,
}

/// An orthonormal pair `(e, f)` sampled on a uniform grid over `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannPoint {
    e: Vec<f64>,
    f: Vec<f64>,
    /// How far the symmetric orthonormalization moved the raw pair
    /// (discrete `L²` norm of the change).
    displacement: f64,
}

impl GrassmannPoint {
    /// Orthonormalizes a raw pair. Both slices must have the same length.
    pub fn from_pair(e: Vec<f64>, f: Vec<f64>) -> Self {
        assert_eq!(e.len(), f.len(), "e and f must share a grid");
        let (e_new, f_new) = polar_orthonormalize(&e, &f);
        let dt = grid_step(e.len());
        let moved: f64 = e
            .iter()
            .zip(&e_new)
            .chain(f.iter().zip(&f_new))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            * dt;
        Self { e: e_new, f: f_new, displacement: moved.sqrt() }
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// Grid spacing `2π/n`.
    pub fn dt(&self) -> f64 {
        grid_step(self.n())
    }

    /// Parameter value of sample `j`.
    pub fn grid(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.n()).map(|j| (j as f64 + 0.5) * dt).collect()
    }

    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    /// `‖e‖² + ‖f‖²`, 2 for a valid point.
    pub fn norm_sq(&self) -> f64 {
        inner(&self.e, &self.e, 0) + inner(&self.f, &self.f, 0)
    }

    /// The pair of the same curve started `shift` samples later.
    ///
    /// Going once around the curve adds 2π to the tangent angle, which flips
    /// the sign of both half-angle functions, so wrapped samples change
    /// sign.
    pub fn shifted(&self, shift: usize) -> Self {
        let n = self.n();
        let s = shift % n;
        let rot = |v: &[f64]| -> Vec<f64> {
            (0..n).map(|j| if j + s < n { v[j + s] } else { -v[j + s - n] }).collect()
        };
        Self { e: rot(&self.e), f: rot(&self.f), displacement: self.displacement }
    }
}

fn grid_step(n: usize) -> f64 {
    2.0 * PI / n as f64
}

/// Discrete `L²` inner product of `a` against `b` started `shift` samples
/// later, with the antiperiodic sign flip of [`GrassmannPoint::shifted`].
fn inner(a: &[f64], b: &[f64], shift: usize) -> f64 {
    let n = a.len();
    let s = shift % n;
    let head: f64 = a[..n - s].iter().zip(&b[s..]).map(|(x, y)| x * y).sum();
    let tail: f64 = a[n - s..].iter().zip(&b[..s]).map(|(x, y)| x * y).sum();
    (head - tail) * grid_step(n)
}

/// Replaces `[e f]` by the orthonormal pair nearest to it: `M (MᵀM)^{-1/2}`.
fn polar_orthonormalize(e: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let g = Matrix2::new(inner(e, e, 0), inner(e, f, 0), inner(f, e, 0), inner(f, f, 0));
    let eig = SymmetricEigen::new(g);
    let inv_sqrt = eig.eigenvalues.map(|l| 1.0 / l.sqrt());
    let w = eig.eigenvectors * Matrix2::from_diagonal(&inv_sqrt) * eig.eigenvectors.transpose();
    let e_new = e.iter().zip(f).map(|(a, b)| a * w[(0, 0)] + b * w[(1, 0)]).collect();
    let f_new = e.iter().zip(f).map(|(a, b)| a * w[(0, 1)] + b * w[(1, 1)]).collect();
    (e_new, f_new)
}

/// Direction angle of every edge, lifted so consecutive values differ by
/// less than π. The first value lies in `[0, 2π)`.
pub fn tangent_angle(curve: &NormalizedCurve) -> Vec<f64> {
    edge_angles(curve.points())
}

fn edge_angles(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for j in 0..n {
        let d = points[(j + 1) % n] - points[j];
        let raw = d.y.atan2(d.x);
        let lifted = if j == 0 {
            raw.rem_euclid(2.0 * PI)
        } else {
            prev + wrap_pi(raw - prev)
        };
        out.push(lifted);
        prev = lifted;
    }
    out
}

/// Total turning of a lifted tangent angle, closing step included.
pub fn total_turning(theta: &[f64]) -> f64 {
    let n = theta.len();
    theta[n - 1] - theta[0] + wrap_pi(theta[0] - theta[n - 1])
}

fn wrap_pi(a: f64) -> f64 {
    let a = (a + PI).rem_euclid(2.0 * PI) - PI;
    if a == -PI {
        PI
    } else {
        a
    }
}

/// The `(e, f)` representation of a normalized curve.
pub fn to_grassmann(curve: &NormalizedCurve) -> GrassmannPoint {
    from_points(curve.points())
}

/// Same as [`to_grassmann`] for a bare closed polygon of length 1.
pub fn from_points(points: &[Point]) -> GrassmannPoint {
    let n = points.len();
    let dt = grid_step(n);
    let theta = edge_angles(points);
    let mut e = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    for (j, th) in theta.iter().enumerate() {
        let len = (points[(j + 1) % n] - points[j]).norm();
        let amp = (2.0 * len / dt).sqrt();
        let (s, c) = (0.5 * th).sin_cos();
        e.push(amp * c);
        f.push(amp * s);
    }
    GrassmannPoint::from_pair(e, f)
}

/// A curve recovered by [`basic_map`].
#[derive(Debug, Clone)]
pub struct MappedCurve {
    /// Vertex `j` is `α` at the start of sample `j`, centered on the vertex
    /// mean.
    pub points: Vec<Point>,
    /// `α(2π) − α(0)`, zero for an exactly orthonormal pair.
    pub closure_residual: Point,
}

/// `α(t) = ½∫₀ᵗ (e + i f)²`, one midpoint step per sample.
pub fn basic_map(p: &GrassmannPoint) -> MappedCurve {
    let dt = p.dt();
    let mut points = Vec::with_capacity(p.n());
    let mut acc = Point::zeros();
    for (e, f) in p.e.iter().zip(&p.f) {
        points.push(acc);
        acc += 0.5 * dt * Point::new(e * e - f * f, 2.0 * e * f);
    }
    let c = geometry::mean(&points);
    for q in &mut points {
        *q -= c;
    }
    MappedCurve { points, closure_residual: acc }
}

/// Jordan angles between two planes, `ψ₁ ≤ ψ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanAngles {
    pub psi1: f64,
    pub psi2: f64,
}

impl JordanAngles {
    /// Geodesic distance `√(ψ₁² + ψ₂²)`.
    pub fn distance(&self) -> f64 {
        self.psi1.hypot(self.psi2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrassmannDistance {
    pub d: f64,
    pub angles: JordanAngles,
}

/// Inner-product matrix `A` between the bases of `a` and of `b` shifted by
/// `shift`.
fn gram(a: &GrassmannPoint, b: &GrassmannPoint, shift: usize) -> Matrix2<f64> {
    Matrix2::new(
        inner(&a.e, &b.e, shift),
        inner(&a.e, &b.f, shift),
        inner(&a.f, &b.e, shift),
        inner(&a.f, &b.f, shift),
    )
}

/// Singular values of a 2×2 matrix, largest first. The closed form is
/// invariant under transposition, which keeps the distance exactly
/// symmetric.
fn singular_values(m: &Matrix2<f64>) -> (f64, f64) {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let p = (a + d).hypot(b - c);
    let q = (a - d).hypot(b + c);
    (0.5 * (p + q), 0.5 * (p - q).abs())
}

fn angles_from_gram(m: &Matrix2<f64>) -> JordanAngles {
    let (s1, s2) = singular_values(m);
    JordanAngles { psi1: s1.clamp(0.0, 1.0).acos(), psi2: s2.clamp(0.0, 1.0).acos() }
}

fn check_grid(a: &GrassmannPoint, b: &GrassmannPoint) -> Result<(), GrassmannError> {
    if a.n() != b.n() {
        return Err(GrassmannError::GridMismatch { left: a.n(), right: b.n() });
    }
    Ok(())
}

/// Geodesic distance between the planes of `a` and `b`, in `[0, π/√2]`.
pub fn grassmann_distance(a: &GrassmannPoint, b: &GrassmannPoint) -> Result<GrassmannDistance, GrassmannError> {
    check_grid(a, b)?;
    let angles = angles_from_gram(&gram(a, b, 0));
    Ok(GrassmannDistance { d: angles.distance(), angles })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedDistance {
    pub d: f64,
    /// Samples by which `b`'s start was moved for the minimum.
    pub best_shift: usize,
}

/// Minimum distance over start-point shifts `0, step, 2·step, …` of `b`.
pub fn grassmann_distance_minshift(
    a: &GrassmannPoint,
    b: &GrassmannPoint,
    step: usize,
) -> Result<ShiftedDistance, GrassmannError> {
    check_grid(a, b)?;
    if step == 0 {
        return Err(GrassmannError::ZeroStep);
    }
    let mut best = ShiftedDistance { d: f64::INFINITY, best_shift: 0 };
    for s in (0..a.n()).step_by(step) {
        let d = angles_from_gram(&gram(a, b, s)).distance();
        if d < best.d {
            best = ShiftedDistance { d, best_shift: s };
        }
    }
    Ok(best)
}

/// Curves along the geodesic from `a` to `b`: `steps` interior frames plus
/// both endpoints.
///
/// The principal vectors of the two planes are rotated towards each other by
/// `τψᵢ`. Each frame is expressed in a basis that starts as `a`'s own, so the
/// first frame is `a`'s curve in `a`'s pose.
pub fn grassmann_geodesic(
    a: &GrassmannPoint,
    b: &GrassmannPoint,
    steps: usize,
) -> Result<Vec<Vec<Point>>, GrassmannError> {
    check_grid(a, b)?;
    let m = gram(a, b, 0);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let v = svd.v_t.expect("requested").transpose();
    let sigma = svd.singular_values;
    if sigma.iter().any(|s| *s <= 1e-12) {
        return Err(GrassmannError::ConjugatePoint);
    }

    let n = a.n();
    let combine = |x: &[f64], y: &[f64], w: &Matrix2<f64>, col: usize| -> Vec<f64> {
        x.iter().zip(y).map(|(p, q)| p * w[(0, col)] + q * w[(1, col)]).collect()
    };
    // Principal vectors of each plane.
    let x1 = [combine(&a.e, &a.f, &u, 0), combine(&a.e, &a.f, &u, 1)];
    let x2 = [combine(&b.e, &b.f, &v, 0), combine(&b.e, &b.f, &v, 1)];
    let mut psi = [0.0; 2];
    let mut dir = [vec![0.0; n], vec![0.0; n]];
    for i in 0..2 {
        let c = sigma[i].clamp(0.0, 1.0);
        psi[i] = c.acos();
        let r: Vec<f64> = x2[i].iter().zip(&x1[i]).map(|(y, x)| y - c * x).collect();
        let rn = inner(&r, &r, 0).sqrt();
        if rn > 1e-14 {
            dir[i] = r.iter().map(|v| v / rn).collect();
        }
    }

    let ut = u.transpose();
    let frames = (0..=steps + 1)
        .map(|k| {
            let tau = k as f64 / (steps + 1) as f64;
            let y: Vec<Vec<f64>> = (0..2)
                .map(|i| {
                    let (s, c) = (tau * psi[i]).sin_cos();
                    x1[i].iter().zip(&dir[i]).map(|(x, d)| c * x + s * d).collect()
                })
                .collect();
            let e = combine(&y[0], &y[1], &ut, 0);
            let f = combine(&y[0], &y[1], &ut, 1);
            basic_map(&GrassmannPoint { e, f, displacement: 0.0 }).points
        })
        .collect();
    Ok(frames)
}
