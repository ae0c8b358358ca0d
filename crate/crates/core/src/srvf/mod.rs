//! Square-root velocity representation of closed curves.
//!
//! A curve `β` on `[0, 1]` becomes `q = β'/√|β'|`. The elastic metric on
//! curves turns into the flat `L²` metric on `q`, unit-length curves land on
//! the unit sphere, and closed curves form the codimension-2 subset where
//! `∫ q|q| = 0`. Distances are arc lengths on the sphere, optionally after
//! optimizing over rotations, start points and reparameterizations of the
//! second curve.
//!
//! `q` is sampled at the curve's vertices, `t_j = j/n`, with central
//! differences that wrap around the closed curve.

mod dp;

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::NormalizedCurve;
use crate::geometry::{self, Point};

pub use dp::DpGrid;

const STATIONARY_SPEED: f64 = 1e-12;
/// Closure tolerance of [`project_closed`].
pub const CLOSURE_TOL: f64 = 1e-6;
const CLOSURE_MAX_ITER: usize = 50;
/// Angles this close to π have no unique geodesic.
const ANTIPODAL_GAP: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum SrvfError {
    #[error("stationary point on curve at sample {index}")]
    Stationary { index: usize },
    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },
    #[error("closure projection did not converge, residual {residual:e}")]
    NoConvergence { residual: f64 },
    #[error("non-unique geodesic: curves are antipodal")]
    NonUniqueGeodesic,
    #[error("shift step must be at least 1")]
    ZeroStep,
}

/// Discretized square-root velocity function on the unit sphere of `L²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SrvfCurve {
    q: Vec<Point>,
}

impl SrvfCurve {
    /// Wraps samples after scaling them to unit `L²` norm.
    pub fn from_samples(mut q: Vec<Point>) -> Self {
        let norm = l2_inner(&q, &q).sqrt();
        for v in &mut q {
            *v /= norm;
        }
        Self { q }
    }

    pub fn q(&self) -> &[Point] {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `∫|q|²`, 1 up to rounding.
    pub fn norm_sq(&self) -> f64 {
        l2_inner(&self.q, &self.q)
    }

    /// `∫ q|q|`: the gap between the end and the start of the curve.
    pub fn closure_residual(&self) -> Point {
        closure(&self.q)
    }

    /// Same curve started `shift` samples later.
    pub fn shifted(&self, shift: usize) -> Self {
        let mut q = self.q.clone();
        q.rotate_left(shift % self.n());
        Self { q }
    }

    /// `O·q`, the SRVF of the rotated curve.
    pub fn rotated(&self, o: &Matrix2<f64>) -> Self {
        Self { q: self.q.iter().map(|v| o * v).collect() }
    }
}

fn dt(n: usize) -> f64 {
    1.0 / n as f64
}

/// `∫ a·b` over `[0, 1]`.
fn l2_inner(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum::<f64>() * dt(a.len())
}

fn closure(q: &[Point]) -> Point {
    let mut acc = Point::zeros();
    for v in q {
        acc += v * v.norm();
    }
    acc * dt(q.len())
}

/// SRVF of a normalized curve.
pub fn to_srvf(curve: &NormalizedCurve) -> Result<SrvfCurve, SrvfError> {
    from_points(curve.points())
}

/// SRVF of a closed polygon traversed over `[0, 1]`.
pub fn from_points(points: &[Point]) -> Result<SrvfCurve, SrvfError> {
    let n = points.len();
    let mut q = Vec::with_capacity(n);
    for j in 0..n {
        let v = (points[(j + 1) % n] - points[(j + n - 1) % n]) * (0.5 * n as f64);
        let speed = v.norm();
        if speed < STATIONARY_SPEED {
            return Err(SrvfError::Stationary { index: j });
        }
        q.push(v / speed.sqrt());
    }
    Ok(SrvfCurve::from_samples(q))
}

/// `β(t) = ∫₀ᵗ q|q|` by the trapezoid rule, centered on the vertex mean.
pub fn from_srvf(s: &SrvfCurve) -> Vec<Point> {
    let n = s.n();
    let h = dt(n);
    let v: Vec<Point> = s.q.iter().map(|x| x * x.norm()).collect();
    let mut points = Vec::with_capacity(n);
    let mut acc = Point::zeros();
    for j in 0..n {
        points.push(acc);
        acc += (v[j] + v[(j + 1) % n]) * (0.5 * h);
    }
    let c = geometry::mean(&points);
    points.iter().map(|p| p - c).collect()
}

/// Projects onto closed curves: Newton steps on the residual `G(q) = ∫q|q|`
/// along its gradient fields, kept tangent to the sphere, renormalizing after
/// every step.
pub fn project_closed(s: &SrvfCurve) -> Result<SrvfCurve, SrvfError> {
    let n = s.n();
    let mut q = s.q.clone();
    let mut g = closure(&q);
    for _ in 0..CLOSURE_MAX_ITER {
        if g.norm() < CLOSURE_TOL {
            return Ok(SrvfCurve { q });
        }
        // dG_k = ∫ (|q| e_k + q_k q/|q|) · δq
        let grads: [Vec<Point>; 2] = [0, 1].map(|k| {
            let raw: Vec<Point> = q
                .iter()
                .map(|v| {
                    let len = v.norm();
                    let mut unit = Point::zeros();
                    unit[k] = len;
                    if len > 0.0 {
                        unit + v * (v[k] / len)
                    } else {
                        unit
                    }
                })
                .collect();
            let along = l2_inner(&raw, &q);
            raw.iter().zip(&q).map(|(r, v)| r - v * along).collect()
        });
        let jac = Matrix2::new(
            l2_inner(&grads[0], &grads[0]),
            l2_inner(&grads[0], &grads[1]),
            l2_inner(&grads[1], &grads[0]),
            l2_inner(&grads[1], &grads[1]),
        );
        let Some(x) = jac.lu().solve(&g) else {
            break;
        };
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let trial: Vec<Point> = (0..n)
                .map(|j| q[j] - (grads[0][j] * x[0] + grads[1][j] * x[1]) * step)
                .collect();
            let trial = SrvfCurve::from_samples(trial).q;
            let g_trial = closure(&trial);
            if g_trial.norm() < g.norm() {
                q = trial;
                g = g_trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if g.norm() < CLOSURE_TOL {
        Ok(SrvfCurve { q })
    } else {
        Err(SrvfError::NoConvergence { residual: g.norm() })
    }
}

fn check_grid(a: &SrvfCurve, b: &SrvfCurve) -> Result<(), SrvfError> {
    if a.n() != b.n() {
        return Err(SrvfError::GridMismatch { left: a.n(), right: b.n() });
    }
    Ok(())
}

/// Great-circle distance `arccos⟨a, b⟩`, in `[0, π]`.
pub fn sphere_distance(a: &SrvfCurve, b: &SrvfCurve) -> Result<f64, SrvfError> {
    check_grid(a, b)?;
    Ok(angle(l2_inner(&a.q, &b.q)))
}

fn angle(inner: f64) -> f64 {
    inner.clamp(-1.0, 1.0).acos()
}

/// Rotations searched when aligning the second curve to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RotationMode {
    /// Identity only.
    None,
    /// Identity or the half turn.
    #[default]
    FlipOnly,
    /// Any rotation.
    Procrustes,
}

/// How the second curve was moved onto the first.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    pub rotation: Matrix2<f64>,
    /// Start-point shift of the second curve, in samples.
    pub shift: usize,
    pub used_dp: bool,
    /// `γ` at `t = j/n` for `j = 0..=n` when reparameterization was used.
    pub gamma: Option<Vec<f64>>,
}

impl AlignmentResult {
    fn rigid(rotation: Matrix2<f64>, shift: usize) -> Self {
        Self { rotation, shift, used_dp: false, gamma: None }
    }

    /// Applies the alignment to `b`.
    pub fn apply(&self, b: &SrvfCurve) -> SrvfCurve {
        let shifted = b.shifted(self.shift);
        let warped = match &self.gamma {
            Some(gamma) => dp::reparameterize(&shifted.q, gamma),
            None => shifted,
        };
        warped.rotated(&self.rotation)
    }
}

/// `∫ a·(b shifted by s)` and `∫ a × (b shifted by s)` (the cross term that
/// rotations trade against the dot term).
fn shifted_terms(a: &[Point], b: &[Point], s: usize) -> (f64, f64) {
    let n = a.len();
    let (mut c, mut x) = (0.0, 0.0);
    for j in 0..n {
        let u = a[j];
        let v = b[(j + s) % n];
        c += u.x * v.x + u.y * v.y;
        x += u.y * v.x - u.x * v.y;
    }
    (c * dt(n), x * dt(n))
}

/// Best rotation within `mode` and the inner product it reaches, from the
/// dot and cross terms. `⟨a, R(φ) b⟩ = C cos φ + S sin φ`.
fn best_rotation(c: f64, s: f64, mode: RotationMode) -> (Matrix2<f64>, f64) {
    match mode {
        RotationMode::None => (Matrix2::identity(), c),
        RotationMode::FlipOnly => {
            if c >= 0.0 {
                (Matrix2::identity(), c)
            } else {
                (-Matrix2::identity(), -c)
            }
        }
        RotationMode::Procrustes => (geometry::rotation(s.atan2(c)), c.hypot(s)),
    }
}

/// Rotation of `b` that brings it closest to `a` within `mode`.
pub fn align_rotation(a: &SrvfCurve, b: &SrvfCurve, mode: RotationMode) -> Result<AlignmentResult, SrvfError> {
    check_grid(a, b)?;
    let (c, s) = shifted_terms(&a.q, &b.q, 0);
    Ok(AlignmentResult::rigid(best_rotation(c, s, mode).0, 0))
}

/// Distance after rotation alignment only. Both curves should already be
/// closed.
pub fn fixed_distance(a: &SrvfCurve, b: &SrvfCurve, mode: RotationMode) -> Result<f64, SrvfError> {
    check_grid(a, b)?;
    let (c, s) = shifted_terms(&a.q, &b.q, 0);
    Ok(angle(best_rotation(c, s, mode).1))
}

/// SRVF of a normalized curve, projected onto closed curves.
pub fn closed_srvf(curve: &NormalizedCurve) -> Result<SrvfCurve, SrvfError> {
    project_closed(&to_srvf(curve)?)
}

/// Fixed-parameterization distance between canonical curves: the start
/// points and poses set by canonicalization are kept, up to the rotations in
/// `mode`.
pub fn srvf_distance_fixed(a: &NormalizedCurve, b: &NormalizedCurve, mode: RotationMode) -> Result<f64, SrvfError> {
    fixed_distance(&closed_srvf(a)?, &closed_srvf(b)?, mode)
}

/// Search space of the elastic distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticOptions {
    /// Stride of the start-point search; 1 tries every sample.
    pub shift_step: usize,
    pub rotation: RotationMode,
    /// Refine the best shift with a dynamic-programming reparameterization.
    pub use_dp: bool,
    pub dp_grid: DpGrid,
}

impl Default for ElasticOptions {
    fn default() -> Self {
        Self { shift_step: 5, rotation: RotationMode::Procrustes, use_dp: false, dp_grid: DpGrid::Banded }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticResult {
    pub d: f64,
    pub alignment: AlignmentResult,
}

/// Elastic distance between two closed SRVFs: the smallest sphere distance
/// from `a` to `b` over start shifts `0, step, 2·step, …`, rotations in
/// `opts.rotation` and, with `use_dp`, a reparameterization found by dynamic
/// programming around the best shift. The DP result replaces the rigid one
/// only when it is closer.
pub fn elastic_distance(a: &SrvfCurve, b: &SrvfCurve, opts: &ElasticOptions) -> Result<ElasticResult, SrvfError> {
    check_grid(a, b)?;
    if opts.shift_step == 0 {
        return Err(SrvfError::ZeroStep);
    }
    let mut best_inner = f64::NEG_INFINITY;
    let mut best = AlignmentResult::rigid(Matrix2::identity(), 0);
    for s in (0..a.n()).step_by(opts.shift_step) {
        let (c, x) = shifted_terms(&a.q, &b.q, s);
        let (o, inner) = best_rotation(c, x, opts.rotation);
        if inner > best_inner {
            best_inner = inner;
            best = AlignmentResult::rigid(o, s);
        }
    }

    if opts.use_dp {
        let rigid = best.apply(b);
        let gamma = dp::optimal_warp(&a.q, &rigid.q, opts.dp_grid);
        // Warp the shifted curve, then realign the rotation once.
        let warped = dp::reparameterize(&b.shifted(best.shift).q, &gamma);
        let (c, x) = shifted_terms(&a.q, &warped.q, 0);
        let (o, inner) = best_rotation(c, x, opts.rotation);
        if inner > best_inner {
            best_inner = inner;
            best = AlignmentResult { rotation: o, shift: best.shift, used_dp: true, gamma: Some(gamma) };
        }
    }
    Ok(ElasticResult { d: angle(best_inner), alignment: best })
}

/// [`elastic_distance`] between two canonical curves.
pub fn srvf_distance_elastic(
    a: &NormalizedCurve,
    b: &NormalizedCurve,
    opts: &ElasticOptions,
) -> Result<ElasticResult, SrvfError> {
    elastic_distance(&closed_srvf(a)?, &closed_srvf(b)?, opts)
}

/// Curves along the great circle from `a` to `b`: `steps` interior frames
/// plus both endpoints. `b` must already be aligned to `a`. Every frame is
/// projected back onto closed curves before integration.
pub fn srvf_geodesic(a: &SrvfCurve, b: &SrvfCurve, steps: usize) -> Result<Vec<Vec<Point>>, SrvfError> {
    check_grid(a, b)?;
    let psi = angle(l2_inner(&a.q, &b.q));
    if psi >= PI - ANTIPODAL_GAP {
        return Err(SrvfError::NonUniqueGeodesic);
    }
    let mut frames = Vec::with_capacity(steps + 2);
    for k in 0..=steps + 1 {
        let tau = k as f64 / (steps + 1) as f64;
        let q = if psi < 1e-12 {
            a.clone()
        } else {
            let wa = ((1.0 - tau) * psi).sin() / psi.sin();
            let wb = (tau * psi).sin() / psi.sin();
            SrvfCurve::from_samples(a.q.iter().zip(&b.q).map(|(x, y)| x * wa + y * wb).collect())
        };
        frames.push(from_srvf(&project_closed(&q)?));
    }
    Ok(frames)
}

#[cfg(test)]
mod tests;
