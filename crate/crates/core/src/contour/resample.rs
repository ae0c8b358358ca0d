use crate::geometry::Point;

/// Equal-chord resampling of a closed polygon, anchored at `points[0]`.
///
/// Walks the polygon with a pair of dividers of opening `h`: each new sample
/// is the first point further along the polygon at Euclidean distance `h`
/// from the previous one. The opening is solved for so that the `n`-th step
/// lands back on the anchor, which makes the closing edge the same length as
/// the others. An already equally spaced polygon resampled from one of its
/// vertices comes back unchanged.
pub fn resample_closed(points: &[Point], n: usize) -> Vec<Point> {
    let walker = Walker::new(points);
    let total = walker.total;
    let residual = |h: f64| walker.walk(h, n, None) - total;

    // walk(L/n) overshoots because every chord is at most the arc it cuts.
    let (mut lo, mut hi) = (0.0, total / n as f64);
    let (mut f_lo, mut f_hi) = (-total, residual(hi));
    let mut best = (hi, f_hi.abs());
    let mut side = 0i8;
    for _ in 0..200 {
        if best.1 <= 1e-14 * total || hi - lo <= 1e-17 * total {
            break;
        }
        // Illinois variant of regula falsi.
        let mut h = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(h > lo && h < hi) {
            h = 0.5 * (lo + hi);
        }
        let f = residual(h);
        if f.abs() < best.1 {
            best = (h, f.abs());
        }
        if f < 0.0 {
            lo = h;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = h;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    let mut out = Vec::with_capacity(n);
    walker.walk(best.0, n, Some(&mut out));
    out
}

const ROOT_SLACK: f64 = 1e-9;

struct Walker<'a> {
    points: &'a [Point],
    cumulative: Vec<f64>,
    total: f64,
}

impl<'a> Walker<'a> {
    fn new(points: &'a [Point]) -> Self {
        let m = points.len();
        let mut cumulative = Vec::with_capacity(m + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..m {
            acc += (points[(i + 1) % m] - points[i]).norm();
            cumulative.push(acc);
        }
        Self { points, cumulative, total: acc }
    }

    /// Takes `n` divider steps of opening `h` and returns the arc-length
    /// position (possibly past one lap) where the last step lands. The first
    /// `n` visited points, anchor included, go to `out`.
    fn walk(&self, h: f64, n: usize, mut out: Option<&mut Vec<Point>>) -> f64 {
        let m = self.points.len();
        let edge_limit = m * (n + 2);
        let mut edge = 0usize;
        let mut t = 0.0;
        let mut p = self.points[0];
        if let Some(o) = out.as_deref_mut() {
            o.push(p);
        }
        for k in 1..=n {
            loop {
                let a = self.points[edge % m];
                let b = self.points[(edge + 1) % m];
                // Landing a rounding error short of a vertex must not skip
                // the next edge, so the bounds get a little slack.
                if let Some(root) = exit_parameter(a, b, p, h) {
                    if root >= t - ROOT_SLACK && root <= 1.0 + ROOT_SLACK {
                        let root = root.clamp(t, 1.0);
                        t = root;
                        p = a + (b - a) * root;
                        break;
                    }
                }
                edge += 1;
                t = 0.0;
                if edge > edge_limit {
                    return f64::INFINITY;
                }
            }
            if k < n {
                if let Some(o) = out.as_deref_mut() {
                    o.push(p);
                }
            }
        }
        let lap = (edge / m) as f64;
        let e = edge % m;
        lap * self.total + self.cumulative[e] + t * (self.cumulative[e + 1] - self.cumulative[e])
    }
}

/// Larger parameter at which the line `a + s (b - a)` is at distance `h`
/// from `p`.
fn exit_parameter(a: Point, b: Point, p: Point, h: f64) -> Option<f64> {
    let d = b - a;
    let w = a - p;
    let qa = d.norm_squared();
    let qb = 2.0 * w.dot(&d);
    let qc = w.norm_squared() - h * h;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 || qa == 0.0 {
        return None;
    }
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    let r1 = q / qa;
    let r2 = if q != 0.0 { qc / q } else { r1 };
    Some(r1.max(r2))
}
