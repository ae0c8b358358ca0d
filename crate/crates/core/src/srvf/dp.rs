use serde::{Deserialize, Serialize};

use super::SrvfCurve;
use crate::geometry::Point;

/// Largest run and rise of one DP step, in grid cells.
const MAX_STEP: usize = 5;

/// Cells of the `(t, γ(t))` grid the DP may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DpGrid {
    /// Cells within `n/10` of the diagonal.
    #[default]
    Banded,
    /// Every cell.
    Full,
}

impl DpGrid {
    fn band(self, n: usize) -> usize {
        match self {
            DpGrid::Banded => (n / 10).max(MAX_STEP),
            DpGrid::Full => n,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Periodic linear interpolation of samples taken at `j/n`.
fn sample(q: &[Point], tau: f64) -> Point {
    let n = q.len();
    let pos = tau * n as f64;
    let nearest = pos.round();
    if (pos - nearest).abs() < 1e-9 {
        return q[(nearest as usize) % n];
    }
    let base = pos.floor();
    let w = pos - base;
    let i = (base as usize) % n;
    q[i] * (1.0 - w) + q[(i + 1) % n] * w
}

/// Piecewise-linear `γ` on the grid maximizing `∫ a · (b∘γ) √γ'`, which is
/// the `γ` minimizing the `L²` distance from `a` to the reparameterized `b`.
/// Returns `γ(j/n)` for `j = 0..=n`, with `γ(0) = 0` and `γ(1) = 1`.
pub(super) fn optimal_warp(a: &[Point], b: &[Point], grid: DpGrid) -> Vec<f64> {
    let n = a.len();
    let band = grid.band(n);
    let inside = |i: usize, j: usize| i.abs_diff(j) <= band;
    let steps: Vec<(usize, usize)> = (1..=MAX_STEP)
        .flat_map(|di| (1..=MAX_STEP).map(move |dj| (di, dj)))
        .filter(|&(di, dj)| gcd(di, dj) == 1)
        .collect();

    let h = 1.0 / n as f64;
    let segment = |k: usize, l: usize, di: usize, dj: usize| -> f64 {
        let m = dj as f64 / di as f64;
        let mut acc = 0.0;
        for r in 0..di {
            let tau = (l as f64 + r as f64 * m) * h;
            acc += a[k + r].dot(&sample(b, tau));
        }
        acc * m.sqrt() * h
    };

    let size = n + 1;
    let mut score = vec![f64::NEG_INFINITY; size * size];
    let mut from = vec![usize::MAX; size * size];
    score[0] = 0.0;
    for i in 1..=n {
        for j in 1..=n {
            if !inside(i, j) {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut arg = usize::MAX;
            for &(di, dj) in &steps {
                if di > i || dj > j {
                    continue;
                }
                let (k, l) = (i - di, j - dj);
                let prev = score[k * size + l];
                if prev == f64::NEG_INFINITY {
                    continue;
                }
                let v = prev + segment(k, l, di, dj);
                if v > best {
                    best = v;
                    arg = k * size + l;
                }
            }
            score[i * size + j] = best;
            from[i * size + j] = arg;
        }
    }

    let mut nodes = vec![(n, n)];
    let mut cell = n * size + n;
    while cell != 0 {
        cell = from[cell];
        nodes.push((cell / size, cell % size));
    }
    nodes.reverse();

    let mut gamma = vec![0.0; size];
    for w in nodes.windows(2) {
        let ((k, l), (i, j)) = (w[0], w[1]);
        let m = (j - l) as f64 / (i - k) as f64;
        for r in k..=i {
            gamma[r] = (l as f64 + (r - k) as f64 * m) * h;
        }
    }
    gamma[n] = 1.0;
    gamma
}

/// `√γ' · q∘γ`, rescaled to unit norm.
pub(super) fn reparameterize(q: &[Point], gamma: &[f64]) -> SrvfCurve {
    let n = q.len();
    let warped = (0..n)
        .map(|r| {
            let slope = (gamma[r + 1] - gamma[r]) * n as f64;
            sample(q, gamma[r]) * slope.sqrt()
        })
        .collect();
    SrvfCurve::from_samples(warped)
}
