use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AnalysisError, DistanceMatrix};

/// Outcome of [`kmedoids`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterResult {
    pub k: usize,
    /// Indices of the medoids; group `g` is the group of `medoids[g]`.
    pub medoids: Vec<usize>,
    pub medoid_ids: Vec<String>,
    /// Group of every item.
    pub assignment: Vec<usize>,
    /// Sum of distances from every item to its medoid.
    pub cost: f64,
    /// Average silhouette width.
    pub asw: f64,
}

fn nearest(dm: &DistanceMatrix, medoids: &[usize], i: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (g, &m) in medoids.iter().enumerate() {
        let d = dm.get(i, m);
        if d < best.1 {
            best = (g, d);
        }
    }
    best
}

fn total_cost(dm: &DistanceMatrix, medoids: &[usize]) -> f64 {
    (0..dm.len()).map(|i| nearest(dm, medoids, i).1).sum()
}

fn distinct_points(dm: &DistanceMatrix) -> usize {
    (0..dm.len()).filter(|&i| (0..i).all(|j| dm.get(i, j) > 0.0)).count()
}

/// Partitioning around medoids.
///
/// The first medoid minimizes the total distance to all items; each further
/// one is the item farthest from the medoids chosen so far. The swap phase
/// then repeatedly applies the single medoid/non-medoid exchange that lowers
/// the total cost most, until none does. Candidates are scanned in an order
/// shuffled by `seed`, which only matters for exact ties.
pub fn kmedoids(dm: &DistanceMatrix, k: usize, seed: u64) -> Result<ClusterResult, AnalysisError> {
    let n = dm.len();
    if k < 2 {
        return Err(AnalysisError::TooFew { need: 2, got: k });
    }
    let distinct = distinct_points(dm);
    if k > distinct {
        return Err(AnalysisError::TooManyClusters { k, distinct });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut medoids = Vec::with_capacity(k);
    let first = order
        .iter()
        .copied()
        .min_by(|&a, &b| dm.row(a).iter().sum::<f64>().total_cmp(&dm.row(b).iter().sum::<f64>()))
        .expect("n ≥ 2");
    medoids.push(first);
    while medoids.len() < k {
        let next = order
            .iter()
            .copied()
            .filter(|i| !medoids.contains(i))
            .max_by(|&a, &b| nearest(dm, &medoids, a).1.total_cmp(&nearest(dm, &medoids, b).1).then(b.cmp(&a)))
            .expect("k ≤ n");
        medoids.push(next);
    }

    let mut cost = total_cost(dm, &medoids);
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for g in 0..k {
            for &o in &order {
                if medoids.contains(&o) {
                    continue;
                }
                let mut trial = medoids.clone();
                trial[g] = o;
                let c = total_cost(dm, &trial);
                if c < best.map_or(cost, |b| b.2) - 1e-12 * cost.max(1e-300) {
                    best = Some((g, o, c));
                }
            }
        }
        match best {
            Some((g, o, c)) => {
                medoids[g] = o;
                cost = c;
            }
            None => break,
        }
    }

    let assignment: Vec<usize> = (0..n)
        .map(|i| match medoids.iter().position(|&m| m == i) {
            Some(g) => g,
            None => nearest(dm, &medoids, i).0,
        })
        .collect();
    let asw = silhouette(dm, &assignment)?;
    Ok(ClusterResult {
        k,
        medoid_ids: medoids.iter().map(|&m| dm.ids()[m].clone()).collect(),
        medoids,
        assignment,
        cost,
        asw,
    })
}

/// Average silhouette width of a partition. Members of singleton groups
/// score 0.
pub fn silhouette(dm: &DistanceMatrix, assignment: &[usize]) -> Result<f64, AnalysisError> {
    let n = dm.len();
    if assignment.len() != n {
        return Err(AnalysisError::Length { what: "assignment and distance matrix", left: assignment.len(), right: n });
    }
    let groups = assignment.iter().max().map_or(0, |m| m + 1);
    let mut size = vec![0usize; groups];
    for &g in assignment {
        size[g] += 1;
    }
    if size.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(AnalysisError::SingleGroup);
    }
    let mut total = 0.0;
    for i in 0..n {
        let own = assignment[i];
        if size[own] == 1 {
            continue;
        }
        let mut sums = vec![0.0; groups];
        for j in 0..n {
            if j != i {
                sums[assignment[j]] += dm.get(i, j);
            }
        }
        let a = sums[own] / (size[own] - 1) as f64;
        let b = (0..groups)
            .filter(|&g| g != own && size[g] > 0)
            .map(|g| sums[g] / size[g] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}
