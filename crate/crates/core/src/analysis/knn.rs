use super::{cv::stratified_folds, AnalysisError, DistanceMatrix};

/// Cross-validated k-nearest-neighbor predictions from a distance matrix.
///
/// Items are split into `folds` stratified folds; each item is voted on by
/// its `k` nearest neighbors outside its own fold (fewer if the training
/// side is smaller). Vote ties go to the class whose voters are closer on
/// average, then to the smaller class index.
pub fn knn_classify(
    dm: &DistanceMatrix,
    labels: &[usize],
    k: usize,
    folds: usize,
    seed: u64,
) -> Result<Vec<usize>, AnalysisError> {
    if labels.len() != dm.len() {
        return Err(AnalysisError::Length { what: "labels and distance matrix", left: labels.len(), right: dm.len() });
    }
    if k == 0 {
        return Err(AnalysisError::ZeroK(k));
    }
    let fold = stratified_folds(labels, folds, seed)?;
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let predictions = (0..dm.len())
        .map(|i| {
            let mut train: Vec<usize> = (0..dm.len()).filter(|&j| fold[j] != fold[i]).collect();
            train.sort_by(|&a, &b| dm.get(i, a).total_cmp(&dm.get(i, b)).then(a.cmp(&b)));
            train.truncate(k);
            vote(train.iter().map(|&j| (labels[j], dm.get(i, j))), n_classes)
        })
        .collect();
    Ok(predictions)
}

pub(super) fn vote(neighbors: impl Iterator<Item = (usize, f64)>, n_classes: usize) -> usize {
    let mut count = vec![0usize; n_classes];
    let mut dist = vec![0.0; n_classes];
    for (c, d) in neighbors {
        count[c] += 1;
        dist[c] += d;
    }
    (0..n_classes)
        .filter(|&c| count[c] > 0)
        .min_by(|&a, &b| {
            count[b]
                .cmp(&count[a])
                .then((dist[a] / count[a] as f64).total_cmp(&(dist[b] / count[b] as f64)))
                .then(a.cmp(&b))
        })
        .unwrap_or(0)
}
