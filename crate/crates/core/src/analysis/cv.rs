use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AnalysisError;

/// Fold number of every item. Each class is shuffled with the seeded
/// generator and dealt round-robin, so every fold gets `⌊m/folds⌋` or
/// `⌈m/folds⌉` members of a class of size `m`.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>, AnalysisError> {
    if folds < 2 {
        return Err(AnalysisError::Folds(folds));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        members[c].push(i);
    }
    for (class, m) in members.iter().enumerate() {
        if !m.is_empty() && m.len() < folds {
            return Err(AnalysisError::SmallClass { class, count: m.len(), folds });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold = vec![0; labels.len()];
    // Continue the deal across classes so fold sizes stay balanced overall.
    let mut next = 0;
    for m in &mut members {
        m.shuffle(&mut rng);
        for &i in m.iter() {
            fold[i] = next % folds;
            next += 1;
        }
    }
    Ok(fold)
}
