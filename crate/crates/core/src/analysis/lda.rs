use nalgebra::{DMatrix, DVector};

use super::{cv::stratified_folds, AnalysisError};

/// Linear discriminant with a pooled within-class covariance and equal
/// priors.
#[derive(Debug, Clone)]
pub struct LdaModel {
    /// `Σ⁻¹ μ_c` and `-½ μ_cᵀ Σ⁻¹ μ_c` per class; `None` for classes absent
    /// from the training data.
    scores: Vec<Option<(DVector<f64>, f64)>>,
}

impl LdaModel {
    pub fn fit(features: &[Vec<f64>], labels: &[usize]) -> Result<Self, AnalysisError> {
        if features.len() != labels.len() {
            return Err(AnalysisError::Length { what: "features and labels", left: features.len(), right: labels.len() });
        }
        let dim = features.first().map_or(0, Vec::len);
        if dim == 0 || features.iter().any(|f| f.len() != dim) {
            return Err(AnalysisError::TooFew { need: 1, got: 0 });
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(AnalysisError::NonFinite);
        }
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut sums = vec![DVector::<f64>::zeros(dim); n_classes];
        let mut counts = vec![0usize; n_classes];
        for (f, &c) in features.iter().zip(labels) {
            sums[c] += DVector::from_column_slice(f);
            counts[c] += 1;
        }
        let present = counts.iter().filter(|&&c| c > 0).count();
        if features.len() <= present {
            return Err(AnalysisError::TooFew { need: present + 1, got: features.len() });
        }
        let means: Vec<DVector<f64>> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { s.clone() })
            .collect();
        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        for (f, &c) in features.iter().zip(labels) {
            let d = DVector::from_column_slice(f) - &means[c];
            cov += &d * d.transpose();
        }
        cov /= (features.len() - present) as f64;

        let inverse = |m: &DMatrix<f64>| {
            m.clone().cholesky().map(|ch| ch.inverse()).filter(|inv| inv.iter().all(|v| v.is_finite()))
        };
        let inv = match inverse(&cov) {
            Some(inv) => inv,
            None => {
                let ridge = 1e-9 * cov.trace();
                let reg = &cov + DMatrix::identity(dim, dim) * ridge;
                if ridge > 0.0 { inverse(&reg) } else { None }.ok_or(AnalysisError::SingularCovariance)?
            }
        };
        let scores = means
            .iter()
            .zip(&counts)
            .map(|(mu, &c)| {
                (c > 0).then(|| {
                    let w = &inv * mu;
                    let b = -0.5 * mu.dot(&w);
                    (w, b)
                })
            })
            .collect();
        Ok(Self { scores })
    }

    /// Class with the largest discriminant score; ties go to the smaller
    /// index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let x = DVector::from_column_slice(x);
        let mut best = (0, f64::NEG_INFINITY);
        for (c, s) in self.scores.iter().enumerate() {
            if let Some((w, b)) = s {
                let v = w.dot(&x) + b;
                if v > best.1 {
                    best = (c, v);
                }
            }
        }
        best.0
    }
}

/// Cross-validated LDA predictions on the same stratified folds as
/// [`super::knn_classify`].
pub fn lda_classify(
    features: &[Vec<f64>],
    labels: &[usize],
    folds: usize,
    seed: u64,
) -> Result<Vec<usize>, AnalysisError> {
    if features.len() != labels.len() {
        return Err(AnalysisError::Length { what: "features and labels", left: features.len(), right: labels.len() });
    }
    let fold = stratified_folds(labels, folds, seed)?;
    let mut predictions = vec![0; labels.len()];
    for f in 0..folds {
        let (train_x, train_y): (Vec<Vec<f64>>, Vec<usize>) = features
            .iter()
            .zip(labels)
            .zip(&fold)
            .filter(|(_, &g)| g != f)
            .map(|((x, &y), _)| (x.clone(), y))
            .unzip();
        let model = LdaModel::fit(&train_x, &train_y)?;
        for i in (0..labels.len()).filter(|&i| fold[i] == f) {
            predictions[i] = model.predict(&features[i]);
        }
    }
    Ok(predictions)
}
