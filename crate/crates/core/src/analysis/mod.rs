//! Classification, clustering and their evaluation.
//!
//! Classes are small integers. For the three erythrocyte classes the order is
//! Normal, Sickle, Other deformation ([`class_index`]); ties in every
//! classifier go to the smaller index.

mod anova;
mod confusion;
mod cv;
mod kmedoids;
mod knn;
mod lda;

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::contour::{Label, NormalizedCurve};
use crate::metric::{MetricSpec, Prepared};
use crate::templates::FeatureVector;
use crate::Error;

pub use anova::{anova_two_way, AnovaEffect, AnovaResidual, AnovaTable};
pub use confusion::{cluster_confusion, metrics, ClassMetrics, ClusterTable, ConfusionMatrix, MetricsReport};
pub use cv::stratified_folds;
pub use kmedoids::{kmedoids, silhouette, ClusterResult};
pub use knn::knn_classify;
pub use lda::{lda_classify, LdaModel};

/// Short names of the three erythrocyte classes, in index order.
pub const CLASS_NAMES: [&str; 3] = ["N", "S", "OD"];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {need} items, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("class {class} has {count} members, fewer than the {folds} folds")]
    SmallClass { class: usize, count: usize, folds: usize },
    #[error("at least 2 folds are needed, got {0}")]
    Folds(usize),
    #[error("k must be at least 1, got {0}")]
    ZeroK(usize),
    #[error("k = {k} exceeds the {distinct} distinct points")]
    TooManyClusters { k: usize, distinct: usize },
    #[error("singular pooled covariance")]
    SingularCovariance,
    #[error("silhouette needs at least 2 non-empty groups")]
    SingleGroup,
    #[error("label `{0}` is not one of Normal, Sickle, Other")]
    UnknownClass(String),
    #[error("{what}: lengths differ ({left} vs {right})")]
    Length { what: &'static str, left: usize, right: usize },
    #[error("empty confusion matrix")]
    EmptyMatrix,
    #[error("ANOVA table must be at least 2×2 with equal row lengths")]
    AnovaShape,
    #[error("non-finite value in input")]
    NonFinite,
}

/// Index of a label among Normal, Sickle, Other.
pub fn class_index(label: &Label) -> Result<usize, AnalysisError> {
    match label {
        Label::Normal => Ok(0),
        Label::Sickle => Ok(1),
        Label::OtherDeformation => Ok(2),
        Label::Unlabeled(name) => Err(AnalysisError::UnknownClass(name.clone())),
    }
}

/// Class indices of a labeled set.
pub fn class_indices(labels: &[Label]) -> Result<Vec<usize>, AnalysisError> {
    labels.iter().map(class_index).collect()
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    d: Vec<f64>,
    /// Entries are the smaller of the two directed distances.
    symmetrized: bool,
}

impl DistanceMatrix {
    /// Builds a matrix from the upper triangle given by `f(i, j)`, `i < j`.
    pub fn from_fn(ids: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let k = ids.len();
        let mut d = vec![0.0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let v = f(i, j);
                d[i * k + j] = v;
                d[j * k + i] = v;
            }
        }
        Self { ids, d, symmetrized: false }
    }

    /// Euclidean distances between feature vectors.
    pub fn from_features(features: &[FeatureVector]) -> Self {
        let ids = features.iter().map(|f| f.cell_id.clone()).collect();
        Self::from_fn(ids, |i, j| {
            let (a, b) = (features[i].as_array(), features[j].as_array());
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.len();
        &self.d[i * k..(i + 1) * k]
    }

    pub fn symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// CSV with a header row `id,<ids…>` and one row per id.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let mut w = csv::Writer::from_writer(&mut out);
        let mut header = vec!["id".to_string()];
        header.extend(self.ids.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        drop(w);
        out.flush()
    }
}

/// Pairwise distances of `curves` under `spec`. Only the upper triangle is
/// computed; methods that search over one curve store the smaller of the
/// two directions.
pub fn distance_matrix(curves: &[NormalizedCurve], spec: &MetricSpec) -> Result<DistanceMatrix, Error> {
    let prepared: Vec<Prepared> = curves.par_iter().map(|c| spec.prepare(c)).collect::<Result<_, _>>()?;
    let ids: Vec<String> = curves.iter().map(|c| c.id().to_string()).collect();
    distance_matrix_prepared(&prepared, ids, spec, true)
}

/// [`distance_matrix`] on curves already converted by `spec`, optionally on
/// the calling thread only.
pub fn distance_matrix_prepared(
    prepared: &[Prepared],
    ids: Vec<String>,
    spec: &MetricSpec,
    parallel: bool,
) -> Result<DistanceMatrix, Error> {
    let k = prepared.len();
    if k < 2 {
        return Err(AnalysisError::TooFew { need: 2, got: k }.into());
    }
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let one = |&(i, j): &(usize, usize)| {
        spec.symmetric_distance(&prepared[i], &prepared[j]).map_err(|e| Error::Pair {
            a: ids[i].clone(),
            b: ids[j].clone(),
            source: Box::new(e),
        })
    };
    let values: Vec<f64> = if parallel {
        pairs.par_iter().map(one).collect::<Result<_, _>>()?
    } else {
        pairs.iter().map(one).collect::<Result<_, _>>()?
    };
    let mut it = values.into_iter();
    let mut m = DistanceMatrix::from_fn(ids, |_, _| it.next().expect("one value per pair"));
    m.symmetrized = !spec.is_symmetric();
    Ok(m)
}

/// Fraction of equal entries, in percent.
pub fn accuracy(truth: &[usize], predicted: &[usize]) -> f64 {
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    100.0 * hits as f64 / truth.len().max(1) as f64
}
