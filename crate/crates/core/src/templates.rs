//! Circle and ellipse reference shapes and the two-number template features
//! of a cell: its distance to each of them.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{metrics, ConfusionMatrix, LdaModel, CLASS_NAMES};
use crate::contour::{normalize, Label, NormalizedCurve, RawContour};
use crate::metric::{MetricSpec, Prepared};
use crate::synthetic::{circle_points, ellipse_points};
use crate::Error;

/// Major-to-minor ratio of the ellipse template unless configured.
pub const DEFAULT_ASPECT: f64 = 4.0;

/// Aspect ratios tried by calibration.
pub fn calibration_grid() -> Vec<f64> {
    (0..=8).map(|i| 2.0 + 0.5 * i as f64).collect()
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TemplateError {
    #[error("ellipse aspect ratio must be finite and greater than 1, got {0}")]
    InvalidAspect(f64),
    #[error("sample count must be at least 3, got {0}")]
    SampleCount(usize),
    #[error("no aspect ratios to calibrate over")]
    EmptyGrid,
}

/// Canonical circle and axis-aligned ellipse.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub circle: NormalizedCurve,
    pub ellipse: NormalizedCurve,
    pub aspect: f64,
}

/// Builds both templates from dense polygons pushed through the same
/// [`normalize`] pipeline as the cells.
pub fn make_templates(n: usize, aspect: f64) -> Result<TemplateSet, Error> {
    if n < 3 {
        return Err(TemplateError::SampleCount(n).into());
    }
    if !(aspect.is_finite() && aspect > 1.0) {
        return Err(TemplateError::InvalidAspect(aspect).into());
    }
    let dense = 16 * n.max(256);
    let circle = RawContour::new("template-circle", circle_points(dense, 1.0), Label::Unlabeled("template".into()))?;
    let (a, b) = (aspect.sqrt(), 1.0 / aspect.sqrt());
    let ellipse = RawContour::new("template-ellipse", ellipse_points(dense, a, b), Label::Unlabeled("template".into()))?;
    Ok(TemplateSet { circle: normalize(&circle, n)?, ellipse: normalize(&ellipse, n)?, aspect })
}

/// Distances from one cell to the two templates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureVector {
    pub cell_id: String,
    pub d_circle: f64,
    pub d_ellipse: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 2] {
        [self.d_circle, self.d_ellipse]
    }
}

/// Templates converted once for a given metric.
pub struct PreparedTemplates {
    spec: MetricSpec,
    circle: Prepared,
    ellipse: Prepared,
}

impl PreparedTemplates {
    pub fn new(t: &TemplateSet, spec: MetricSpec) -> Result<Self, Error> {
        Ok(Self { spec, circle: spec.prepare(&t.circle)?, ellipse: spec.prepare(&t.ellipse)? })
    }

    /// Features of one cell. The cell is the moving curve of any search.
    pub fn features(&self, c: &NormalizedCurve) -> Result<FeatureVector, Error> {
        let p = self.spec.prepare(c)?;
        Ok(FeatureVector {
            cell_id: c.id().to_string(),
            d_circle: self.spec.distance(&self.circle, &p)?,
            d_ellipse: self.spec.distance(&self.ellipse, &p)?,
        })
    }

    /// Features of many cells, computed in parallel, in input order.
    pub fn features_all(&self, cells: &[NormalizedCurve]) -> Result<Vec<FeatureVector>, Error> {
        cells.par_iter().map(|c| self.features(c)).collect()
    }

    /// Sequential [`Self::features_all`], for timing.
    pub fn features_all_sequential(&self, cells: &[NormalizedCurve]) -> Result<Vec<FeatureVector>, Error> {
        cells.iter().map(|c| self.features(c)).collect()
    }
}

/// Template features of `c` under `spec`.
pub fn template_features(c: &NormalizedCurve, t: &TemplateSet, spec: MetricSpec) -> Result<FeatureVector, Error> {
    PreparedTemplates::new(t, spec)?.features(c)
}

/// Sickle-class F1 of every candidate aspect and the winner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub aspect: f64,
    /// `(aspect, F1)` in grid order; `None` where F1 is undefined.
    pub scores: Vec<(f64, Option<f64>)>,
}

/// Picks the ellipse aspect whose template features give the best Sickle F1
/// when LDA is fit and evaluated on all of `cells` (the first aspect wins
/// ties). `labels` are class indices.
pub fn calibrate_aspect(
    cells: &[NormalizedCurve],
    labels: &[usize],
    spec: MetricSpec,
    grid: &[f64],
) -> Result<Calibration, Error> {
    let n = cells.first().map_or(0, NormalizedCurve::n);
    let mut scores = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64)> = None;
    for &aspect in grid {
        let t = make_templates(n, aspect)?;
        let feats = PreparedTemplates::new(&t, spec)?.features_all(cells)?;
        let x: Vec<Vec<f64>> = feats.iter().map(|f| f.as_array().to_vec()).collect();
        let model = LdaModel::fit(&x, labels)?;
        let predicted: Vec<usize> = x.iter().map(|v| model.predict(v)).collect();
        let cm = ConfusionMatrix::from_predictions(labels, &predicted, &CLASS_NAMES);
        let f1 = metrics(&cm)?.per_class.get(1).and_then(|c| c.f1);
        scores.push((aspect, f1));
        let value = f1.unwrap_or(f64::NEG_INFINITY);
        if best.is_none_or(|(_, b)| value > b) {
            best = Some((aspect, value));
        }
    }
    let (aspect, _) = best.ok_or(TemplateError::EmptyGrid)?;
    Ok(Calibration { aspect, scores })
}

/// Writes `cell_id,d_circle,d_ellipse,label` rows.
pub fn write_features_csv(
    path: impl AsRef<Path>,
    features: &[FeatureVector],
    labels: &[Label],
) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["cell_id", "d_circle", "d_ellipse", "label"])?;
    for (f, l) in features.iter().zip(labels) {
        w.write_record([f.cell_id.clone(), f.d_circle.to_string(), f.d_ellipse.to_string(), l.name().to_string()])?;
    }
    w.flush()
}
