//! Supervised classification with cross-validation.

use std::time::Instant;

use cellshape::analysis::{
    distance_matrix, knn_classify, lda_classify, metrics, ConfusionMatrix, DistanceMatrix, MetricsReport,
    CLASS_NAMES,
};
use cellshape::templates::{
    calibrate_aspect, calibration_grid, make_templates, write_features_csv, Calibration, FeatureVector,
    PreparedTemplates,
};
use serde::Serialize;

use crate::config::{Classifier, ExperimentConfig, Features};
use crate::report::{ensure_dir, io_result, write_json, write_text};
use crate::{CliError, Dataset};

/// Everything `classify` reports.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub command: &'static str,
    pub config: ExperimentConfig,
    /// Distance used, e.g. `S2-fixed`.
    pub metric: String,
    pub classifier: Classifier,
    /// Neighbors, for k-NN.
    pub knn_k: Option<usize>,
    /// Ellipse aspect used, for template features.
    pub aspect: Option<f64>,
    pub calibration: Option<Calibration>,
    pub cells: usize,
    /// Whether matrix entries are the smaller of two directed distances.
    pub symmetrized: Option<bool>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

/// A finished classification run.
#[derive(Debug, Clone)]
pub struct ClassifyOutcome {
    pub report: ClassifyReport,
    pub predictions: Vec<usize>,
    pub truth: Vec<usize>,
    pub matrix: Option<DistanceMatrix>,
    pub features: Option<Vec<FeatureVector>>,
}

/// Template features of every cell at the configured (or calibrated) aspect.
pub fn template_features(
    cfg: &ExperimentConfig,
    data: &Dataset,
    labels: &[usize],
) -> Result<(Vec<FeatureVector>, f64, Option<Calibration>), CliError> {
    let spec = cfg.spec();
    let calibration = if cfg.calibrate_aspect {
        Some(calibrate_aspect(&data.curves, labels, spec, &calibration_grid())?)
    } else {
        None
    };
    let aspect = calibration.as_ref().map_or(cfg.ellipse_aspect, |c| c.aspect);
    let templates = make_templates(cfg.n, aspect)?;
    let features = PreparedTemplates::new(&templates, spec)?.features_all(&data.curves)?;
    Ok((features, aspect, calibration))
}

/// Runs the classification of `cfg` on `data` without writing anything.
pub fn classify(cfg: &ExperimentConfig, data: &Dataset) -> Result<ClassifyOutcome, CliError> {
    let truth = data.class_labels()?;
    let classifier = cfg.resolved_classifier();
    let started = Instant::now();
    let (matrix, features, aspect, calibration) = match cfg.features {
        Features::Pairwise => (Some(distance_matrix(&data.curves, &cfg.spec())?), None, None, None),
        Features::Templates => {
            let (f, aspect, cal) = template_features(cfg, data, &truth)?;
            let m = (classifier == Classifier::Knn).then(|| DistanceMatrix::from_features(&f));
            (m, Some(f), Some(aspect), cal)
        }
    };
    eprintln!("{} distances for {} cells in {:.2?}", cfg.spec(), data.len(), started.elapsed());

    let predictions = match classifier {
        Classifier::Lda => {
            let f = features.as_ref().expect("LDA runs on template features");
            let x: Vec<Vec<f64>> = f.iter().map(|v| v.as_array().to_vec()).collect();
            lda_classify(&x, &truth, cfg.folds, cfg.seed).map_err(cellshape::Error::from)?
        }
        _ => {
            let m = matrix.as_ref().expect("k-NN runs on a distance matrix");
            knn_classify(m, &truth, cfg.knn_k, cfg.folds, cfg.seed).map_err(cellshape::Error::from)?
        }
    };
    let confusion = ConfusionMatrix::from_predictions(&truth, &predictions, &CLASS_NAMES);
    let metrics = metrics(&confusion).map_err(cellshape::Error::from)?;
    let report = ClassifyReport {
        command: "classify",
        config: cfg.clone(),
        metric: cfg.spec().to_string(),
        classifier,
        knn_k: (classifier == Classifier::Knn).then_some(cfg.knn_k),
        aspect,
        calibration,
        cells: data.len(),
        symmetrized: (cfg.features == Features::Pairwise).then(|| matrix.as_ref().is_some_and(|m| m.symmetrized())),
        confusion,
        metrics,
    };
    Ok(ClassifyOutcome { report, predictions, truth, matrix, features })
}

/// Header, confusion matrix and metrics as aligned text.
pub fn summary(report: &ClassifyReport) -> String {
    let cfg = &report.config;
    let mut out = format!("{} {:?} features, {:?}", report.metric, cfg.features, report.classifier);
    if let Some(k) = report.knn_k {
        out += &format!(" (k = {k})");
    }
    if let Some(a) = report.aspect {
        out += &format!(", ellipse aspect {a}");
    }
    out += &format!(", {} folds, seed {}, {} cells\n\n", cfg.folds, cfg.seed, report.cells);
    out += &report.confusion.to_table();
    out.push('\n');
    out += &report.metrics.to_table();
    out.push('\n');
    out
}

/// Writes the distance matrix or feature CSV, predictions, confusion,
/// metrics and the full report into `cfg.output`.
pub fn write_outputs(cfg: &ExperimentConfig, data: &Dataset, outcome: &ClassifyOutcome) -> Result<(), CliError> {
    let dir = &cfg.output;
    ensure_dir(dir)?;
    if let Some(f) = &outcome.features {
        let path = dir.join("features.csv");
        let labels: Vec<_> = data.raw.iter().map(|c| c.label().clone()).collect();
        io_result(&path, write_features_csv(&path, f, &labels))?;
    }
    if let (Features::Pairwise, Some(m)) = (cfg.features, &outcome.matrix) {
        let path = dir.join("distances.csv");
        io_result(&path, m.write_csv(&path))?;
    }
    let mut csv = String::from("id,label,predicted\n");
    for (i, c) in data.curves.iter().enumerate() {
        csv += &format!("{},{},{}\n", c.id(), CLASS_NAMES[outcome.truth[i]], CLASS_NAMES[outcome.predictions[i]]);
    }
    write_text(&dir.join("predictions.csv"), &csv)?;
    write_json(dir, "confusion.json", &outcome.report.confusion)?;
    write_json(dir, "metrics.json", &outcome.report.metrics)?;
    write_json(dir, "report.json", &outcome.report)?;
    write_text(&dir.join("summary.txt"), &summary(&outcome.report))?;
    Ok(())
}

/// `classify`: load, classify, write, print the summary.
pub fn run(cfg: &ExperimentConfig) -> Result<ClassifyOutcome, CliError> {
    let data = Dataset::load(cfg)?;
    let outcome = classify(cfg, &data)?;
    write_outputs(cfg, &data, &outcome)?;
    print!("{}", summary(&outcome.report));
    Ok(outcome)
}
