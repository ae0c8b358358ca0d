//! k-medoids clustering of cells.

use cellshape::analysis::{
    cluster_confusion, distance_matrix, kmedoids, metrics, ClusterResult, ClusterTable, DistanceMatrix, MetricsReport,
    CLASS_NAMES,
};
use cellshape::templates::{make_templates, PreparedTemplates};
use serde::Serialize;

use crate::config::{ExperimentConfig, Features};
use crate::report::{ensure_dir, write_json, write_text};
use crate::{CliError, Dataset};

/// One clustering at a given `k`.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterRun {
    pub k: usize,
    pub result: ClusterResult,
    /// Members per group.
    pub sizes: Vec<usize>,
    /// Matched confusion (k = 3) or class-by-group counts; labeled data only.
    pub table: Option<ClusterTable>,
    /// Metrics of the matched confusion.
    pub metrics: Option<MetricsReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub metric: String,
    /// `pairwise` distances, or Euclidean distances between template features.
    pub basis: Features,
    pub aspect: Option<f64>,
    pub cells: usize,
    pub runs: Vec<ClusterRun>,
}

/// The matrix clustered under `cfg`.
pub fn cluster_matrix(cfg: &ExperimentConfig, data: &Dataset) -> Result<DistanceMatrix, CliError> {
    Ok(match cfg.features {
        Features::Pairwise => distance_matrix(&data.curves, &cfg.spec())?,
        Features::Templates => {
            let t = make_templates(cfg.n, cfg.ellipse_aspect)?;
            let f = PreparedTemplates::new(&t, cfg.spec())?.features_all(&data.curves)?;
            DistanceMatrix::from_features(&f)
        }
    })
}

/// Clusters `data` for every `k` in `ks`.
pub fn cluster(cfg: &ExperimentConfig, data: &Dataset, ks: &[usize]) -> Result<ClusterReport, CliError> {
    if ks.is_empty() {
        return Err(CliError::Usage("no k given".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k < 2) {
        return Err(CliError::Usage(format!("k must be at least 2, got {k}")));
    }
    // Unlabeled data is fine; it only loses the confusion tables.
    let labels = data.class_labels().ok();
    let dm = cluster_matrix(cfg, data)?;
    let mut runs = Vec::with_capacity(ks.len());
    for &k in ks {
        let result = kmedoids(&dm, k, cfg.seed).map_err(cellshape::Error::from)?;
        let mut sizes = vec![0; k];
        for &g in &result.assignment {
            sizes[g] += 1;
        }
        let (table, metrics) = match &labels {
            Some(l) => {
                let table = cluster_confusion(&result, l, &CLASS_NAMES).map_err(cellshape::Error::from)?;
                let m = table.matched.then(|| metrics(&table.matrix)).transpose().map_err(cellshape::Error::from)?;
                (Some(table), m)
            }
            None => (None, None),
        };
        runs.push(ClusterRun { k, result, sizes, table, metrics });
    }
    Ok(ClusterReport {
        command: "cluster",
        config: cfg.clone(),
        metric: cfg.spec().to_string(),
        basis: cfg.features,
        aspect: (cfg.features == Features::Templates).then_some(cfg.ellipse_aspect),
        cells: data.len(),
        runs,
    })
}

pub fn summary(report: &ClusterReport) -> String {
    let mut out = format!("{} {:?} k-medoids, seed {}, {} cells\n", report.metric, report.basis, report.config.seed, report.cells);
    for run in &report.runs {
        out += &format!("\nk = {}: ASW {:.2}, sizes {:?}\n", run.k, run.result.asw, run.sizes);
        if let Some(t) = &run.table {
            out += &t.matrix.to_table();
        }
        if let Some(m) = &run.metrics {
            out += &m.to_table();
            out.push('\n');
        }
    }
    out
}

/// Writes `clusters.json`, one `clusters_k<k>.csv` per run and `summary.txt`.
pub fn write_outputs(cfg: &ExperimentConfig, data: &Dataset, report: &ClusterReport) -> Result<(), CliError> {
    let dir = &cfg.output;
    ensure_dir(dir)?;
    for run in &report.runs {
        let mut csv = String::from("id,label,group\n");
        for (c, &g) in data.raw.iter().zip(&run.result.assignment) {
            csv += &format!("{},{},G{}\n", c.id(), c.label(), g + 1);
        }
        write_text(&dir.join(format!("clusters_k{}.csv", run.k)), &csv)?;
    }
    write_json(dir, "clusters.json", report)?;
    write_text(&dir.join("summary.txt"), &summary(report))
}

/// `cluster`: load, cluster, write, print the summary.
pub fn run(cfg: &ExperimentConfig, ks: &[usize]) -> Result<ClusterReport, CliError> {
    let data = Dataset::load(cfg)?;
    let report = cluster(cfg, &data, ks)?;
    write_outputs(cfg, &data, &report)?;
    print!("{}", summary(&report));
    Ok(report)
}
