use itertools::Itertools;
use serde::{Serialize, Serializer};

use super::{AnalysisError, ClusterResult, CLASS_NAMES};

/// Counts of true class (rows) against predicted class or group (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    /// Square matrix over `names` from paired class indices.
    pub fn from_predictions(truth: &[usize], predicted: &[usize], names: &[&str]) -> Self {
        let k = names.len();
        let mut counts = vec![vec![0; k]; k];
        for (&t, &p) in truth.iter().zip(predicted) {
            counts[t][p] += 1;
        }
        Self::from_counts(counts, names)
    }

    /// Square matrix over `names`.
    pub fn from_counts(counts: Vec<Vec<usize>>, names: &[&str]) -> Self {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        Self { rows: names.clone(), cols: names, counts }
    }

    /// Three-class matrix in N, S, OD order.
    pub fn three_class(counts: [[usize; 3]; 3]) -> Self {
        Self::from_counts(counts.iter().map(|r| r.to_vec()).collect(), &CLASS_NAMES)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols.len()
    }

    /// Aligned text rendering.
    pub fn to_table(&self) -> String {
        let width = self
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .chain(self.cols.iter().map(String::len))
            .max()
            .unwrap_or(1)
            .max(3);
        let label_w = self.rows.iter().map(String::len).max().unwrap_or(0).max(2);
        let mut out = format!("{:label_w$}", "");
        for c in &self.cols {
            out += &format!(" {c:>width$}");
        }
        out.push('\n');
        for (r, row) in self.rows.iter().zip(&self.counts) {
            out += &format!("{r:label_w$}");
            for v in row {
                out += &format!(" {v:>width$}");
            }
            out.push('\n');
        }
        out
    }
}

fn round2<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((v * 100.0).round() / 100.0)
}

fn round2_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => round2(v, s),
        None => s.serialize_none(),
    }
}

/// Per-class rates in percent; `None` where the denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: String,
    #[serde(serialize_with = "round2_opt")]
    pub tpr: Option<f64>,
    #[serde(serialize_with = "round2_opt")]
    pub precision: Option<f64>,
    #[serde(serialize_with = "round2_opt")]
    pub f1: Option<f64>,
}

/// Metrics of a square confusion matrix, in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    #[serde(serialize_with = "round2")]
    pub accuracy: f64,
    /// Accuracy that also accepts Sickle ↔ Other confusions; three-class
    /// matrices only.
    #[serde(serialize_with = "round2_opt")]
    pub sds: Option<f64>,
}

impl MetricsReport {
    /// Aligned text rendering.
    pub fn to_table(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        let mut out = String::from("class      TPR        P       F1\n");
        for c in &self.per_class {
            out += &format!("{:<5} {:>8} {:>8} {:>8}\n", c.class, fmt(c.tpr), fmt(c.precision), fmt(c.f1));
        }
        out += &format!("Acc {:.2}", self.accuracy);
        if let Some(sds) = self.sds {
            out += &format!(" / SDS {sds:.2}");
        }
        out.push('\n');
        out
    }
}

fn percent(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// TPR, precision, F1 per class, accuracy and (for three classes) the
/// SDS score `(n₁₁ + n₂₂ + n₃₃ + n₂₃ + n₃₂) / total`.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport, AnalysisError> {
    let total = cm.total();
    if total == 0 || !cm.is_square() {
        return Err(AnalysisError::EmptyMatrix);
    }
    let k = cm.rows.len();
    let n = &cm.counts;
    let per_class = (0..k)
        .map(|i| {
            let row: usize = n[i].iter().sum();
            let col: usize = (0..k).map(|j| n[j][i]).sum();
            let tpr = percent(n[i][i], row);
            let precision = percent(n[i][i], col);
            let f1 = match (tpr, precision) {
                (Some(t), Some(p)) if t + p > 0.0 => Some(2.0 * t * p / (t + p)),
                _ => None,
            };
            ClassMetrics { class: cm.rows[i].clone(), tpr, precision, f1 }
        })
        .collect();
    let trace: usize = (0..k).map(|i| n[i][i]).sum();
    let sds = (k == 3).then(|| 100.0 * (trace + n[1][2] + n[2][1]) as f64 / total as f64);
    Ok(MetricsReport { per_class, accuracy: 100.0 * trace as f64 / total as f64, sds })
}

/// Confusion of a clustering against the true classes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterTable {
    pub matrix: ConfusionMatrix,
    /// Groups were matched to classes; otherwise `matrix` is the raw
    /// class-by-group contingency table.
    pub matched: bool,
}

/// With as many groups as classes, matches groups to classes by the
/// permutation with the largest agreement (ties go to the first permutation
/// in lexicographic order) and returns the resulting confusion matrix.
/// Otherwise returns the class-by-group contingency table with columns
/// `G1, G2, …`.
pub fn cluster_confusion(
    cr: &ClusterResult,
    labels: &[usize],
    class_names: &[&str],
) -> Result<ClusterTable, AnalysisError> {
    if labels.len() != cr.assignment.len() {
        return Err(AnalysisError::Length { what: "labels and assignment", left: labels.len(), right: cr.assignment.len() });
    }
    let classes = class_names.len();
    let mut table = vec![vec![0usize; cr.k]; classes];
    for (&c, &g) in labels.iter().zip(&cr.assignment) {
        table[c][g] += 1;
    }
    if cr.k != classes {
        let cols: Vec<String> = (1..=cr.k).map(|g| format!("G{g}")).collect();
        let matrix = ConfusionMatrix {
            rows: class_names.iter().map(|s| s.to_string()).collect(),
            cols,
            counts: table,
        };
        return Ok(ClusterTable { matrix, matched: false });
    }
    // `perm[g]` is the class assigned to group `g`.
    let best = (0..classes)
        .permutations(classes)
        .max_by_key(|perm| {
            let agree: usize = perm.iter().enumerate().map(|(g, &c)| table[c][g]).sum();
            // Earlier permutations win ties.
            (agree, std::cmp::Reverse(perm.clone()))
        })
        .expect("at least one permutation");
    let mut counts = vec![vec![0usize; classes]; classes];
    for (c, row) in table.iter().enumerate() {
        for (g, &v) in row.iter().enumerate() {
            counts[c][best[g]] += v;
        }
    }
    Ok(ClusterTable { matrix: ConfusionMatrix::from_counts(counts, class_names), matched: true })
}
