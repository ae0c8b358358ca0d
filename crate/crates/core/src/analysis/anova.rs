use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::AnalysisError;

/// Significance level of the reported critical values.
pub const ALPHA: f64 = 0.05;

/// One factor of a two-way ANOVA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaEffect {
    pub ss: f64,
    pub df: usize,
    pub ms: f64,
    /// `None` when the error variance is zero but the factor's is not.
    pub f: Option<f64>,
    pub p_value: Option<f64>,
    /// Upper `α = 0.05` quantile of `F(df, df_error)`.
    pub f_critical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaResidual {
    pub ss: f64,
    pub df: usize,
    pub ms: f64,
}

/// Two-way ANOVA without replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTable {
    pub rows: AnovaEffect,
    pub cols: AnovaEffect,
    pub error: AnovaResidual,
    pub ss_total: f64,
    pub df_total: usize,
}

/// Decomposes an `r × c` table (one observation per cell) into row, column
/// and residual sums of squares and tests both factors with F ratios.
///
/// A table without any variation gets F = 0 for both factors. When only the
/// residual vanishes the ratios are undefined and reported as `None`.
pub fn anova_two_way(table: &[Vec<f64>]) -> Result<AnovaTable, AnalysisError> {
    let r = table.len();
    let c = table.first().map_or(0, Vec::len);
    if r < 2 || c < 2 || table.iter().any(|row| row.len() != c) {
        return Err(AnalysisError::AnovaShape);
    }
    if table.iter().flatten().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    let total_n = (r * c) as f64;
    let grand: f64 = table.iter().flatten().sum::<f64>() / total_n;
    let row_means: Vec<f64> = table.iter().map(|row| row.iter().sum::<f64>() / c as f64).collect();
    let col_means: Vec<f64> = (0..c).map(|j| table.iter().map(|row| row[j]).sum::<f64>() / r as f64).collect();

    let ss_rows = c as f64 * row_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_cols = r as f64 * col_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let ss_total: f64 = table.iter().flatten().map(|v| (v - grand).powi(2)).sum();
    let mut ss_error = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            ss_error += (v - row_means[i] - col_means[j] + grand).powi(2);
        }
    }

    let (df_rows, df_cols) = (r - 1, c - 1);
    let df_error = df_rows * df_cols;
    let ms_error = ss_error / df_error as f64;
    // Residuals at rounding level relative to the data count as zero.
    let scale = table.iter().flatten().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let error_vanishes = ss_error <= 1e-24 * scale;

    let effect = |ss: f64, df: usize| -> AnovaEffect {
        let ms = ss / df as f64;
        let dist = FisherSnedecor::new(df as f64, df_error as f64).expect("positive degrees of freedom");
        let f = if ss_total <= 1e-24 * scale {
            Some(0.0)
        } else if error_vanishes {
            None
        } else {
            Some(ms / ms_error)
        };
        AnovaEffect {
            ss,
            df,
            ms,
            f,
            p_value: f.map(|f| dist.sf(f)),
            f_critical: dist.inverse_cdf(1.0 - ALPHA),
        }
    };

    Ok(AnovaTable {
        rows: effect(ss_rows, df_rows),
        cols: effect(ss_cols, df_cols),
        error: AnovaResidual { ss: ss_error, df: df_error, ms: ms_error },
        ss_total,
        df_total: r * c - 1,
    })
}
