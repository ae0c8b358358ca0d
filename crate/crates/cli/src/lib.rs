//! The experiment runner behind the `cellshape` binary.
//!
//! Every command reads a `path,label` manifest of contour files, brings the
//! contours to canonical form and writes its reports into the configured
//! output directory. Reports embed the resolved [`ExperimentConfig`], so a
//! report file is enough to rerun the experiment that produced it.

pub mod bench;
pub mod classify;
pub mod cluster;
pub mod config;
pub mod geodesic;
pub mod preprocess;
mod report;

use std::collections::HashSet;
use std::path::PathBuf;

use cellshape::analysis::{class_indices, AnalysisError};
use cellshape::contour::{load_contours, normalize, ContourError, NormalizedCurve, RawContour};

pub use config::{Classifier, ConfigArgs, ExperimentConfig, Features};

/// Failure of a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config or input files.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] cellshape::Error),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write `{}`: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage and input errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<ContourError> for CliError {
    fn from(e: ContourError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Contours of a manifest, raw and canonical, in manifest order.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub raw: Vec<RawContour>,
    pub curves: Vec<NormalizedCurve>,
}

impl Dataset {
    /// Reads and normalizes every contour of `cfg`'s manifest.
    pub fn load(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let path = cfg.manifest()?;
        if !path.is_file() {
            return Err(CliError::Usage(format!("manifest `{}` not found", path.display())));
        }
        Self::from_raw(load_contours(path)?, cfg.n)
    }

    pub fn from_raw(raw: Vec<RawContour>, n: usize) -> Result<Self, CliError> {
        let mut seen = HashSet::new();
        for c in &raw {
            if !seen.insert(c.id()) {
                return Err(CliError::Usage(format!("duplicate contour id `{}`", c.id())));
            }
        }
        let curves = raw.iter().map(|c| normalize(c, n)).collect::<Result<_, _>>()?;
        Ok(Self { raw, curves })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.curves.iter().map(|c| c.id().to_string()).collect()
    }

    /// Class indices (Normal, Sickle, Other); any other label is an error.
    pub fn class_labels(&self) -> Result<Vec<usize>, CliError> {
        let labels: Vec<_> = self.raw.iter().map(|c| c.label().clone()).collect();
        class_indices(&labels).map_err(|e| match e {
            AnalysisError::UnknownClass(name) => {
                CliError::Usage(format!("label `{name}` is not one of Normal, Sickle, Other"))
            }
            other => CliError::Compute(other.into()),
        })
    }

    /// Position of the contour with id `id`.
    pub fn position(&self, id: &str) -> Result<usize, CliError> {
        self.curves
            .iter()
            .position(|c| c.id() == id)
            .ok_or_else(|| CliError::Usage(format!("no contour with id `{id}` in the manifest")))
    }
}
