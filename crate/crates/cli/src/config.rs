//! Experiment configuration: built-in defaults, then command-line flags, then
//! an optional TOML file, each layer overriding the previous one.

use std::path::{Path, PathBuf};

use cellshape::contour::DEFAULT_SAMPLES;
use cellshape::metric::{Method, MetricSpec, Space};
use cellshape::templates::DEFAULT_ASPECT;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// What a cell is described by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Features {
    /// Distances between every pair of cells.
    Pairwise,
    /// Distances from each cell to a circle and an ellipse.
    Templates,
}

/// Supervised classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Classifier {
    /// LDA for template features, k-NN for pairwise distances.
    Auto,
    Knn,
    Lda,
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub manifest: Option<PathBuf>,
    pub n: usize,
    pub space: Space,
    pub method: Method,
    pub features: Features,
    pub shift_step: usize,
    pub use_dp: bool,
    pub classifier: Classifier,
    pub knn_k: usize,
    pub folds: usize,
    pub ellipse_aspect: f64,
    pub calibrate_aspect: bool,
    pub seed: u64,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            n: DEFAULT_SAMPLES,
            space: Space::S2,
            method: Method::Fixed,
            features: Features::Templates,
            shift_step: 5,
            use_dp: false,
            classifier: Classifier::Auto,
            knn_k: 1,
            folds: 5,
            ellipse_aspect: DEFAULT_ASPECT,
            calibrate_aspect: false,
            seed: 0,
            output: PathBuf::from("out"),
        }
    }
}

/// Flags shared by the experiment commands. The same names are the keys of
/// the `--config` file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigArgs {
    /// TOML file whose keys override the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// CSV manifest with `path,label` rows.
    #[arg(long, short)]
    pub manifest: Option<PathBuf>,
    /// Samples per curve.
    #[arg(long)]
    pub n: Option<usize>,
    /// Shape space: S1 (Grassmann) or S2 (square-root velocity).
    #[arg(long)]
    pub space: Option<Space>,
    /// `fixed` or `reparam` (start-point search).
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub features: Option<Features>,
    /// Start-point stride of the `reparam` search.
    #[arg(long)]
    pub shift_step: Option<usize>,
    /// Refine the S2 `reparam` search by dynamic programming.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub use_dp: Option<bool>,
    #[arg(long)]
    pub classifier: Option<Classifier>,
    /// Neighbors voting in k-NN.
    #[arg(long)]
    pub knn_k: Option<usize>,
    /// Cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Major-to-minor axis ratio of the ellipse template.
    #[arg(long)]
    pub ellipse_aspect: Option<f64>,
    /// Choose the ellipse aspect by training Sickle F1 (templates only).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub calibrate_aspect: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for reports.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl ConfigArgs {
    /// Defaults, overridden by these flags, overridden by the config file.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = ExperimentConfig::default();
        self.apply(&mut cfg);
        if let Some(path) = &self.config {
            let file = read_config_file(path)?;
            file.apply(&mut cfg);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(v) = &self.manifest {
            cfg.manifest = Some(v.clone());
        }
        if let Some(v) = &self.output {
            cfg.output = v.clone();
        }
        macro_rules! copy {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field {
                    cfg.$target = v;
                })*
            };
        }
        copy!(
            n => n,
            space => space,
            method => method,
            features => features,
            shift_step => shift_step,
            use_dp => use_dp,
            classifier => classifier,
            knn_k => knn_k,
            folds => folds,
            ellipse_aspect => ellipse_aspect,
            calibrate_aspect => calibrate_aspect,
            seed => seed,
        );
    }
}

fn read_config_file(path: &Path) -> Result<ConfigArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config `{}`: {e}", path.display())))?;
    let mut file: ConfigArgs = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config `{}`: {e}", path.display())))?;
    // Relative paths in the file are relative to the file.
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut file.manifest, &mut file.output].into_iter().flatten() {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(file)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.n < 3 {
            return bad(format!("n must be at least 3, got {}", self.n));
        }
        if self.shift_step == 0 || self.shift_step > self.n {
            return bad(format!("shift_step must be in 1..={}, got {}", self.n, self.shift_step));
        }
        if self.knn_k == 0 {
            return bad("knn_k must be at least 1".into());
        }
        if self.folds < 2 {
            return bad(format!("folds must be at least 2, got {}", self.folds));
        }
        if !(self.ellipse_aspect.is_finite() && self.ellipse_aspect > 1.0) {
            return bad(format!("ellipse_aspect must be greater than 1, got {}", self.ellipse_aspect));
        }
        if self.classifier == Classifier::Lda && self.features == Features::Pairwise {
            return bad("LDA needs template features".into());
        }
        Ok(())
    }

    /// The distance this configuration asks for.
    pub fn spec(&self) -> MetricSpec {
        MetricSpec::new(self.space, self.method).with_shift_step(self.shift_step).with_dp(self.use_dp)
    }

    /// The classifier actually used.
    pub fn resolved_classifier(&self) -> Classifier {
        match (self.classifier, self.features) {
            (Classifier::Auto, Features::Templates) => Classifier::Lda,
            (Classifier::Auto, Features::Pairwise) => Classifier::Knn,
            (c, _) => c,
        }
    }

    /// The manifest, or a usage error.
    pub fn manifest(&self) -> Result<&Path, CliError> {
        self.manifest.as_deref().ok_or_else(|| CliError::Usage("no manifest given (use --manifest)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ConfigArgs::default().resolve().unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.spec().to_string(), "S2-fixed");
        assert_eq!(cfg.resolved_classifier(), Classifier::Lda);
    }

    #[test]
    fn file_overrides_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "space = \"S1\"\nknn_k = 3\nmanifest = \"data/m.csv\"\n").unwrap();
        let flags = ConfigArgs { config: Some(path), space: Some(Space::S2), folds: Some(4), ..Default::default() };
        let cfg = flags.resolve().unwrap();
        assert_eq!(cfg.space, Space::S1);
        assert_eq!(cfg.knn_k, 3);
        assert_eq!(cfg.folds, 4);
        assert_eq!(cfg.manifest.unwrap(), dir.path().join("data/m.csv"));
    }

    #[test]
    fn unknown_keys_and_bad_values_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "nope = 1\n").unwrap();
        let err = ConfigArgs { config: Some(path), ..Default::default() }.resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        for args in [
            ConfigArgs { n: Some(2), ..Default::default() },
            ConfigArgs { shift_step: Some(0), ..Default::default() },
            ConfigArgs { folds: Some(1), ..Default::default() },
            ConfigArgs { ellipse_aspect: Some(0.5), ..Default::default() },
            ConfigArgs {
                classifier: Some(Classifier::Lda),
                features: Some(Features::Pairwise),
                ..Default::default()
            },
        ] {
            assert!(matches!(args.resolve(), Err(CliError::Usage(_))));
        }
    }
}
