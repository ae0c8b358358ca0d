use std::path::PathBuf;
use std::process::ExitCode;

use cellshape_cli::bench::BenchOptions;
use cellshape_cli::preprocess::{preprocess, PreprocessOptions};
use cellshape_cli::{bench, classify, cluster, geodesic, CliError, ConfigArgs};
use clap::{Parser, Subcommand};

/// Shape-space classification of planar cell contours.
#[derive(Parser)]
#[command(name = "cellshape", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validated supervised classification.
    Classify {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// k-medoids clustering.
    Cluster {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Group counts, e.g. `3` or `3,4,5`.
        #[arg(short, long, value_delimiter = ',', default_value = "3")]
        k: Vec<usize>,
    },
    /// Geodesic between two contours, drawn as SVG.
    Geodesic {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Id of the first contour (manifest path without extension).
        #[arg(long)]
        from: String,
        /// Id of the second contour.
        #[arg(long)]
        to: String,
        /// Intermediate shapes.
        #[arg(long, default_value_t = 5)]
        steps: usize,
        /// SVG file; defaults to `<output>/geodesic.svg`.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Timing and scaling of the distance computations.
    Bench {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Cell counts for the scaling fit.
        #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
        sizes: Vec<usize>,
        /// Cell count for the search-versus-fixed comparison.
        #[arg(long, default_value_t = 100)]
        ratio_size: usize,
    },
    /// Turns a directory of contour files or cell images into a manifest.
    Preprocess {
        /// Directory to scan.
        input: PathBuf,
        /// Output directory for the manifest and contour files.
        #[arg(long, short)]
        output: PathBuf,
        /// Gaussian smoothing of traced image outlines, in vertices.
        #[arg(long)]
        smooth: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { cfg } => classify::run(&cfg.resolve()?).map(drop),
        Command::Cluster { cfg, k } => cluster::run(&cfg.resolve()?, &k).map(drop),
        Command::Geodesic { cfg, from, to, steps, svg } => {
            geodesic::run(&cfg.resolve()?, &from, &to, steps, svg.as_deref()).map(drop)
        }
        Command::Bench { cfg, sizes, ratio_size } => {
            let opts = BenchOptions { sizes, ratio_size, ..Default::default() };
            bench::run(&cfg.resolve()?, &opts).map(drop)
        }
        Command::Preprocess { input, output, smooth } => {
            let opts = PreprocessOptions { image_smoothing: smooth, ..Default::default() };
            let report = preprocess(&input, &output, &opts)?;
            for (label, count) in &report.per_label {
                println!("{label}: {count}");
            }
            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.path, s.reason);
            }
            println!("wrote {} ({} contours)", report.manifest.display(), report.converted);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
