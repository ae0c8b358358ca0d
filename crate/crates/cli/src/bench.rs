//! Timing of the three ways to describe a cell set, and their growth with
//! the number of cells.

use std::hint::black_box;
use std::time::{Duration, Instant};

use cellshape::analysis::distance_matrix_prepared;
use cellshape::contour::{normalize, NormalizedCurve};
use cellshape::metric::{Method, MetricSpec, Prepared};
use cellshape::synthetic::random_curves;
use cellshape::templates::{make_templates, PreparedTemplates};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::report::{ensure_dir, write_json};
use crate::{CliError, Dataset};

/// Allowed deviation of a fitted log-log slope.
pub const SLOPE_TOL: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    /// Cell counts of the scaling runs.
    pub sizes: Vec<usize>,
    /// Cell count of the search-versus-fixed comparison.
    pub ratio_size: usize,
    /// Each measurement repeats until at least this much time has passed.
    pub min_time: Duration,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { sizes: vec![50, 100, 200], ratio_size: 100, min_time: Duration::from_millis(200) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub sizes: Vec<usize>,
    /// Seconds for all pairwise fixed distances, per size.
    pub pairwise_seconds: Vec<f64>,
    /// Seconds for all template features, per size.
    pub templates_seconds: Vec<f64>,
    pub pairwise_slope: f64,
    pub templates_slope: f64,
    pub ratio_size: usize,
    pub fixed_seconds: f64,
    pub reparam_seconds: f64,
    pub ratio: f64,
    pub checks: Vec<Check>,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

type Task<'a> = Box<dyn FnMut() -> Result<(), CliError> + 'a>;

/// Seconds per run of every task. Tasks are sampled round-robin so slow
/// stretches of the machine hit all of them alike; each sample averages a
/// batch of runs lasting about a tenth of `min_time`, and the fastest sample
/// per task is kept.
fn time_interleaved(min_time: Duration, tasks: &mut [Task<'_>]) -> Result<Vec<f64>, CliError> {
    let target = min_time.as_secs_f64() / 10.0;
    let mut batches = Vec::with_capacity(tasks.len());
    for task in tasks.iter_mut() {
        let t = Instant::now();
        task()?;
        let once = t.elapsed().as_secs_f64().max(1e-9);
        batches.push(((target / once).ceil() as usize).max(1));
    }
    let mut best = vec![f64::INFINITY; tasks.len()];
    let start = Instant::now();
    let budget = min_time * tasks.len() as u32;
    let mut rounds = 0;
    while rounds < 3 || start.elapsed() < budget {
        for (k, task) in tasks.iter_mut().enumerate() {
            let t = Instant::now();
            for _ in 0..batches[k] {
                task()?;
            }
            best[k] = best[k].min(t.elapsed().as_secs_f64() / batches[k] as f64);
        }
        rounds += 1;
    }
    Ok(best)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Cells to time: the manifest's if one is configured, otherwise seeded
/// random curves.
pub fn bench_curves(cfg: &ExperimentConfig, count: usize) -> Result<Vec<NormalizedCurve>, CliError> {
    if cfg.manifest.is_some() {
        let data = Dataset::load(cfg)?;
        if data.len() < count {
            return Err(CliError::Usage(format!("bench needs {count} contours, the manifest has {}", data.len())));
        }
        return Ok(data.curves.into_iter().take(count).collect());
    }
    random_curves(count, 200, cfg.seed)
        .iter()
        .map(|c| normalize(c, cfg.n).map_err(CliError::from))
        .collect()
}

/// Times pairwise fixed distances and template features at every size, and
/// the start-point search against the fixed method at `ratio_size`. All
/// work runs on the calling thread.
pub fn bench(cfg: &ExperimentConfig, curves: &[NormalizedCurve], opts: &BenchOptions) -> Result<BenchReport, CliError> {
    let mut sizes = opts.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(CliError::Usage(format!("need at least 3 distinct sizes for a slope fit, got {:?}", opts.sizes)));
    }
    let largest = sizes.last().copied().unwrap_or(0).max(opts.ratio_size);
    if curves.len() < largest || sizes[0] < 2 || opts.ratio_size < 2 {
        return Err(CliError::Usage(format!("sizes must be at least 2 and at most the {} cells available", curves.len())));
    }
    let fixed = MetricSpec::new(cfg.space, Method::Fixed);
    let reparam = MetricSpec::new(cfg.space, Method::Reparam).with_shift_step(cfg.shift_step).with_dp(cfg.use_dp);
    let prepared: Vec<Prepared> = curves[..largest].iter().map(|c| fixed.prepare(c)).collect::<Result<_, _>>()?;
    let ids: Vec<String> = curves[..largest].iter().map(|c| c.id().to_string()).collect();
    let templates = PreparedTemplates::new(&make_templates(cfg.n, cfg.ellipse_aspect)?, fixed)?;

    let pairwise = |spec: MetricSpec, k: usize| -> Task<'_> {
        let ids = &ids;
        let prepared = &prepared;
        Box::new(move || {
            black_box(distance_matrix_prepared(&prepared[..k], ids[..k].to_vec(), &spec, false)?);
            Ok(())
        })
    };
    let features = |k: usize| -> Task<'_> {
        let templates = &templates;
        Box::new(move || {
            black_box(templates.features_all_sequential(&curves[..k])?);
            Ok(())
        })
    };
    let mut scaling: Vec<Task<'_>> = sizes.iter().map(|&k| pairwise(fixed, k)).collect();
    scaling.extend(sizes.iter().map(|&k| features(k)));
    let times = time_interleaved(opts.min_time, &mut scaling)?;
    drop(scaling);
    let (pairwise_seconds, templates_seconds) = (times[..sizes.len()].to_vec(), times[sizes.len()..].to_vec());
    let ratio_times = time_interleaved(opts.min_time, &mut [pairwise(fixed, opts.ratio_size), pairwise(reparam, opts.ratio_size)])?;
    let (fixed_seconds, reparam_seconds) = (ratio_times[0], ratio_times[1]);

    let x: Vec<f64> = sizes.iter().map(|&k| k as f64).collect();
    let pairwise_slope = loglog_slope(&x, &pairwise_seconds);
    let templates_slope = loglog_slope(&x, &templates_seconds);
    let ratio = reparam_seconds / fixed_seconds;
    let ratio_min = 0.5 * cfg.n as f64 / cfg.shift_step as f64;
    let slope_check = |name: &str, value: f64, target: f64| Check {
        name: name.into(),
        value,
        expected: format!("{target} ± {SLOPE_TOL}"),
        pass: (value - target).abs() <= SLOPE_TOL,
    };
    let checks = vec![
        slope_check("pairwise-fixed slope", pairwise_slope, 2.0),
        slope_check("templates-fixed slope", templates_slope, 1.0),
        Check {
            name: "reparam/fixed ratio".into(),
            value: ratio,
            expected: format!("≥ {ratio_min:.1}"),
            pass: ratio >= ratio_min,
        },
    ];
    Ok(BenchReport {
        command: "bench",
        config: cfg.clone(),
        sizes,
        pairwise_seconds,
        templates_seconds,
        pairwise_slope,
        templates_slope,
        ratio_size: opts.ratio_size,
        fixed_seconds,
        reparam_seconds,
        ratio,
        checks,
    })
}

pub fn summary(r: &BenchReport) -> String {
    let mut out = String::from("    k   pairwise (s)  templates (s)\n");
    for (i, k) in r.sizes.iter().enumerate() {
        out += &format!("{k:>5} {:>14.6} {:>14.6}\n", r.pairwise_seconds[i], r.templates_seconds[i]);
    }
    out += &format!(
        "\n{} cells: fixed {:.6} s, reparam {:.6} s\n\n",
        r.ratio_size, r.fixed_seconds, r.reparam_seconds
    );
    for c in &r.checks {
        out += &format!("{} {}: {:.3} (expected {})\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.expected);
    }
    out
}

/// `bench`: time, write `bench.json`, print; failing checks are an error.
pub fn run(cfg: &ExperimentConfig, opts: &BenchOptions) -> Result<BenchReport, CliError> {
    let largest = opts.sizes.iter().copied().max().unwrap_or(0).max(opts.ratio_size);
    let curves = bench_curves(cfg, largest)?;
    let report = bench(cfg, &curves, opts)?;
    ensure_dir(&cfg.output)?;
    write_json(&cfg.output, "bench.json", &report)?;
    print!("{}", summary(&report));
    if !report.passed() {
        return Err(CliError::Failed("scaling checks failed".into()));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [50.0, 100.0, 200.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3e-7 * v.powi(2)).collect();
        assert!((loglog_slope(&x, &y) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_sizes_is_a_usage_error() {
        let cfg = ExperimentConfig::default();
        let opts = BenchOptions { sizes: vec![10, 20, 20], ..Default::default() };
        assert!(matches!(bench(&cfg, &[], &opts), Err(CliError::Usage(_))));
    }
}
