//! Geodesic paths between two cells, drawn as SVG.

use std::fmt::Write as _;
use std::path::Path;

use cellshape::geometry::{self, Point};
use cellshape::grassmann::{grassmann_distance, grassmann_distance_minshift, grassmann_geodesic, to_grassmann};
use cellshape::metric::{Method, Space};
use cellshape::srvf::{align_rotation, closed_srvf, elastic_distance, fixed_distance, srvf_geodesic, ElasticOptions};

use crate::config::ExperimentConfig;
use crate::report::{ensure_dir, write_text};
use crate::{CliError, Dataset};

/// Frames of a geodesic, first to last, with `b` aligned to `a`.
#[derive(Debug, Clone)]
pub struct Geodesic {
    pub a: String,
    pub b: String,
    pub metric: String,
    pub distance: f64,
    pub frames: Vec<Vec<Point>>,
}

/// Geodesic from contour `a` to contour `b` with `steps` interior frames.
pub fn geodesic(cfg: &ExperimentConfig, data: &Dataset, a: &str, b: &str, steps: usize) -> Result<Geodesic, CliError> {
    let (ca, cb) = (&data.curves[data.position(a)?], &data.curves[data.position(b)?]);
    let spec = cfg.spec();
    let (distance, frames) = match spec.space {
        Space::S1 => {
            let (pa, pb) = (to_grassmann(ca), to_grassmann(cb));
            let (d, pb) = match spec.method {
                Method::Fixed => (grassmann_distance(&pa, &pb).map_err(cellshape::Error::from)?.d, pb),
                Method::Reparam => {
                    let s = grassmann_distance_minshift(&pa, &pb, spec.shift_step).map_err(cellshape::Error::from)?;
                    (s.d, pb.shifted(s.best_shift))
                }
            };
            (d, grassmann_geodesic(&pa, &pb, steps).map_err(cellshape::Error::from)?)
        }
        Space::S2 => {
            let (qa, qb) = (
                closed_srvf(ca).map_err(cellshape::Error::from)?,
                closed_srvf(cb).map_err(cellshape::Error::from)?,
            );
            let (d, alignment) = match spec.method {
                Method::Fixed => (
                    fixed_distance(&qa, &qb, spec.rotation).map_err(cellshape::Error::from)?,
                    align_rotation(&qa, &qb, spec.rotation).map_err(cellshape::Error::from)?,
                ),
                Method::Reparam => {
                    let opts = ElasticOptions {
                        shift_step: spec.shift_step,
                        rotation: spec.rotation,
                        use_dp: spec.use_dp,
                        dp_grid: spec.dp_grid,
                    };
                    let r = elastic_distance(&qa, &qb, &opts).map_err(cellshape::Error::from)?;
                    (r.d, r.alignment)
                }
            };
            let qb = alignment.apply(&qb);
            (d, srvf_geodesic(&qa, &qb, steps).map_err(cellshape::Error::from)?)
        }
    };
    Ok(Geodesic { a: a.to_string(), b: b.to_string(), metric: spec.to_string(), distance, frames })
}

const PANEL: f64 = 140.0;
const PAD: f64 = 12.0;
const CAPTION: f64 = 36.0;

fn path_data(points: &[Point], scale: f64, cx: f64, cy: f64) -> String {
    let c = geometry::mean(points);
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = (cx + scale * (p.x - c.x), cy - scale * (p.y - c.y));
        let _ = write!(d, "{}{x:.2},{y:.2} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One row of panels: both endpoints overlaid, then every frame.
pub fn render_svg(g: &Geodesic) -> String {
    let extent = g
        .frames
        .iter()
        .flat_map(|f| {
            let c = geometry::mean(f);
            f.iter().map(move |p| (p.x - c.x).abs().max((p.y - c.y).abs()))
        })
        .fold(0.0, f64::max)
        .max(1e-12);
    let scale = (PANEL / 2.0 - PAD) / extent;
    let panels = g.frames.len() + 1;
    let (width, height) = (panels as f64 * PANEL, PANEL + CAPTION);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    );
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    let _ = writeln!(
        svg,
        "<text x=\"{PAD}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">{} geodesic {} \u{2192} {}, d = {:.4}</text>",
        escape(&g.metric),
        escape(&g.a),
        escape(&g.b),
        g.distance
    );
    let cy = CAPTION + PANEL / 2.0;
    let last = g.frames.len() - 1;
    let _ = writeln!(svg, "<g fill=\"none\" stroke-width=\"1.5\">");
    for (k, stroke) in [(0, "#1f5fbf"), (last, "#c0392b")] {
        let _ = writeln!(svg, "<path class=\"endpoint\" stroke=\"{stroke}\" d=\"{}\"/>", path_data(&g.frames[k], scale, PANEL / 2.0, cy));
    }
    for (k, f) in g.frames.iter().enumerate() {
        let stroke = match k {
            0 => "#1f5fbf",
            _ if k == last => "#c0392b",
            _ => "#555555",
        };
        let cx = (k + 1) as f64 * PANEL + PANEL / 2.0;
        let _ = writeln!(svg, "<path class=\"frame\" stroke=\"{stroke}\" d=\"{}\"/>", path_data(f, scale, cx, cy));
    }
    svg += "</g>\n</svg>\n";
    svg
}

/// `geodesic`: load, compute, write the SVG to `svg` (default
/// `<output>/geodesic.svg`).
pub fn run(cfg: &ExperimentConfig, a: &str, b: &str, steps: usize, svg: Option<&Path>) -> Result<Geodesic, CliError> {
    let data = Dataset::load(cfg)?;
    let g = geodesic(cfg, &data, a, b, steps)?;
    let path = match svg {
        Some(p) => p.to_path_buf(),
        None => {
            ensure_dir(&cfg.output)?;
            cfg.output.join("geodesic.svg")
        }
    };
    write_text(&path, &render_svg(&g))?;
    println!("{} distance {} \u{2192} {} = {:.6} ({} frames, {})", g.metric, g.a, g.b, g.distance, g.frames.len(), path.display());
    Ok(g)
}
