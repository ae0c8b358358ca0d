//! Conversion of a contour collection on disk into a manifest plus one
//! `x,y` file per contour.
//!
//! The input is a directory tree. A file's class is the nearest enclosing
//! directory whose name is a class name (`Normal`/`circular`,
//! `Sickle`/`elongated`, `Other`, …). Two kinds of files are understood:
//!
//! - point lists (`.csv`, `.txt`, `.dat`, `.xy`, `.pts`): one `x y` pair per
//!   line with any of `,`, `;`, tabs or spaces between the numbers; or a
//!   row of x values followed by a row of y values; or a single row of
//!   interleaved coordinates. Header and comment lines are skipped.
//! - images (`.png`, `.jpg`, `.jpeg`, `.bmp`, `.tif`, `.tiff`): the cell is
//!   segmented with Otsu's threshold, the largest 4-connected blob is kept
//!   with its holes filled, and its outline is traced along pixel edges.
//!
//! Every other file is ignored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use cellshape::contour::{write_contour_file, write_manifest, Label, ManifestRow, RawContour};
use cellshape::geometry::Point;
use serde::Serialize;
use walkdir::WalkDir;

use crate::report::{ensure_dir, io_result, write_json};
use crate::CliError;

const POINT_EXTENSIONS: [&str; 5] = ["csv", "txt", "dat", "xy", "pts"];
const IMAGE_EXTENSIONS: [&str; 6] = ["png", "jpg", "jpeg", "bmp", "tif", "tiff"];

/// Gaussian smoothing of traced image outlines, in vertices.
pub const DEFAULT_IMAGE_SMOOTHING: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOptions {
    /// Smoothing of image outlines; `None` uses [`DEFAULT_IMAGE_SMOOTHING`].
    pub image_smoothing: Option<f64>,
    /// Smoothing of point lists.
    pub point_smoothing: f64,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        Self { image_smoothing: None, point_smoothing: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreprocessReport {
    pub input: PathBuf,
    pub manifest: PathBuf,
    pub converted: usize,
    pub per_label: BTreeMap<String, usize>,
    pub skipped: Vec<Skipped>,
}

enum Kind {
    Points,
    Image,
}

fn kind_of(path: &Path) -> Option<Kind> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    if POINT_EXTENSIONS.contains(&ext.as_str()) {
        Some(Kind::Points)
    } else if IMAGE_EXTENSIONS.contains(&ext.as_str()) {
        Some(Kind::Image)
    } else {
        None
    }
}

/// Class of `rel` from its nearest class-named directory.
fn label_of(rel: &Path) -> Label {
    let dirs: Vec<String> = rel
        .parent()
        .into_iter()
        .flat_map(|p| p.components())
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    dirs.iter()
        .rev()
        .map(|d| Label::parse(d))
        .find(|l| !matches!(l, Label::Unlabeled(_)))
        .unwrap_or_else(|| Label::Unlabeled(dirs.last().cloned().unwrap_or_else(|| "unlabeled".into())))
}

fn safe_name(s: &str) -> String {
    s.chars().map(|c| if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

/// Converts every understood file below `input` into `output`.
pub fn preprocess(input: &Path, output: &Path, opts: &PreprocessOptions) -> Result<PreprocessReport, CliError> {
    if !input.is_dir() {
        return Err(CliError::Usage(format!("input directory `{}` not found", input.display())));
    }
    ensure_dir(output)?;
    let output_abs = output.canonicalize().unwrap_or_else(|_| output.to_path_buf());
    let mut rows = Vec::new();
    let mut per_label = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut taken: HashSet<String> = HashSet::new();

    let walker = WalkDir::new(input).sort_by_file_name().into_iter().filter_entry(|e| {
        e.path().canonicalize().map_or(true, |p| p != output_abs)
    });
    for entry in walker {
        let entry = entry.map_err(|e| CliError::Usage(format!("cannot walk `{}`: {e}", input.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let Some(kind) = kind_of(path) else { continue };
        let rel = path.strip_prefix(input).unwrap_or(path);
        let label = label_of(rel);
        let points = match kind {
            Kind::Points => read_points(path).map(|p| smooth_closed(&p, opts.point_smoothing)),
            Kind::Image => trace_image(path)
                .map(|p| smooth_closed(&p, opts.image_smoothing.unwrap_or(DEFAULT_IMAGE_SMOOTHING))),
        };
        let stem = safe_name(&path.file_stem().unwrap_or_default().to_string_lossy());
        let dir = safe_name(label.name());
        let mut name = format!("{dir}/{stem}");
        let mut k = 2;
        while taken.contains(&name) {
            name = format!("{dir}/{stem}-{k}");
            k += 1;
        }
        let contour = points.and_then(|p| RawContour::new(name.clone(), p, label.clone()).map_err(|e| e.to_string()));
        match contour {
            Ok(c) => {
                ensure_dir(&output.join(&dir))?;
                let file = output.join(format!("{name}.csv"));
                io_result(&file, write_contour_file(&file, c.points()))?;
                rows.push(ManifestRow { path: format!("{name}.csv"), label: label.name().to_string() });
                *per_label.entry(label.name().to_string()).or_insert(0) += 1;
                taken.insert(name);
            }
            Err(reason) => skipped.push(Skipped { path: rel.display().to_string(), reason }),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!("no contours found under `{}`", input.display())));
    }
    let manifest = output.join("manifest.csv");
    io_result(&manifest, write_manifest(&manifest, &rows))?;
    let report = PreprocessReport { input: input.to_path_buf(), manifest, converted: rows.len(), per_label, skipped };
    write_json(output, "preprocess.json", &report)?;
    Ok(report)
}

/// Parses a point list in any of the layouts described in the module docs.
pub fn parse_points(text: &str) -> Result<Vec<Point>, String> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        match fields.iter().map(|f| f.parse::<f64>()).collect::<Result<Vec<_>, _>>() {
            Ok(values) => rows.push(values),
            // A header before any numbers.
            Err(_) if rows.is_empty() => continue,
            Err(_) => return Err(format!("line {}: not a list of numbers", i + 1)),
        }
    }
    if !rows.is_empty() && rows.iter().all(|r| r.len() == 2) {
        return Ok(rows.iter().map(|r| Point::new(r[0], r[1])).collect());
    }
    match rows.as_slice() {
        [xs, ys] if xs.len() == ys.len() && xs.len() >= 3 => {
            Ok(xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y)).collect())
        }
        [flat] if flat.len() >= 6 && flat.len() % 2 == 0 => {
            Ok(flat.chunks(2).map(|c| Point::new(c[0], c[1])).collect())
        }
        [] => Err("no numbers".into()),
        _ => Err("unrecognized layout (expected x,y pairs, an x row and a y row, or one interleaved row)".into()),
    }
}

fn read_points(path: &Path) -> Result<Vec<Point>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    parse_points(&text)
}

fn trace_image(path: &Path) -> Result<Vec<Point>, String> {
    let img = image::open(path).map_err(|e| e.to_string())?.to_luma8();
    let (w, h) = img.dimensions();
    outline_from_gray(w as usize, h as usize, img.as_raw())
}

/// Otsu threshold: values `<= t` form one class.
fn otsu(pixels: &[u8]) -> u8 {
    let mut hist = [0u64; 256];
    for &p in pixels {
        hist[p as usize] += 1;
    }
    let total = pixels.len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let (mut best, mut best_t) = (-1.0, 0u8);
    for t in 0..255 {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let (m0, m1) = (sum0 / w0, (sum_all - sum0) / w1);
        let between = w0 * w1 * (m0 - m1).powi(2);
        if between > best {
            best = between;
            best_t = t as u8;
        }
    }
    best_t
}

/// Outline of the main blob of a grayscale image, one vertex per boundary
/// pixel edge (at its midpoint), `y` pointing up.
pub fn outline_from_gray(w: usize, h: usize, gray: &[u8]) -> Result<Vec<Point>, String> {
    if w == 0 || h == 0 {
        return Err("empty image".into());
    }
    let t = otsu(gray);
    let dark: Vec<bool> = gray.iter().map(|&v| v <= t).collect();
    if dark.iter().all(|&d| d) || dark.iter().all(|&d| !d) {
        return Err("image has a single intensity class".into());
    }
    // The background is whichever class dominates the image border.
    let border: Vec<usize> = (0..w)
        .flat_map(|x| [x, (h - 1) * w + x])
        .chain((0..h).flat_map(|y| [y * w, y * w + w - 1]))
        .collect();
    let dark_border = border.iter().filter(|&&i| dark[i]).count();
    let cell_is_dark = 2 * dark_border < border.len();

    // Padded grid so the blob never touches the edge.
    let (pw, ph) = (w + 2, h + 2);
    let mut fg = vec![false; pw * ph];
    for y in 0..h {
        for x in 0..w {
            fg[(y + 1) * pw + x + 1] = dark[y * w + x] == cell_is_dark;
        }
    }
    let blob = largest_component(&fg, pw, ph).ok_or("no foreground")?;
    let filled = fill_holes(&blob, pw, ph);
    trace_outline(&filled, pw, ph)
}

fn largest_component(fg: &[bool], w: usize, h: usize) -> Option<Vec<bool>> {
    let mut label = vec![usize::MAX; fg.len()];
    let mut best: Option<(usize, usize)> = None;
    let mut next = 0;
    for start in 0..fg.len() {
        if !fg[start] || label[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        label[start] = next;
        let mut size = 0;
        while let Some(i) = stack.pop() {
            size += 1;
            let (x, y) = (i % w, i / w);
            let mut push = |j: usize| {
                if fg[j] && label[j] == usize::MAX {
                    label[j] = next;
                    stack.push(j);
                }
            };
            if x > 0 {
                push(i - 1);
            }
            if x + 1 < w {
                push(i + 1);
            }
            if y > 0 {
                push(i - w);
            }
            if y + 1 < h {
                push(i + w);
            }
        }
        if best.is_none_or(|(_, s)| size > s) {
            best = Some((next, size));
        }
        next += 1;
    }
    let (id, _) = best?;
    Some(label.iter().map(|&l| l == id).collect())
}

/// Background 8-connected to the border stays background; the rest is
/// filled.
fn fill_holes(blob: &[bool], w: usize, h: usize) -> Vec<bool> {
    let mut outside = vec![false; blob.len()];
    let mut stack = vec![0];
    outside[0] = true;
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !blob[j] && !outside[j] {
                    outside[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    outside.iter().map(|&o| !o).collect()
}

/// Walks the pixel-edge boundary of `mask` with the blob on the right
/// (screen coordinates), turning right first where two edges leave a corner
/// so diagonal pixel contacts stay apart.
fn trace_outline(mask: &[bool], w: usize, h: usize) -> Result<Vec<Point>, String> {
    let at = |x: isize, y: isize| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h && mask[y as usize * w + x as usize];
    type Corner = (isize, isize);
    let mut out: HashMap<Corner, Vec<Corner>> = HashMap::new();
    let mut first: Option<(Corner, Corner)> = None;
    for y in 0..h as isize {
        for x in 0..w as isize {
            if !at(x, y) {
                continue;
            }
            let mut edge = |a: Corner, b: Corner| {
                out.entry(a).or_default().push(b);
                if first.is_none() {
                    first = Some((a, b));
                }
            };
            if !at(x, y - 1) {
                edge((x, y), (x + 1, y));
            }
            if !at(x + 1, y) {
                edge((x + 1, y), (x + 1, y + 1));
            }
            if !at(x, y + 1) {
                edge((x + 1, y + 1), (x, y + 1));
            }
            if !at(x - 1, y) {
                edge((x, y + 1), (x, y));
            }
        }
    }
    let (start_a, start_b) = first.ok_or("empty mask")?;
    let mut points = Vec::new();
    let (mut a, mut b) = (start_a, start_b);
    loop {
        points.push(Point::new((a.0 + b.0) as f64 / 2.0, -(a.1 + b.1) as f64 / 2.0));
        let dir = (b.0 - a.0, b.1 - a.1);
        let options = out.get(&b).ok_or("open outline")?;
        let turn_right = (-dir.1, dir.0);
        let next = if options.len() == 1 {
            options[0]
        } else {
            *options
                .iter()
                .find(|c| (c.0 - b.0, c.1 - b.1) == turn_right)
                .unwrap_or(&options[0])
        };
        (a, b) = (b, next);
        if (a, b) == (start_a, start_b) {
            break;
        }
        if points.len() > 4 * w * h {
            return Err("outline does not close".into());
        }
    }
    Ok(points)
}

/// Circular Gaussian smoothing with standard deviation `sigma` vertices.
pub fn smooth_closed(points: &[Point], sigma: f64) -> Vec<Point> {
    if sigma <= 0.0 || points.len() < 3 {
        return points.to_vec();
    }
    let n = points.len() as isize;
    let radius = ((3.0 * sigma).ceil() as isize).min((n - 1) / 2);
    let weights: Vec<f64> = (-radius..=radius).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = weights.iter().sum();
    (0..n)
        .map(|i| {
            let mut acc = Point::zeros();
            for (k, wk) in (-radius..=radius).zip(&weights) {
                acc += points[(i + k).rem_euclid(n) as usize] * *wk;
            }
            acc / total
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use cellshape::geometry;

    use super::*;

    #[test]
    fn point_layouts() {
        let pairs = parse_points("x,y\n0,0\n1;0\n1 1\n").unwrap();
        assert_eq!(pairs, vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)]);
        let rows = parse_points("0 1 1\n0 0 1\n").unwrap();
        assert_eq!(rows, pairs);
        let flat = parse_points("0,0,1,0,1,1").unwrap();
        assert_eq!(flat, pairs);
        assert!(parse_points("1 2 3\n4 5 6\n7 8 9\n").is_err());
        assert!(parse_points("0,0\n1,0\nfoo\n").is_err());
        assert!(parse_points("# nothing\n").is_err());
    }

    #[test]
    fn labels_come_from_the_nearest_class_directory() {
        assert_eq!(label_of(Path::new("set1/circular/a.png")), Label::Normal);
        assert_eq!(label_of(Path::new("elongated/batch/a.png")), Label::Sickle);
        assert_eq!(label_of(Path::new("other/a.png")), Label::OtherDeformation);
        assert_eq!(label_of(Path::new("misc/a.png")), Label::Unlabeled("misc".into()));
        assert_eq!(label_of(Path::new("a.png")), Label::Unlabeled("unlabeled".into()));
    }

    fn disk_image(w: usize, h: usize, r: f64, dark_cell: bool) -> Vec<u8> {
        let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
        (0..w * h)
            .map(|i| {
                let (x, y) = ((i % w) as f64 + 0.5, (i / w) as f64 + 0.5);
                let inside = (x - cx).hypot(y - cy) <= r;
                if inside == dark_cell { 40 } else { 210 }
            })
            .collect()
    }

    #[test]
    fn traced_disk_has_the_right_area() {
        for dark in [true, false] {
            let img = disk_image(80, 60, 20.0, dark);
            let outline = outline_from_gray(80, 60, &img).unwrap();
            let area = geometry::signed_area(&outline).abs();
            let expected = std::f64::consts::PI * 400.0;
            assert!((area - expected).abs() / expected < 0.03, "{area}");
            assert!(RawContour::new("d", outline, Label::Normal).is_ok());
        }
    }

    #[test]
    fn diagonal_contacts_give_a_simple_outline() {
        // Two squares touching at one corner, plus a hole.
        let (w, h) = (12, 12);
        let mut img = vec![255u8; w * h];
        for y in 2..6 {
            for x in 2..6 {
                img[y * w + x] = 0;
            }
        }
        for y in 6..10 {
            for x in 6..10 {
                img[y * w + x] = 0;
            }
        }
        // A 4-connected bridge so both squares form one blob.
        for x in 6..8 {
            img[3 * w + x] = 0;
        }
        for y in 3..6 {
            img[y * w + 7] = 0;
        }
        img[3 * w + 3] = 255;
        let outline = outline_from_gray(w, h, &img).unwrap();
        let c = RawContour::new("d", outline, Label::Normal).unwrap();
        // Hole filled: area counts every pixel of the blob.
        let blob_pixels = img.iter().filter(|&&v| v == 0).count() + 1;
        let area = geometry::signed_area(c.points()).abs();
        // Edge midpoints cut half a pixel at every convex corner.
        assert!(area < blob_pixels as f64 && area > blob_pixels as f64 - 8.0, "{area} vs {blob_pixels}");
    }

    #[test]
    fn smoothing_keeps_a_circle_round() {
        let pts = cellshape::synthetic::circle_points(200, 1.0);
        let s = smooth_closed(&pts, 2.0);
        // Averaging a circle shrinks it by the kernel-weighted mean of cos(kθ).
        let theta = 2.0 * std::f64::consts::PI / 200.0;
        let w: Vec<(f64, f64)> = (-6..=6).map(|k: i32| ((-(k * k) as f64 / 8.0).exp(), (k as f64 * theta).cos())).collect();
        let shrink = w.iter().map(|(a, c)| a * c).sum::<f64>() / w.iter().map(|(a, _)| a).sum::<f64>();
        for p in &s {
            assert!((p.norm() - shrink).abs() < 1e-12);
        }
        assert_eq!(smooth_closed(&pts, 0.0), pts);
    }
}
