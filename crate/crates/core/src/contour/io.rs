use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{ContourError, Label, RawContour};
use crate::geometry::Point;

/// One row of a `path,label` manifest.
#[derive(Debug, Clone, Deserialize)]
pub struct ManifestRow {
    pub path: String,
    pub label: String,
}

fn io_err(path: &Path, source: std::io::Error) -> ContourError {
    ContourError::Io { path: path.display().to_string(), source }
}

/// Reads a CSV manifest with header `path,label`. Paths are resolved relative
/// to the manifest's directory and the contour id is the path without its
/// extension.
pub fn load_contours(manifest_path: impl AsRef<Path>) -> Result<Vec<RawContour>, ContourError> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| io_err(manifest_path, e))?;
    let base = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let shown = manifest_path.display().to_string();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());

    let mut out = Vec::new();
    for (i, record) in reader.deserialize::<ManifestRow>().enumerate() {
        // Row numbers count the header as row 1.
        let row = i + 2;
        let record = record.map_err(|e| ContourError::Manifest {
            path: shown.clone(),
            row,
            message: e.to_string(),
        })?;
        if record.path.is_empty() {
            return Err(ContourError::Manifest {
                path: shown.clone(),
                row,
                message: "empty path".into(),
            });
        }
        let file = resolve(&base, &record.path);
        let points = read_contour_file(&file).map_err(|e| ContourError::Manifest {
            path: shown.clone(),
            row,
            message: e.to_string(),
        })?;
        let id = contour_id(&record.path);
        let contour = RawContour::new(id, points, Label::parse(&record.label)).map_err(|e| {
            ContourError::Manifest { path: shown.clone(), row, message: e.to_string() }
        })?;
        out.push(contour);
    }
    Ok(out)
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn contour_id(rel: &str) -> String {
    let p = Path::new(rel);
    match (p.parent(), p.file_stem()) {
        (Some(parent), Some(stem)) if !parent.as_os_str().is_empty() => {
            format!("{}/{}", parent.display(), stem.to_string_lossy())
        }
        (_, Some(stem)) => stem.to_string_lossy().into_owned(),
        _ => rel.to_string(),
    }
}

/// Reads one `x,y` pair per line. Blank lines and `#` comments are skipped.
pub fn read_contour_file(path: impl AsRef<Path>) -> Result<Vec<Point>, ContourError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| ContourError::Parse {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let mut fields = line.split(',');
        let (Some(x), Some(y), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected `x,y`, found `{line}`")));
        };
        let x: f64 = x.trim().parse().map_err(|_| parse_err(format!("bad x value `{x}`")))?;
        let y: f64 = y.trim().parse().map_err(|_| parse_err(format!("bad y value `{y}`")))?;
        points.push(Point::new(x, y));
    }
    Ok(points)
}

/// Writes points in the `x,y` per line format read by [`read_contour_file`].
pub fn write_contour_file(path: impl AsRef<Path>, points: &[Point]) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    for p in points {
        writeln!(f, "{},{}", p.x, p.y)?;
    }
    f.flush()
}

/// Writes a `path,label` manifest.
pub fn write_manifest(path: impl AsRef<Path>, rows: &[ManifestRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["path", "label"])?;
    for r in rows {
        w.write_record([&r.path, &r.label])?;
    }
    w.flush()
}
