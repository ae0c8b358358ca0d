use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(write_err(dir))
}

pub(crate) fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(write_err(&path))?;
    Ok(path)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(write_err(path))
}

pub(crate) fn io_result<T>(path: &Path, r: std::io::Result<T>) -> Result<T, CliError> {
    r.map_err(write_err(path))
}
