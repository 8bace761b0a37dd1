//! Atomic file writes: write to a temporary sibling, then rename into place,
//! so readers never observe a partially written artifact.

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, &e))?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::io(path, &std::io::Error::other("path has no file name")))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, &e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, &e))
}

pub fn read_file(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, &e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, &e))
}
