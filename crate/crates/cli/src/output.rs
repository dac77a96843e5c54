use std::fs;
use std::io::Write;
use std::path::Path;

use finitemix_core::io::from_json;
use finitemix_core::GraphSequence;
use tempfile::NamedTempFile;

use crate::error::CliError;

/// Writes `text` to `path` through a sibling temp file and a rename, so a
/// failed run never leaves a partial file behind. `None` means stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        print!("{text}");
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(text.as_bytes())
        .map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_sequence(path: &Path) -> Result<GraphSequence, CliError> {
    from_json(&read_text(path)?).map_err(|source| CliError::Format {
        path: path.to_path_buf(),
        source,
    })
}
