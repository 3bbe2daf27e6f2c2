//! Atomic artifact writes and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Rates, Resolved};
use crate::CliError;

pub const GIT_DESCRIBE: &str = env!("QTORIC_GIT_DESCRIBE");

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.write_all(bytes).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub d: u32,
    pub k: usize,
    pub beta: f64,
    pub rates: Rates,
    pub seed: u64,
    pub engine: String,
    pub trials: Option<usize>,
    pub loop_len: usize,
    pub git_describe: &'static str,
    pub timestamp: String,
    pub config: &'a Resolved,
    pub csv: String,
}

pub fn artifact_paths(cfg: &Resolved, stem: &str) -> (PathBuf, PathBuf) {
    let base = cfg.output_dir.join(stem);
    (base.with_extension("csv"), base.with_extension("json"))
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
