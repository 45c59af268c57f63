use std::time::{SystemTime, UNIX_EPOCH};

use lambda_sphere::geometry::{report_json, write_atomic, ExportError};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Files produced by one command, held in memory until everything has been
/// computed so that a failing run writes nothing.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, &'static str, Vec<u8>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub kind: String,
    pub bytes: usize,
}

/// Index of the outputs of a run. The timestamp lives only here so that
/// all other artifacts are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: RunConfig,
    pub created_unix: u64,
    pub outputs: Vec<ManifestEntry>,
}

pub const MANIFEST: &str = "manifest.json";

impl Artifacts {
    pub fn add(&mut self, name: &str, kind: &'static str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), kind, bytes.into()));
    }

    /// Writes every file atomically into `cfg.out`, then the manifest.
    pub fn write(self, cfg: &RunConfig) -> Result<Manifest, ExportError> {
        let dir = cfg.out.as_path();
        std::fs::create_dir_all(dir).map_err(|source| ExportError::Io { path: dir.to_path_buf(), source })?;
        let mut outputs = Vec::with_capacity(self.files.len());
        for (name, kind, bytes) in &self.files {
            write_atomic(&dir.join(name), bytes)?;
            outputs.push(ManifestEntry { file: name.clone(), kind: kind.to_string(), bytes: bytes.len() });
        }
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let manifest = Manifest { command: cfg.command.name().to_string(), config: cfg.clone(), created_unix, outputs };
        write_atomic(&dir.join(MANIFEST), report_json(&manifest)?.as_bytes())?;
        Ok(manifest)
    }
}
