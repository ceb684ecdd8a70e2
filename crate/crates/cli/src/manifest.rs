use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance written next to every artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_time_seconds: f64,
}

fn digest(path: &Path) -> Result<FileDigest, CliError> {
    let bytes = std::fs::read(path)?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Tracks a command's inputs and outputs until the manifest is written.
pub struct Recorder {
    started: Instant,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn start() -> Self {
        Recorder {
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes the manifest to `path` unless nothing was produced.
    pub fn finish(self, path: &Path) -> Result<(), CliError> {
        if self.outputs.is_empty() {
            return Ok(());
        }
        let manifest = RunManifest {
            tool: "shellfield",
            version: env!("CARGO_PKG_VERSION"),
            command_line: std::env::args().collect(),
            inputs: self
                .inputs
                .iter()
                .map(|p| digest(p))
                .collect::<Result<_, _>>()?,
            outputs: self
                .outputs
                .iter()
                .map(|p| digest(p))
                .collect::<Result<_, _>>()?,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
        };
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(shellfield_core::Error::from)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// `<artifact>.manifest.json`.
pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut s = artifact.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
