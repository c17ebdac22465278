//! Run manifest: a structured record of what a run produced — config hash,
//! solver settings echo, per-stage wall-clock, and the artifact list.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.toml";

/// Lowercase hex SHA-256 of a byte string (used to fingerprint the config).
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        use std::fmt::Write as _;
        write!(out, "{b:02x}").expect("writing to a String cannot fail");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsEcho {
    pub cells_per_wavelength: u32,
    pub n_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// Wall-clock seconds; zeroed under `--seed-metadata` so manifests are
    /// byte-stable across runs.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    /// File name relative to the output directory.
    pub name: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub scenario: String,
    pub config_sha256: String,
    pub workers: usize,
    pub settings: SettingsEcho,
    #[serde(default)]
    pub stages: Vec<StageRecord>,
    #[serde(default)]
    pub artifacts: Vec<ArtifactRecord>,
}

impl RunManifest {
    pub fn new(
        scenario: &str,
        config_sha256: String,
        workers: usize,
        settings: SettingsEcho,
    ) -> Self {
        Self {
            tool: "drwsim".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            scenario: scenario.into(),
            config_sha256,
            workers,
            settings,
            stages: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn add_stage(&mut self, name: &str, seconds: f64) {
        self.stages.push(StageRecord {
            name: name.into(),
            seconds,
        });
    }

    /// Record an artifact that already exists on disk, capturing its size.
    /// Empty artifacts are a bug, so they are rejected here rather than
    /// discovered by a consumer later.
    pub fn add_artifact(&mut self, out_dir: &Path, name: &str) -> Result<(), CliError> {
        let path = out_dir.join(name);
        let meta = fs::metadata(&path)
            .map_err(|e| CliError::Runtime(format!("artifact {}: {e}", path.display())))?;
        if meta.len() == 0 {
            return Err(CliError::Runtime(format!(
                "artifact {} was written empty",
                path.display()
            )));
        }
        self.artifacts.push(ArtifactRecord {
            name: name.into(),
            bytes: meta.len(),
        });
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Runtime(e.to_string()))
    }

    /// Write the manifest itself (not listed among the artifacts).
    pub fn write(&self, out_dir: &Path) -> Result<(), CliError> {
        let path = out_dir.join(MANIFEST_FILE);
        fs::write(&path, self.to_toml()?)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?;
        Ok(())
    }

    /// Check the manifest invariant: every listed artifact exists on disk
    /// and is non-empty.
    pub fn verify_artifacts(&self, out_dir: &Path) -> Result<(), CliError> {
        for a in &self.artifacts {
            let path = out_dir.join(&a.name);
            let meta = fs::metadata(&path).map_err(|e| {
                CliError::Runtime(format!("manifest lists missing {}: {e}", path.display()))
            })?;
            if meta.len() == 0 {
                return Err(CliError::Runtime(format!(
                    "manifest lists empty artifact {}",
                    path.display()
                )));
            }
        }
        Ok(())
    }
}

/// Wall-clock stage timer. `elapsed_or_zero` substitutes 0.0 when timings
/// are being seeded for byte-stable manifests.
pub struct StageClock {
    start: Instant,
    seed_metadata: bool,
}

impl StageClock {
    pub fn start(seed_metadata: bool) -> Self {
        Self {
            start: Instant::now(),
            seed_metadata,
        }
    }

    pub fn lap(&mut self) -> f64 {
        let dt = self.start.elapsed().as_secs_f64();
        self.start = Instant::now();
        if self.seed_metadata {
            0.0
        } else {
            dt
        }
    }
}
