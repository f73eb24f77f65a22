//! Output directories and the run manifest written into each of them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pss_core::pss::catalog;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::definition::Definition;
use crate::error::{LabError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config_digest: String,
    pub catalog_versions: BTreeMap<String, String>,
    pub seeds: BTreeMap<String, u64>,
    pub outputs: Vec<OutputEntry>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
}

/// `version+digest` for every catalog entry, the digest taken over the
/// entry's definition file.
pub fn catalog_versions() -> BTreeMap<String, String> {
    catalog()
        .iter()
        .map(|e| {
            let text = serde_json::to_string(&Definition::from_catalog(e).to_file()).expect("definition serializes");
            (e.name.clone(), format!("{TOOL_VERSION}+{}", &sha256_hex(text.as_bytes())[..16]))
        })
        .collect()
}

/// Collects the files of one run and writes the manifest last.
pub struct OutputDir {
    root: PathBuf,
    outputs: Vec<OutputEntry>,
    started: Instant,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<OutputDir> {
        fs::create_dir_all(root).map_err(|e| LabError::io(root, e))?;
        Ok(OutputDir { root: root.to_path_buf(), outputs: Vec::new(), started: Instant::now() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| LabError::io(&path, e))?;
        self.outputs.retain(|o| o.path != rel);
        self.outputs.push(OutputEntry { path: rel.to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        self.write(rel, &json_bytes(value))
    }

    pub fn finish(self, command: Vec<String>, config_digest: String, seeds: BTreeMap<String, u64>) -> Result<RunManifest> {
        let m = RunManifest {
            command,
            config_digest,
            catalog_versions: catalog_versions(),
            seeds,
            outputs: self.outputs,
            tool_version: TOOL_VERSION.to_string(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        let path = self.root.join(MANIFEST);
        fs::write(&path, json_bytes(&m)).map_err(|e| LabError::io(&path, e))?;
        Ok(m)
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("value serializes");
    v.push(b'\n');
    v
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST);
    if !path.is_file() {
        return Err(LabError::Missing(path));
    }
    let text = fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|source| LabError::Json { path, source })
}
