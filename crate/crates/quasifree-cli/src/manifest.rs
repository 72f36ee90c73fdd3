//! Run manifest: every produced file, the effective config, and its hash.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use quasifree::error::{Error, Result};

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub config: String,
    pub files: Vec<String>,
    pub versions: Versions,
}

#[derive(Debug, Serialize)]
pub struct Versions {
    pub quasifree: &'static str,
    #[serde(rename = "quasifree-cli")]
    pub cli: &'static str,
}

/// Collects output files under one directory and finalizes the manifest.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| {
            Error::InvalidInput(format!("cannot create output directory {root:?}: {e}"))
        })?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents)
            .map_err(|e| Error::InvalidInput(format!("cannot write {path:?}: {e}")))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finalize(mut self, config_text: &str) -> Result<PathBuf> {
        self.files.sort();
        let manifest = Manifest {
            config_hash: sha256_hex(config_text),
            config: config_text.to_string(),
            files: self.files.clone(),
            versions: Versions {
                quasifree: env!("CARGO_PKG_VERSION"),
                cli: env!("CARGO_PKG_VERSION"),
            },
        };
        let path = self.root.join("manifest.json");
        let body = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::InvalidInput(format!("manifest serialization failed: {e}")))?;
        fs::write(&path, body + "\n")
            .map_err(|e| Error::InvalidInput(format!("cannot write {path:?}: {e}")))?;
        Ok(path)
    }
}

pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
