//! Output directory bookkeeping: every file written through [`Artifacts`]
//! is hashed into `manifest.txt`, and reported metrics go to `metrics.txt`
//! and the log as `key=value` lines.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::RunError;

pub const MANIFEST: &str = "manifest.txt";
pub const METRICS: &str = "metrics.txt";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub sha256: String,
    pub bytes: usize,
}

pub struct Artifacts {
    dir: PathBuf,
    prefix: String,
    files: BTreeMap<String, ManifestEntry>,
    metrics: Vec<(String, f64)>,
}

impl Artifacts {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self, RunError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, prefix: String::new(), files: BTreeMap::new(), metrics: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Prefixes later file names and metric keys with `scope/` and `scope.`
    /// (empty clears the scope).
    pub fn set_scope(&mut self, scope: &str) {
        self.prefix = scope.to_string();
    }

    fn scoped(&self, name: &str, sep: char) -> String {
        if self.prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}{sep}{name}", self.prefix)
        }
    }

    /// Renders a file in memory, then writes and records it.
    pub fn write<F>(&mut self, name: &str, render: F) -> Result<(), RunError>
    where
        F: FnOnce(&mut Vec<u8>) -> oamlab_core::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf)?;
        self.write_bytes(name, &buf)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let rel = self.scoped(name, '/');
        let path = self.dir.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        let sha256 = hex::encode(Sha256::digest(bytes));
        log::debug!("wrote {rel} ({} bytes)", bytes.len());
        self.files.insert(rel, ManifestEntry { sha256, bytes: bytes.len() });
        Ok(())
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        let key = self.scoped(key, '.');
        log::info!("{key}={value:?}");
        self.metrics.push((key, value));
    }

    pub fn metrics(&self) -> &[(String, f64)] {
        &self.metrics
    }

    pub fn files(&self) -> &BTreeMap<String, ManifestEntry> {
        &self.files
    }

    /// Writes `metrics.txt` and then `manifest.txt`, which lists every
    /// other file sorted by path.
    pub fn finish(mut self) -> Result<Report, RunError> {
        self.prefix.clear();
        let text: String = self.metrics.iter().map(|(k, v)| format!("{k}={v:?}\n")).collect();
        self.write_bytes(METRICS, text.as_bytes())?;
        let manifest: String = self
            .files
            .iter()
            .map(|(path, e)| format!("{}  {}  {}\n", e.sha256, path, e.bytes))
            .collect();
        fs::write(self.dir.join(MANIFEST), manifest.as_bytes())?;
        Ok(Report { dir: self.dir, metrics: self.metrics, files: self.files })
    }
}

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub dir: PathBuf,
    pub metrics: Vec<(String, f64)>,
    pub files: BTreeMap<String, ManifestEntry>,
}

impl Report {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Like [`get`](Self::get) but panics with the available keys.
    pub fn value(&self, key: &str) -> f64 {
        self.get(key).unwrap_or_else(|| {
            let keys: Vec<&str> = self.metrics.iter().map(|(k, _)| k.as_str()).collect();
            panic!("no metric {key}; have {keys:?}")
        })
    }
}
