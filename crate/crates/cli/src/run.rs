//! Run directories: `<outputs>/<UTC timestamp>-<config hash>`, holding the
//! resolved config, a manifest and every artifact a command writes.
//!
//! Artifacts never embed the time or the run directory itself, so two runs
//! with the same config produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub struct RunDir {
    root: PathBuf,
    command: String,
    config_hash: String,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_hash: &'a str,
    netzero_version: &'a str,
    artifacts: Vec<ManifestEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the command invocation and the resolved config.
pub fn config_hash(command: &str, resolved: &str) -> String {
    sha256_hex(format!("{command}\n{resolved}").as_bytes())
}

impl RunDir {
    /// Creates the run directory and writes `config.resolved.toml`.
    /// `invocation` (the parsed command with its flags) goes into the hash.
    /// An explicit `dir` replaces the generated name and may already exist.
    pub fn create(config: &RunConfig, command: &str, invocation: &str, dir: Option<&Path>) -> Result<Self> {
        let resolved = config.to_toml();
        let hash = config_hash(invocation, &resolved);
        let root = match dir {
            Some(d) => d.to_path_buf(),
            None => {
                let outputs = config.paths.outputs.clone().unwrap_or_else(|| PathBuf::from("outputs"));
                let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
                outputs.join(format!("{stamp}-{}", &hash[..8]))
            }
        };
        fs::create_dir_all(&root).with_context(|| format!("creating run directory {}", root.display()))?;
        let mut run = RunDir { root, command: command.to_string(), config_hash: hash, written: Vec::new() };
        run.write("config.resolved.toml", resolved)?;
        Ok(run)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.record(&path);
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let text = serde_json::to_string_pretty(value).context("serializing artifact")?;
        self.write(name, text + "\n")
    }

    /// Registers a file written by library code, or every file below a
    /// directory.
    pub fn record(&mut self, path: &Path) {
        if path.is_dir() {
            let mut stack = vec![path.to_path_buf()];
            while let Some(dir) = stack.pop() {
                if let Ok(entries) = fs::read_dir(&dir) {
                    for e in entries.flatten() {
                        let p = e.path();
                        if p.is_dir() {
                            stack.push(p);
                        } else {
                            self.written.push(p);
                        }
                    }
                }
            }
        } else {
            self.written.push(path.to_path_buf());
        }
    }

    /// Writes `manifest.json` and returns the artifact paths relative to the
    /// run directory.
    pub fn finish(mut self) -> Result<(PathBuf, Vec<String>)> {
        self.written.sort();
        self.written.dedup();
        let mut artifacts = Vec::with_capacity(self.written.len());
        for p in &self.written {
            let bytes = fs::read(p).with_context(|| format!("reading back {}", p.display()))?;
            let rel = p.strip_prefix(&self.root).unwrap_or(p);
            artifacts.push(ManifestEntry {
                path: rel.to_string_lossy().replace('\\', "/"),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(&bytes),
            });
        }
        let names = artifacts.iter().map(|a| a.path.clone()).collect();
        let manifest =
            Manifest { command: &self.command, config_hash: &self.config_hash, netzero_version: env!("CARGO_PKG_VERSION"), artifacts };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        let path = self.root.join("manifest.json");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok((self.root, names))
    }
}
