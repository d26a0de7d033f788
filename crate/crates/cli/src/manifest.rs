use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to rerun a command; written as `manifest.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Every option, defaults included.
    pub args: BTreeMap<String, serde_json::Value>,
    pub inputs: Vec<FileDigest>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub version: String,
    pub artifacts: Vec<FileDigest>,
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the artifacts of one run under the output directory.
pub struct Run {
    out: PathBuf,
    manifest: RunManifest,
    start: Instant,
}

impl Run {
    pub fn new(out: &Path, command: &str, seed: u64, threads: Option<usize>) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::Input(format!("cannot create {}: {e}", out.display())))?;
        Ok(Run {
            out: out.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                args: BTreeMap::new(),
                inputs: Vec::new(),
                seed,
                threads,
                version: env!("CARGO_PKG_VERSION").to_string(),
                artifacts: Vec::new(),
                wall_time_s: 0.0,
            },
            start: Instant::now(),
        })
    }

    pub fn arg(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("arguments serialize");
        self.manifest.args.insert(name.to_string(), v);
    }

    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.artifacts.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Contract(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Contract(e.to_string());
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Contract(e.to_string()))?;
        self.write(name, &bytes)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.manifest.wall_time_s = self.start.elapsed().as_secs_f64();
        let manifest = self.manifest.clone();
        self.write_json("manifest.json", &manifest)?;
        Ok(())
    }
}
