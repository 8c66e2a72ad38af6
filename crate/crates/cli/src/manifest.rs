//! Run manifests: what was run, on which inputs, producing which outputs.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::settings::Settings;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
    /// Output is reproduced byte for byte by a replay at threads=1.
    #[serde(default)]
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Resolved options (config file merged with flags).
    pub config: Settings,
    pub seed: u64,
    pub threads: usize,
    pub graph_hash: String,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let mut f = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = f.read(&mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex(&h.finalize()))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn hex(b: &[u8]) -> String {
    b.iter().map(|x| format!("{x:02x}")).collect()
}

/// `<path>.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    sibling(out, "manifest.json")
}

/// `<path>.<suffix>`
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

impl RunManifest {
    pub fn new(command: &str, config: &Settings, graph_hash: String) -> RunManifest {
        let mut config = config.clone();
        config.config = None;
        RunManifest {
            command: command.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: config.seed(),
            threads: config.threads(),
            config,
            graph_hash,
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    /// Records every input file named in the settings.
    pub fn record_inputs(&mut self) -> CliResult<()> {
        let c = &self.config;
        let named = [
            ("graph", &c.input),
            ("embedding", &c.embedding),
            ("events", &c.events),
            ("categories", &c.categories),
        ];
        let mut inputs = Vec::new();
        for (role, path) in named {
            if let Some(p) = path {
                inputs.push(FileRecord {
                    role: role.to_owned(),
                    path: p.clone(),
                    sha256: sha256_file(p)?,
                    deterministic: true,
                });
            }
        }
        self.inputs = inputs;
        Ok(())
    }

    pub fn output(&mut self, role: &str, path: &Path, deterministic: bool) -> CliResult<()> {
        self.outputs.push(FileRecord {
            role: role.to_owned(),
            path: path.to_owned(),
            sha256: sha256_file(path)?,
            deterministic,
        });
        Ok(())
    }

    pub fn time(&mut self, phase: &str, secs: f64) {
        self.timings.insert(phase.to_owned(), secs);
    }

    /// Writes the manifest next to `out` and returns its path.
    pub fn write(&self, out: &Path) -> CliResult<PathBuf> {
        let path = manifest_path(out);
        std::fs::write(&path, serde_json::to_vec_pretty(self)?)?;
        Ok(path)
    }

    pub fn read(path: &Path) -> CliResult<RunManifest> {
        let text = std::fs::read(path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        serde_json::from_slice(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }
}
