//! Output files: atomic writes, rollback on failure, and a `manifest.json`
//! per output folder listing every artifact with its config digest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{AppError, Result};

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub command: String,
    pub config_digest: String,
    pub sha256: String,
    pub settings: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    /// Keyed by file name within the folder.
    pub artifacts: BTreeMap<String, ManifestEntry>,
}

impl Manifest {
    fn empty() -> Self {
        Manifest {
            tool: "fullersim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            core_version: crate::CORE_VERSION.into(),
            artifacts: BTreeMap::new(),
        }
    }

    pub fn read(dir: &Path) -> Result<Option<Self>> {
        let path = dir.join(MANIFEST);
        match fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| AppError::Parse { path, line: e.line(), message: e.to_string() }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(AppError::io(path, e)),
        }
    }
}

struct Written {
    path: PathBuf,
    sha256: String,
    keep_on_failure: bool,
}

/// Files written by one command invocation.
pub struct Outputs {
    command: String,
    digest: String,
    settings: BTreeMap<String, String>,
    written: Vec<Written>,
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| AppError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        AppError::io(path, e)
    })
}

impl Outputs {
    pub fn new(command: &str, digest: String, settings: BTreeMap<String, String>) -> Self {
        Outputs { command: command.into(), digest, settings, written: Vec::new() }
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Comment line naming the config digest, for text artifacts.
    pub fn stamp(&self) -> Vec<String> {
        vec![format!("fullersim {} config {}", self.command, self.digest)]
    }

    pub fn write(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
        self.write_inner(path, contents.as_ref(), false)
    }

    /// Written like [`Outputs::write`] but kept if the command later fails;
    /// used for caches, which are complete and valid on their own.
    pub fn write_persistent(&mut self, path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
        self.write_inner(path, contents.as_ref(), true)
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serialisable");
        text.push('\n');
        self.write(path, text)
    }

    fn write_inner(&mut self, path: &Path, contents: &[u8], keep_on_failure: bool) -> Result<()> {
        write_atomic(path, contents)?;
        self.written.retain(|w| w.path != path);
        self.written.push(Written {
            path: path.to_owned(),
            sha256: hex::encode(Sha256::digest(contents)),
            keep_on_failure,
        });
        Ok(())
    }

    /// Records every written file in its folder's manifest.
    pub fn commit(self) -> Result<()> {
        let written = self.written.iter().collect::<Vec<_>>();
        self.record(&written)
    }

    /// Removes non-persistent files after a failure and records the rest.
    pub fn abort(self) {
        let mut kept = Vec::new();
        for w in &self.written {
            if w.keep_on_failure {
                kept.push(w);
            } else {
                let _ = fs::remove_file(&w.path);
            }
        }
        let _ = self.record(&kept);
    }

    fn record(&self, files: &[&Written]) -> Result<()> {
        let mut by_dir: BTreeMap<PathBuf, Vec<&Written>> = BTreeMap::new();
        for w in files {
            let dir = w.path.parent().map(Path::to_owned).unwrap_or_default();
            by_dir.entry(dir).or_default().push(w);
        }
        for (dir, files) in by_dir {
            let dir_ref = if dir.as_os_str().is_empty() { Path::new(".") } else { dir.as_path() };
            let mut manifest = Manifest::read(dir_ref)?.unwrap_or_else(Manifest::empty);
            manifest.version = env!("CARGO_PKG_VERSION").into();
            manifest.core_version = crate::CORE_VERSION.into();
            for w in files {
                let name = w.path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                manifest.artifacts.insert(
                    name,
                    ManifestEntry {
                        command: self.command.clone(),
                        config_digest: self.digest.clone(),
                        sha256: w.sha256.clone(),
                        settings: self.settings.clone(),
                    },
                );
            }
            let mut text = serde_json::to_string_pretty(&manifest).expect("serialisable");
            text.push('\n');
            write_atomic(&dir_ref.join(MANIFEST), text.as_bytes())?;
        }
        Ok(())
    }
}
