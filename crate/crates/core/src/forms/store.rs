//! Directory of package files indexed by label.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::label::EigenformLabel;
use super::package::{EigenformPackage, PackageError};

/// Environment variable naming the fixture directory.
pub const FIXTURE_ENV: &str = "MODCURVES_FIXTURES";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no package for {0} in the fixture directory")]
    Missing(String),
    #[error("package for {label} is invalid: {message}")]
    Invalid { label: String, message: String },
    #[error("cannot read fixture directory {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Outcome of loading one file.
#[derive(Debug)]
pub struct IngestEntry {
    pub path: PathBuf,
    pub result: Result<Arc<EigenformPackage>, PackageError>,
}

#[derive(Debug, Default)]
pub struct FixtureStore {
    root: PathBuf,
    packages: BTreeMap<String, Arc<EigenformPackage>>,
    invalid: Vec<InvalidFile>,
}

#[derive(Debug, Clone)]
pub struct InvalidFile {
    pub path: PathBuf,
    pub label: Option<String>,
    pub message: String,
}

impl FixtureStore {
    /// Load every `*.json` file under `root/packages` (or `root` itself when
    /// it has no `packages` subdirectory).
    pub fn open(root: &Path) -> Result<Self, StoreError> {
        let dir = if root.join("packages").is_dir() { root.join("packages") } else { root.to_path_buf() };
        let mut store = FixtureStore { root: root.to_path_buf(), ..Default::default() };
        for entry in ingest_dir(&dir)? {
            match entry.result {
                Ok(p) => {
                    store.packages.insert(p.label().to_string(), p);
                }
                Err(e) => store.invalid.push(InvalidFile {
                    label: label_of(&entry.path),
                    path: entry.path,
                    message: e.to_string(),
                }),
            }
        }
        Ok(store)
    }

    /// Resolve the fixture directory from the environment or a default.
    pub fn from_env(default: &Path) -> Result<Self, StoreError> {
        match std::env::var_os(FIXTURE_ENV) {
            Some(p) => Self::open(Path::new(&p)),
            None => Self::open(default),
        }
    }

    pub fn empty() -> Self {
        FixtureStore::default()
    }

    pub fn insert(&mut self, package: EigenformPackage) {
        self.packages.insert(package.label().to_string(), Arc::new(package));
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn get(&self, label: &EigenformLabel) -> Result<Arc<EigenformPackage>, StoreError> {
        let key = label.to_string();
        if let Some(p) = self.packages.get(&key) {
            return Ok(p.clone());
        }
        match self.invalid.iter().find(|f| f.label.as_deref() == Some(key.as_str())) {
            Some(f) => Err(StoreError::Invalid { label: key, message: f.message.clone() }),
            None => Err(StoreError::Missing(key)),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.packages.keys()
    }

    pub fn invalid(&self) -> &[InvalidFile] {
        &self.invalid
    }
}

/// Best-effort read of the `label` field of a file that failed validation.
fn label_of(path: &Path) -> Option<String> {
    let text = std::fs::read(path).ok()?;
    let v: serde_json::Value = serde_json::from_slice(&text).ok()?;
    let raw = v.get("label")?.as_str()?;
    Some(raw.parse::<EigenformLabel>().map(|l| l.to_string()).unwrap_or_else(|_| raw.to_string()))
}

/// Validate every JSON file in a directory, sorted by file name.
pub fn ingest_dir(dir: &Path) -> Result<Vec<IngestEntry>, StoreError> {
    let io = |source| StoreError::Io { path: dir.display().to_string(), source };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(ingest_files(&paths))
}

pub fn ingest_files(paths: &[PathBuf]) -> Vec<IngestEntry> {
    use rayon::prelude::*;
    paths.par_iter().map(|p| IngestEntry { path: p.clone(), result: EigenformPackage::load(p).map(Arc::new) }).collect()
}
