//! Content-addressed report storage keyed by the SHA-256 of the configuration.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::ExperimentConfig;
use crate::report::ExperimentReport;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("no stored report for key {0}")]
    Miss(String),
    #[error("stored report has version {found}, this build is {current}")]
    VersionMismatch { found: String, current: String },
    #[error("stored report is unreadable: {0}")]
    Corrupt(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn major(version: &str) -> Option<u64> {
    version.split('.').next()?.parse().ok()
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The directory named by the override variable, or `./ffkr-results`.
    pub fn from_env() -> Self {
        Cache::new(
            std::env::var_os(crate::RESULTS_DIR_ENV)
                .map_or_else(|| PathBuf::from("ffkr-results"), PathBuf::from),
        )
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(config: &ExperimentConfig) -> String {
        let bytes = serde_json::to_vec(config).expect("configs always serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn store(&self, report: &ExperimentReport) -> Result<PathBuf, CacheError> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.path_for(&Cache::key(&report.config));
        std::fs::write(&path, report.to_json())?;
        Ok(path)
    }

    pub fn load(&self, config: &ExperimentConfig) -> Result<ExperimentReport, CacheError> {
        let key = Cache::key(config);
        let path = self.path_for(&key);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(CacheError::Miss(key))
            }
            Err(e) => return Err(e.into()),
        };
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CacheError::Corrupt(e.to_string()))?;
        let found = value
            .get("version")
            .and_then(|v| v.as_str())
            .unwrap_or("")
            .to_string();
        if major(&found) != major(crate::VERSION) {
            return Err(CacheError::VersionMismatch {
                found,
                current: crate::VERSION.into(),
            });
        }
        serde_json::from_value(value).map_err(|e| CacheError::Corrupt(e.to_string()))
    }

    /// Deletes stored reports that cannot be read back by this build; returns how many.
    pub fn gc(&self) -> Result<usize, CacheError> {
        let entries = match std::fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut removed = 0;
        for entry in entries {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let keep = std::fs::read_to_string(&path)
                .ok()
                .and_then(|t| serde_json::from_str::<ExperimentReport>(&t).ok())
                .is_some_and(|r| major(&r.version) == major(crate::VERSION));
            if !keep {
                std::fs::remove_file(&path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }
}
