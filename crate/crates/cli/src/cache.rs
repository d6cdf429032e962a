//! On-disk cache of reduced bases, one `gb_<n>.json` per `n`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use grcup_core::groebner::{GroebnerBasis, Provenance};
use grcup_core::Polynomial;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ENGINE_VERSION;

pub const CACHE_ENV: &str = "GRCUP_CACHE";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("no cache directory: pass --cache-dir or set {CACHE_ENV}")]
    NoDirectory,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub n: u64,
    pub engine_version: String,
    pub basis: Vec<Polynomial>,
    pub checksum: String,
}

/// Hex SHA-256 of the canonical JSON of `(n, engine_version, basis)`.
pub fn checksum(n: u64, engine_version: &str, basis: &[Polynomial]) -> String {
    let canonical = serde_json::to_vec(&(n, engine_version, basis)).expect("serializable");
    hex::encode(Sha256::digest(&canonical))
}

impl CacheEntry {
    pub fn new(n: u64, basis: Vec<Polynomial>) -> Self {
        let checksum = checksum(n, ENGINE_VERSION, &basis);
        CacheEntry { n, engine_version: ENGINE_VERSION.to_string(), basis, checksum }
    }
}

/// Why an existing entry was not used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    Unparsable(String),
    WrongN(u64),
    StaleVersion(String),
    BadChecksum,
    NotGroebner,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::Unparsable(e) => write!(f, "unparsable ({e})"),
            Rejection::WrongN(n) => write!(f, "entry is for n={n}"),
            Rejection::StaleVersion(v) => write!(f, "stale engine version {v}"),
            Rejection::BadChecksum => f.write_str("checksum mismatch"),
            Rejection::NotGroebner => f.write_str("stored basis fails the Buchberger criterion"),
        }
    }
}

#[derive(Debug)]
pub enum Lookup {
    Hit(GroebnerBasis),
    Miss,
    Rejected(Rejection),
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `--cache-dir`, then `GRCUP_CACHE`, then the platform cache directory.
    pub fn resolve(flag: Option<PathBuf>) -> Result<Self, CacheError> {
        if let Some(dir) = flag {
            return Ok(Cache::new(dir));
        }
        if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            return Ok(Cache::new(dir));
        }
        dirs::cache_dir().map(|d| Cache::new(d.join("gr-cup"))).ok_or(CacheError::NoDirectory)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, n: u64) -> PathBuf {
        self.dir.join(format!("gb_{n}.json"))
    }

    pub fn load(&self, n: u64) -> Result<Lookup, CacheError> {
        let path = self.path_for(n);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Lookup::Miss),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let entry: CacheEntry = match serde_json::from_slice(&bytes) {
            Ok(e) => e,
            Err(e) => return Ok(Lookup::Rejected(Rejection::Unparsable(e.to_string()))),
        };
        if entry.n != n {
            return Ok(Lookup::Rejected(Rejection::WrongN(entry.n)));
        }
        if entry.engine_version != ENGINE_VERSION {
            return Ok(Lookup::Rejected(Rejection::StaleVersion(entry.engine_version)));
        }
        if entry.checksum != checksum(entry.n, &entry.engine_version, &entry.basis) {
            return Ok(Lookup::Rejected(Rejection::BadChecksum));
        }
        match GroebnerBasis::verified(entry.basis, Provenance::LoadedFromCache, Some(n)) {
            Ok(gb) => Ok(Lookup::Hit(gb)),
            Err(_) => Ok(Lookup::Rejected(Rejection::NotGroebner)),
        }
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place, so concurrent readers never see a partial entry.
    pub fn store(&self, n: u64, basis: &[Polynomial]) -> Result<(), CacheError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CacheError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io_err(&self.dir))?;
        let entry = CacheEntry::new(n, basis.to_vec());
        let mut json = serde_json::to_vec(&entry).expect("serializable");
        json.push(b'\n');
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io_err(&self.dir))?;
        tmp.write_all(&json).map_err(io_err(tmp.path()))?;
        let target = self.path_for(n);
        tmp.persist(&target).map_err(|e| CacheError::Io { path: target, source: e.error })?;
        Ok(())
    }
}
