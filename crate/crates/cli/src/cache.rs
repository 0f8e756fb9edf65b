//! Content-addressed artifact cache. Entries are JSON files named by the
//! SHA-256 of (descriptor, algorithm version, artifact kind) and written
//! through a temporary file plus rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "REFLEKT_CACHE";

pub fn cache_key(descriptor: &str, version: &str, kind: &str) -> String {
    let mut h = Sha256::new();
    for part in [descriptor, version, kind] {
        h.update(part.as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn from_env() -> Option<Self> {
        std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(Cache::new)
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load_bytes(&self, key: &str) -> Option<Vec<u8>> {
        fs::read(self.path(key)).ok()
    }

    pub fn store_bytes(&self, key: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))
    }

    fn discard(&self, key: &str, why: &str) {
        eprintln!("warning: discarding cache entry {key}: {why}");
        let _ = fs::remove_file(self.path(key));
    }

    /// Return a cached value that passes `valid`, or compute and store one.
    /// Entries that fail to parse or validate are removed and recomputed.
    pub fn get_or_compute<T, E>(
        &self,
        key: &str,
        valid: impl Fn(&T) -> bool,
        compute: impl FnOnce() -> Result<T, E>,
    ) -> Result<T, E>
    where
        T: Serialize + DeserializeOwned,
    {
        if let Some(bytes) = self.load_bytes(key) {
            match serde_json::from_slice::<T>(&bytes) {
                Ok(v) if valid(&v) => return Ok(v),
                Ok(_) => self.discard(key, "failed revalidation"),
                Err(e) => self.discard(key, &e.to_string()),
            }
        }
        let v = compute()?;
        match serde_json::to_vec(&v) {
            Ok(bytes) => {
                if let Err(e) = self.store_bytes(key, &bytes) {
                    eprintln!("warning: could not write cache entry {key}: {e}");
                }
            }
            Err(e) => eprintln!("warning: could not serialize cache entry {key}: {e}"),
        }
        Ok(v)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Cache that may be disabled.
pub fn cached<T, E>(
    cache: Option<&Cache>,
    key: &str,
    valid: impl Fn(&T) -> bool,
    compute: impl FnOnce() -> Result<T, E>,
) -> Result<T, E>
where
    T: Serialize + DeserializeOwned,
{
    match cache {
        Some(c) => c.get_or_compute(key, valid, compute),
        None => compute(),
    }
}
