//! Flat-file content-addressed cache: entries are JSON files named by the
//! SHA-256 of their canonical key material, written via temp-and-rename.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Cache { dir: dir.as_ref().to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hash arbitrary key material (serialize it canonically first).
    pub fn key_of(material: &str) -> String {
        let mut h = Sha256::new();
        h.update(material.as_bytes());
        hex::encode(h.finalize())
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.path_for(key).exists()
    }

    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        let p = self.path_for(key);
        if !p.exists() {
            return Ok(None);
        }
        let data = fs::read_to_string(p)?;
        Ok(Some(serde_json::from_str(&data)?))
    }

    pub fn store<T: Serialize>(&self, key: &str, value: &T) -> Result<()> {
        let body = serde_json::to_string(value)?;
        let tmp = self.dir.join(format!(".{key}.tmp.{}", std::process::id()));
        fs::write(&tmp, body)?;
        fs::rename(&tmp, self.path_for(key))?;
        Ok(())
    }
}
