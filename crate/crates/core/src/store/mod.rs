//! Durable document storage, the versioned taxonomy workspace and the view
//! cache.
//!
//! Documents are opaque JSON texts addressed by `(kind, id)`. The file-backed
//! store keeps one file per document at `<root>/<kind>/<id>.json` and replaces
//! files atomically by writing a temporary sibling and renaming it.

mod cache;
mod workspace;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub use cache::{CacheKey, CacheMode, Cached, ViewCache};
pub use workspace::{Workspace, TAXONOMY_KIND};

pub trait DocumentStore: Send + Sync {
    /// Stores `document`, replacing any previous version.
    fn put(&self, kind: &str, id: &str, document: &str) -> Result<()>;
    fn get(&self, kind: &str, id: &str) -> Result<String>;
    fn delete(&self, kind: &str, id: &str) -> Result<()>;
    /// Ids of all documents of `kind`, sorted.
    fn list(&self, kind: &str) -> Result<Vec<String>>;
}

/// Typed helpers over any [`DocumentStore`].
pub trait DocumentStoreExt: DocumentStore {
    fn put_json<T: Serialize>(&self, kind: &str, id: &str, value: &T) -> Result<()> {
        self.put(kind, id, &serde_json::to_string_pretty(value)?)
    }

    fn get_json<T: DeserializeOwned>(&self, kind: &str, id: &str) -> Result<T> {
        Ok(serde_json::from_str(&self.get(kind, id)?)?)
    }
}

impl<S: DocumentStore + ?Sized> DocumentStoreExt for S {}

/// Kinds and ids become path components, so only a conservative alphabet is
/// accepted.
fn check_key(field: &'static str, value: &str) -> Result<()> {
    let ok = !value.is_empty()
        && value.len() <= 128
        && !value.starts_with('.')
        && value
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::validation(field, format!("{value:?} is not a valid store key")))
    }
}

fn check_document(document: &str) -> Result<()> {
    serde_json::from_str::<serde::de::IgnoredAny>(document)?;
    Ok(())
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    docs: RwLock<BTreeMap<(String, String), String>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DocumentStore for MemoryStore {
    fn put(&self, kind: &str, id: &str, document: &str) -> Result<()> {
        check_key("kind", kind)?;
        check_key("id", id)?;
        check_document(document)?;
        self.docs
            .write()
            .expect("store lock")
            .insert((kind.to_owned(), id.to_owned()), document.to_owned());
        Ok(())
    }

    fn get(&self, kind: &str, id: &str) -> Result<String> {
        self.docs
            .read()
            .expect("store lock")
            .get(&(kind.to_owned(), id.to_owned()))
            .cloned()
            .ok_or_else(|| Error::not_found("document", format!("{kind}/{id}")))
    }

    fn delete(&self, kind: &str, id: &str) -> Result<()> {
        self.docs
            .write()
            .expect("store lock")
            .remove(&(kind.to_owned(), id.to_owned()))
            .map(|_| ())
            .ok_or_else(|| Error::not_found("document", format!("{kind}/{id}")))
    }

    fn list(&self, kind: &str) -> Result<Vec<String>> {
        Ok(self
            .docs
            .read()
            .expect("store lock")
            .keys()
            .filter(|(k, _)| k == kind)
            .map(|(_, id)| id.clone())
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct FileStore {
    root: PathBuf,
}

impl FileStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, kind: &str, id: &str) -> Result<PathBuf> {
        check_key("kind", kind)?;
        check_key("id", id)?;
        Ok(self.root.join(kind).join(format!("{id}.json")))
    }
}

impl DocumentStore for FileStore {
    fn put(&self, kind: &str, id: &str, document: &str) -> Result<()> {
        let path = self.path(kind, id)?;
        check_document(document)?;
        let dir = path.parent().expect("documents live in a kind directory");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{id}.{}.tmp", uuid::Uuid::new_v4().simple()));
        let result = (|| {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(document.as_bytes())?;
            file.sync_all()?;
            fs::rename(&tmp, &path)
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        Ok(result?)
    }

    fn get(&self, kind: &str, id: &str) -> Result<String> {
        let path = self.path(kind, id)?;
        match fs::read_to_string(&path) {
            Ok(text) => Ok(text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(Error::not_found("document", format!("{kind}/{id}")))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn delete(&self, kind: &str, id: &str) -> Result<()> {
        let path = self.path(kind, id)?;
        match fs::remove_file(&path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                Err(Error::not_found("document", format!("{kind}/{id}")))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn list(&self, kind: &str) -> Result<Vec<String>> {
        check_key("kind", kind)?;
        let dir = self.root.join(kind);
        let entries = match fs::read_dir(&dir) {
            Ok(entries) => entries,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(e.into()),
        };
        let mut ids = Vec::new();
        for entry in entries {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if name.starts_with('.') {
                continue;
            }
            if let Some(id) = name.strip_suffix(".json") {
                ids.push(id.to_owned());
            }
        }
        ids.sort();
        Ok(ids)
    }
}
