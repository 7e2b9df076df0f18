use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::SystemTime;

use crate::error::{Error, Result};
use crate::ids::TaxonomyId;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub taxonomy_id: TaxonomyId,
    pub view: String,
    pub fingerprint: String,
}

impl CacheKey {
    pub fn new(taxonomy_id: &TaxonomyId, view: &str, fingerprint: &str) -> Self {
        Self {
            taxonomy_id: taxonomy_id.clone(),
            view: view.to_owned(),
            fingerprint: fingerprint.to_owned(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheMode {
    /// Serve only entries built for the current version.
    Strict,
    /// Serve the previous entry, flagged stale, while another caller is
    /// already rebuilding it.
    AllowStale,
}

#[derive(Debug)]
pub struct Cached<V> {
    pub value: Arc<V>,
    /// Taxonomy version the value was built from.
    pub version: u64,
    pub stale: bool,
    /// Whether the value came from the cache rather than this call's build.
    pub hit: bool,
}

struct Entry<V> {
    value: Arc<V>,
    version: u64,
    #[allow(dead_code)]
    created_at: SystemTime,
}

type Flight<V> = Arc<OnceLock<Result<Arc<V>, String>>>;

/// Version-keyed cache of derived views with single-flight rebuilds.
pub struct ViewCache<V> {
    entries: Mutex<HashMap<CacheKey, Entry<V>>>,
    flights: Mutex<HashMap<(CacheKey, u64), Flight<V>>>,
    builds: AtomicU64,
}

impl<V> Default for ViewCache<V> {
    fn default() -> Self {
        Self {
            entries: Mutex::new(HashMap::new()),
            flights: Mutex::new(HashMap::new()),
            builds: AtomicU64::new(0),
        }
    }
}

impl<V> ViewCache<V> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of builder invocations so far.
    pub fn builds(&self) -> u64 {
        self.builds.load(Ordering::SeqCst)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops every entry of `taxonomy_id`.
    pub fn invalidate(&self, taxonomy_id: &TaxonomyId) {
        self.entries
            .lock()
            .expect("cache lock")
            .retain(|k, _| &k.taxonomy_id != taxonomy_id);
    }

    /// Returns the view for `key` at `version`, building it when needed.
    /// Concurrent requests for the same key and version share one build. A
    /// failing builder leaves the cache unchanged.
    pub fn get_or_build<F>(&self, key: &CacheKey, version: u64, mode: CacheMode, builder: F) -> Result<Cached<V>>
    where
        F: FnOnce() -> Result<V>,
    {
        let flight = {
            let entries = self.entries.lock().expect("cache lock");
            let mut flights = self.flights.lock().expect("cache lock");
            let existing = entries.get(key);
            if let Some(entry) = existing.filter(|e| e.version == version) {
                return Ok(Cached {
                    value: entry.value.clone(),
                    version,
                    stale: false,
                    hit: true,
                });
            }
            let flight_key = (key.clone(), version);
            if mode == CacheMode::AllowStale {
                if let (Some(entry), true) = (existing, flights.contains_key(&flight_key)) {
                    if entry.version < version {
                        return Ok(Cached {
                            value: entry.value.clone(),
                            version: entry.version,
                            stale: true,
                            hit: true,
                        });
                    }
                }
            }
            flights.entry(flight_key).or_default().clone()
        };

        let mut own_error = None;
        let mut built_here = false;
        let outcome = flight.get_or_init(|| {
            built_here = true;
            self.builds.fetch_add(1, Ordering::SeqCst);
            match builder() {
                Ok(value) => Ok(Arc::new(value)),
                Err(e) => {
                    let message = e.to_string();
                    own_error = Some(e);
                    Err(message)
                }
            }
        });

        if built_here {
            let mut entries = self.entries.lock().expect("cache lock");
            let mut flights = self.flights.lock().expect("cache lock");
            flights.remove(&(key.clone(), version));
            if let Ok(value) = outcome {
                let newer = entries.get(key).is_none_or(|e| e.version <= version);
                if newer {
                    entries.insert(
                        key.clone(),
                        Entry {
                            value: value.clone(),
                            version,
                            created_at: SystemTime::now(),
                        },
                    );
                }
            }
        }

        match outcome {
            Ok(value) => Ok(Cached {
                value: value.clone(),
                version,
                stale: false,
                hit: !built_here,
            }),
            Err(message) => Err(own_error.unwrap_or_else(|| Error::Builder(message.clone()))),
        }
    }
}
