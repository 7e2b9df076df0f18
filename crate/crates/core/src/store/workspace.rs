use std::sync::{Arc, Mutex, RwLock};

use indexmap::IndexMap;

use super::DocumentStore;
use crate::error::{Error, Result};
use crate::ids::TaxonomyId;
use crate::taxonomy::{fold, MergeReport, Taxonomy};

pub const TAXONOMY_KIND: &str = "taxonomy";

/// All taxonomies of a deployment, persisted through a [`DocumentStore`].
///
/// Readers get immutable snapshots. Writers work on a private copy that
/// replaces the snapshot only after it was validated and persisted, so a
/// failed mutation is never visible.
pub struct Workspace {
    store: Arc<dyn DocumentStore>,
    taxonomies: RwLock<IndexMap<TaxonomyId, Arc<Taxonomy>>>,
    writer: Mutex<()>,
}

impl Workspace {
    /// Loads every stored taxonomy.
    pub fn open(store: Arc<dyn DocumentStore>) -> Result<Self> {
        let mut taxonomies = IndexMap::new();
        for id in store.list(TAXONOMY_KIND)? {
            let tax = Taxonomy::from_json(&store.get(TAXONOMY_KIND, &id)?)?;
            taxonomies.insert(tax.id().clone(), Arc::new(tax));
        }
        taxonomies.sort_by(|_, a, _, b| a.name().cmp(b.name()).then_with(|| a.id().cmp(b.id())));
        Ok(Self {
            store,
            taxonomies: RwLock::new(taxonomies),
            writer: Mutex::new(()),
        })
    }

    pub fn store(&self) -> &Arc<dyn DocumentStore> {
        &self.store
    }

    pub fn list(&self) -> Vec<Arc<Taxonomy>> {
        self.taxonomies.read().expect("workspace lock").values().cloned().collect()
    }

    pub fn get(&self, id: &TaxonomyId) -> Result<Arc<Taxonomy>> {
        self.taxonomies
            .read()
            .expect("workspace lock")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::not_found("taxonomy", id))
    }

    fn name_taken(&self, name: &str, except: Option<&TaxonomyId>) -> bool {
        let key = fold(name);
        self.taxonomies
            .read()
            .expect("workspace lock")
            .values()
            .any(|t| Some(t.id()) != except && fold(t.name()) == key)
    }

    fn commit(&self, tax: Taxonomy) -> Result<Arc<Taxonomy>> {
        self.store.put(TAXONOMY_KIND, tax.id().as_str(), &tax.to_json())?;
        let tax = Arc::new(tax);
        self.taxonomies
            .write()
            .expect("workspace lock")
            .insert(tax.id().clone(), tax.clone());
        Ok(tax)
    }

    pub fn create(&self, name: &str) -> Result<Arc<Taxonomy>> {
        let _guard = self.writer.lock().expect("writer lock");
        let tax = Taxonomy::new(name)?;
        if self.name_taken(tax.name(), None) {
            return Err(Error::NameConflict(tax.name().to_owned()));
        }
        self.commit(tax)
    }

    /// Applies `change` to a copy of the taxonomy and publishes it. When
    /// `expected_version` is given and differs from the current version the
    /// call fails with a version conflict before `change` runs.
    pub fn mutate<R>(
        &self,
        id: &TaxonomyId,
        expected_version: Option<u64>,
        change: impl FnOnce(&mut Taxonomy) -> Result<R>,
    ) -> Result<(R, Arc<Taxonomy>)> {
        let _guard = self.writer.lock().expect("writer lock");
        let current = self.get(id)?;
        if let Some(expected) = expected_version {
            if expected != current.version() {
                return Err(Error::VersionConflict {
                    expected,
                    actual: current.version(),
                });
            }
        }
        let mut draft = (*current).clone();
        let result = change(&mut draft)?;
        if draft.version() == current.version() {
            return Ok((result, current));
        }
        if draft.name() != current.name() && self.name_taken(draft.name(), Some(id)) {
            return Err(Error::NameConflict(draft.name().to_owned()));
        }
        Ok((result, self.commit(draft)?))
    }

    pub fn delete(&self, id: &TaxonomyId) -> Result<()> {
        let _guard = self.writer.lock().expect("writer lock");
        self.get(id)?;
        self.store.delete(TAXONOMY_KIND, id.as_str())?;
        self.taxonomies.write().expect("workspace lock").shift_remove(id);
        Ok(())
    }

    /// Forks `id`. The fork is named `"<name> (fork)"`, or `"<name> (fork N)"`
    /// when that name is taken.
    pub fn fork(&self, id: &TaxonomyId) -> Result<Arc<Taxonomy>> {
        let _guard = self.writer.lock().expect("writer lock");
        let parent = self.get(id)?;
        let mut fork = parent.fork();
        let mut n = 2;
        while self.name_taken(fork.name(), None) {
            fork.name = format!("{} (fork {n})", parent.name());
            n += 1;
        }
        self.commit(fork)
    }

    pub fn merge(
        &self,
        parent: &TaxonomyId,
        fork: &TaxonomyId,
        expected_version: Option<u64>,
    ) -> Result<(MergeReport, Arc<Taxonomy>)> {
        let fork = self.get(fork)?;
        self.mutate(parent, expected_version, |tax| tax.merge_fork(&fork))
    }

    pub fn export(&self, id: &TaxonomyId) -> Result<String> {
        Ok(self.get(id)?.to_json())
    }

    /// Imports a canonical document under its own id.
    pub fn import(&self, json: &str) -> Result<Arc<Taxonomy>> {
        let _guard = self.writer.lock().expect("writer lock");
        let tax = Taxonomy::from_json(json)?;
        if self.get(tax.id()).is_ok() {
            return Err(Error::DuplicateName {
                kind: "taxonomy id",
                name: tax.id().to_string(),
            });
        }
        if self.name_taken(tax.name(), None) {
            return Err(Error::NameConflict(tax.name().to_owned()));
        }
        self.commit(tax)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{FileStore, MemoryStore};
    use crate::taxonomy::ConceptKind;

    fn workspace() -> Workspace {
        Workspace::open(Arc::new(MemoryStore::new())).unwrap()
    }

    #[test]
    fn create_enforces_unique_names() {
        let ws = workspace();
        ws.create("Security").unwrap();
        assert_eq!(ws.create(" security ").unwrap_err().code(), "name_conflict");
        let other = ws.create("Other").unwrap();
        let err = ws.mutate(other.id(), None, |t| t.rename("SECURITY")).unwrap_err();
        assert_eq!(err.code(), "name_conflict");
        assert_eq!(ws.get(other.id()).unwrap().name(), "Other");
    }

    #[test]
    fn stale_version_is_rejected_without_side_effects() {
        let ws = workspace();
        let tax = ws.create("T").unwrap();
        let dim = tax.dimensions().next().unwrap().id.clone();
        let (_, after) = ws
            .mutate(tax.id(), Some(1), |t| t.add_concept(&dim, "A", ConceptKind::Node))
            .unwrap();
        assert_eq!(after.version(), 2);
        let err = ws
            .mutate(tax.id(), Some(1), |t| t.add_concept(&dim, "B", ConceptKind::Node))
            .unwrap_err();
        assert!(matches!(err, Error::VersionConflict { expected: 1, actual: 2 }));
        assert_eq!(ws.get(tax.id()).unwrap().concepts().len(), 1);
        // A failing change is not published either.
        assert!(ws
            .mutate(tax.id(), None, |t| t.add_concept(&dim, "a", ConceptKind::Node))
            .is_err());
        assert_eq!(ws.get(tax.id()).unwrap().version(), 2);
    }

    #[test]
    fn fork_names_and_merge() {
        let ws = workspace();
        let tax = ws.create("Base").unwrap();
        let f1 = ws.fork(tax.id()).unwrap();
        let f2 = ws.fork(tax.id()).unwrap();
        assert_eq!(f1.name(), "Base (fork)");
        assert_eq!(f2.name(), "Base (fork 2)");
        let dim = f1.dimensions().next().unwrap().id.clone();
        ws.mutate(f1.id(), None, |t| t.add_concept(&dim, "New", ConceptKind::Node))
            .unwrap();
        let (report, merged) = ws.merge(tax.id(), f1.id(), Some(1)).unwrap();
        assert_eq!(report.added_concepts.len(), 1);
        assert_eq!(merged.version(), 2);
        assert_eq!(ws.merge(f1.id(), tax.id(), None).unwrap_err().code(), "not_descendant");
    }

    #[test]
    fn survives_reopen_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let store: Arc<dyn DocumentStore> = Arc::new(FileStore::open(dir.path()).unwrap());
        let ws = Workspace::open(store.clone()).unwrap();
        let tax = ws.create("Persisted").unwrap();
        let exported = ws.export(tax.id()).unwrap();
        drop(ws);
        let ws = Workspace::open(store).unwrap();
        assert_eq!(ws.export(tax.id()).unwrap(), exported);
        ws.delete(tax.id()).unwrap();
        assert!(ws.list().is_empty());
        ws.import(&exported).unwrap();
        assert_eq!(ws.export(tax.id()).unwrap(), exported);
        assert_eq!(ws.import(&exported).unwrap_err().code(), "duplicate_name");
    }
}
