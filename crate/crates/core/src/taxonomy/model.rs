use std::collections::{BTreeSet, HashMap, HashSet};

use indexmap::IndexMap;

use super::{
    clean_name, fold, Concept, ConceptKind, Dimension, Hierarchy, LayoutSnapshot, Mapping,
    Provenance, Relation, RelationType, Synonym,
};
use crate::error::{Error, Result};
use crate::ids::{ConceptId, DimensionId, PaperId, RelationId, TaxonomyId};
use crate::review::Paper;

/// Name of the dimension every new taxonomy starts with.
pub const DEFAULT_DIMENSION: &str = "default";

#[derive(Clone, Debug, PartialEq)]
pub struct Taxonomy {
    pub(crate) id: TaxonomyId,
    pub(crate) name: String,
    pub(crate) version: u64,
    pub(crate) public: bool,
    pub(crate) parent_id: Option<TaxonomyId>,
    pub(crate) dimensions: IndexMap<DimensionId, Dimension>,
    pub(crate) concepts: IndexMap<ConceptId, Concept>,
    pub(crate) relations: IndexMap<RelationId, Relation>,
    pub(crate) synonyms: Vec<Synonym>,
    pub(crate) papers: IndexMap<PaperId, Paper>,
    pub(crate) mappings: IndexMap<(PaperId, ConceptId), Mapping>,
    pub(crate) positions: Option<LayoutSnapshot>,
}

/// Result of an upsert-style mapping call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapOutcome {
    pub mapping: Mapping,
    pub changed: bool,
}

impl Taxonomy {
    /// Creates a taxonomy with a single dimension named `default` at version 1.
    pub fn new(name: &str) -> Result<Self> {
        let name = clean_name("taxonomy name", name)?;
        let mut dimensions = IndexMap::new();
        let default = Dimension {
            id: DimensionId::generate(),
            name: DEFAULT_DIMENSION.to_owned(),
            description: String::new(),
        };
        dimensions.insert(default.id.clone(), default);
        Ok(Self {
            id: TaxonomyId::generate(),
            name,
            version: 1,
            public: false,
            parent_id: None,
            dimensions,
            concepts: IndexMap::new(),
            relations: IndexMap::new(),
            synonyms: Vec::new(),
            papers: IndexMap::new(),
            mappings: IndexMap::new(),
            positions: None,
        })
    }

    pub fn id(&self) -> &TaxonomyId {
        &self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn is_public(&self) -> bool {
        self.public
    }

    /// The taxonomy this one was forked from, if any.
    pub fn parent_id(&self) -> Option<&TaxonomyId> {
        self.parent_id.as_ref()
    }

    pub fn dimensions(&self) -> impl ExactSizeIterator<Item = &Dimension> {
        self.dimensions.values()
    }

    pub fn dimension(&self, id: &DimensionId) -> Option<&Dimension> {
        self.dimensions.get(id)
    }

    pub fn dimension_by_name(&self, name: &str) -> Option<&Dimension> {
        let key = fold(name);
        self.dimensions.values().find(|d| fold(&d.name) == key)
    }

    pub fn concepts(&self) -> impl ExactSizeIterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn concept(&self, id: &ConceptId) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn concept_by_name(&self, dimension_id: &DimensionId, name: &str) -> Option<&Concept> {
        let key = fold(name);
        self.concepts
            .values()
            .find(|c| &c.dimension_id == dimension_id && fold(&c.name) == key)
    }

    pub fn relations(&self) -> impl ExactSizeIterator<Item = &Relation> {
        self.relations.values()
    }

    pub fn relation(&self, id: &RelationId) -> Option<&Relation> {
        self.relations.get(id)
    }

    pub fn relation_between(&self, source: &ConceptId, target: &ConceptId) -> Option<&Relation> {
        self.relations
            .values()
            .find(|r| &r.source_id == source && &r.target_id == target)
    }

    pub fn synonyms(&self) -> &[Synonym] {
        &self.synonyms
    }

    pub fn synonyms_of<'a>(&'a self, concept: &'a ConceptId) -> impl Iterator<Item = &'a str> {
        self.synonyms
            .iter()
            .filter(move |s| &s.concept_id == concept)
            .map(|s| s.term.as_str())
    }

    pub fn papers(&self) -> impl ExactSizeIterator<Item = &Paper> {
        self.papers.values()
    }

    pub fn paper(&self, id: &PaperId) -> Option<&Paper> {
        self.papers.get(id)
    }

    pub fn mappings(&self) -> impl ExactSizeIterator<Item = &Mapping> {
        self.mappings.values()
    }

    pub fn mapping(&self, paper: &PaperId, concept: &ConceptId) -> Option<&Mapping> {
        self.mappings.get(&(paper.clone(), concept.clone()))
    }

    /// Papers mapped directly to `concept`.
    pub fn mapped_papers(&self, concept: &ConceptId) -> BTreeSet<PaperId> {
        self.mappings
            .values()
            .filter(|m| &m.concept_id == concept)
            .map(|m| m.paper_id.clone())
            .collect()
    }

    pub fn positions(&self) -> Option<&LayoutSnapshot> {
        self.positions.as_ref()
    }

    /// Builds the parent-child forest from hierarchical relations.
    pub fn hierarchy(&self) -> Hierarchy {
        Hierarchy::derive(self)
    }

    pub(crate) fn bump(&mut self) {
        self.version += 1;
    }

    // ---- taxonomy-level ----

    pub fn rename(&mut self, name: &str) -> Result<()> {
        let name = clean_name("taxonomy name", name)?;
        if name != self.name {
            self.name = name;
            self.bump();
        }
        Ok(())
    }

    pub fn set_public(&mut self, public: bool) {
        if self.public != public {
            self.public = public;
            self.bump();
        }
    }

    // ---- dimensions ----

    pub fn add_dimension(&mut self, name: &str, description: &str) -> Result<DimensionId> {
        let name = clean_name("dimension name", name)?;
        if self.dimension_by_name(&name).is_some() {
            return Err(Error::DuplicateName {
                kind: "dimension",
                name,
            });
        }
        let dim = Dimension {
            id: DimensionId::generate(),
            name,
            description: description.to_owned(),
        };
        let id = dim.id.clone();
        self.dimensions.insert(id.clone(), dim);
        self.bump();
        Ok(id)
    }

    pub fn rename_dimension(&mut self, id: &DimensionId, name: &str) -> Result<()> {
        let name = clean_name("dimension name", name)?;
        self.require_dimension(id)?;
        if let Some(other) = self.dimension_by_name(&name) {
            if &other.id != id {
                return Err(Error::DuplicateName {
                    kind: "dimension",
                    name,
                });
            }
        }
        self.dimensions[id].name = name;
        self.bump();
        Ok(())
    }

    pub fn set_dimension_description(&mut self, id: &DimensionId, description: &str) -> Result<()> {
        self.require_dimension(id)?;
        self.dimensions[id].description = description.to_owned();
        self.bump();
        Ok(())
    }

    /// Removes a dimension together with all of its concepts.
    pub fn remove_dimension(&mut self, id: &DimensionId) -> Result<()> {
        self.require_dimension(id)?;
        let doomed: Vec<ConceptId> = self
            .concepts
            .values()
            .filter(|c| &c.dimension_id == id)
            .map(|c| c.id.clone())
            .collect();
        for concept in &doomed {
            self.detach_concept(concept);
        }
        self.dimensions.shift_remove(id);
        if let Some(positions) = self.positions.as_mut() {
            positions.remove(id.as_str());
        }
        self.bump();
        Ok(())
    }

    // ---- concepts ----

    pub fn add_concept(
        &mut self,
        dimension_id: &DimensionId,
        name: &str,
        kind: ConceptKind,
    ) -> Result<ConceptId> {
        let name = clean_name("concept name", name)?;
        self.require_dimension(dimension_id)?;
        if self.concept_by_name(dimension_id, &name).is_some() {
            return Err(Error::DuplicateName {
                kind: "concept",
                name,
            });
        }
        let concept = Concept {
            id: ConceptId::generate(),
            dimension_id: dimension_id.clone(),
            name,
            kind,
            notes: String::new(),
        };
        let id = concept.id.clone();
        self.concepts.insert(id.clone(), concept);
        self.bump();
        Ok(id)
    }

    pub fn rename_concept(&mut self, id: &ConceptId, name: &str) -> Result<()> {
        let name = clean_name("concept name", name)?;
        let dimension = self.require_concept(id)?.dimension_id.clone();
        if let Some(other) = self.concept_by_name(&dimension, &name) {
            if &other.id != id {
                return Err(Error::DuplicateName {
                    kind: "concept",
                    name,
                });
            }
        }
        self.concepts[id].name = name;
        self.bump();
        Ok(())
    }

    pub fn set_concept_kind(&mut self, id: &ConceptId, kind: ConceptKind) -> Result<()> {
        self.require_concept(id)?;
        self.concepts[id].kind = kind;
        self.bump();
        Ok(())
    }

    pub fn set_concept_notes(&mut self, id: &ConceptId, notes: &str) -> Result<()> {
        self.require_concept(id)?;
        self.concepts[id].notes = notes.to_owned();
        self.bump();
        Ok(())
    }

    /// Deletes a concept and every relation, mapping, synonym and layout entry
    /// that mentions it. Former children become hierarchy roots.
    pub fn remove_concept(&mut self, id: &ConceptId) -> Result<()> {
        self.require_concept(id)?;
        self.detach_concept(id);
        self.bump();
        Ok(())
    }

    fn detach_concept(&mut self, id: &ConceptId) {
        self.relations
            .retain(|_, r| &r.source_id != id && &r.target_id != id);
        self.mappings.retain(|(_, c), _| c != id);
        self.synonyms.retain(|s| &s.concept_id != id);
        if let Some(positions) = self.positions.as_mut() {
            positions.remove(id.as_str());
        }
        self.concepts.shift_remove(id);
    }

    // ---- relations ----

    pub fn add_relation(
        &mut self,
        source: &ConceptId,
        target: &ConceptId,
        rel_type: RelationType,
        annotation: &str,
    ) -> Result<RelationId> {
        if source == target {
            return Err(Error::SelfLoop);
        }
        self.require_concept(source)?;
        self.require_concept(target)?;
        if self.relation_between(source, target).is_some() {
            return Err(Error::DuplicateRelation {
                source_id: source.to_string(),
                target: target.to_string(),
            });
        }
        if rel_type.is_hierarchical() {
            self.check_new_hierarchy_edge(source, target, None)?;
        }
        let relation = Relation {
            id: RelationId::generate(),
            source_id: source.clone(),
            target_id: target.clone(),
            rel_type,
            annotation: annotation.to_owned(),
        };
        let id = relation.id.clone();
        self.relations.insert(id.clone(), relation);
        self.bump();
        Ok(id)
    }

    pub fn set_relation_type(&mut self, id: &RelationId, rel_type: RelationType) -> Result<()> {
        let relation = self.require_relation(id)?.clone();
        if rel_type.is_hierarchical() && !relation.rel_type.is_hierarchical() {
            self.check_new_hierarchy_edge(&relation.source_id, &relation.target_id, Some(id))?;
        }
        self.relations[id].rel_type = rel_type;
        self.bump();
        Ok(())
    }

    pub fn annotate_relation(&mut self, id: &RelationId, annotation: &str) -> Result<()> {
        self.require_relation(id)?;
        self.relations[id].annotation = annotation.to_owned();
        self.bump();
        Ok(())
    }

    pub fn remove_relation(&mut self, id: &RelationId) -> Result<()> {
        self.require_relation(id)?;
        self.relations.shift_remove(id);
        self.bump();
        Ok(())
    }

    /// Rejects a hierarchical edge `source -> target` (child to parent) when
    /// `source` is already an ancestor of `target`.
    fn check_new_hierarchy_edge(
        &self,
        source: &ConceptId,
        target: &ConceptId,
        ignore: Option<&RelationId>,
    ) -> Result<()> {
        let mut parents: HashMap<&ConceptId, Vec<&ConceptId>> = HashMap::new();
        for r in self.relations.values() {
            if r.rel_type.is_hierarchical() && Some(&r.id) != ignore {
                parents.entry(&r.source_id).or_default().push(&r.target_id);
            }
        }
        // BFS upwards from target; reaching source closes a cycle.
        let mut came_from: HashMap<&ConceptId, &ConceptId> = HashMap::new();
        let mut seen: HashSet<&ConceptId> = HashSet::from([target]);
        let mut queue = std::collections::VecDeque::from([target]);
        while let Some(node) = queue.pop_front() {
            if node == source {
                let mut path = vec![node];
                let mut cur = node;
                while let Some(prev) = came_from.get(cur) {
                    path.push(prev);
                    cur = prev;
                }
                path.reverse();
                return Err(Error::HierarchyCycle {
                    path: path.into_iter().map(|c| self.display_name(c)).collect(),
                });
            }
            for parent in parents.get(node).into_iter().flatten() {
                if seen.insert(parent) {
                    came_from.insert(parent, node);
                    queue.push_back(parent);
                }
            }
        }
        Ok(())
    }

    pub(crate) fn display_name(&self, id: &ConceptId) -> String {
        self.concepts
            .get(id)
            .map(|c| c.name.clone())
            .unwrap_or_else(|| id.to_string())
    }

    // ---- synonyms ----

    /// Adds a synonym term. Returns `false` when the term already exists.
    pub fn add_synonym(&mut self, concept: &ConceptId, term: &str) -> Result<bool> {
        let term = clean_name("synonym", term)?;
        self.require_concept(concept)?;
        let key = fold(&term);
        if self
            .synonyms
            .iter()
            .any(|s| &s.concept_id == concept && fold(&s.term) == key)
        {
            return Ok(false);
        }
        self.synonyms.push(Synonym {
            concept_id: concept.clone(),
            term,
        });
        self.bump();
        Ok(true)
    }

    pub fn remove_synonym(&mut self, concept: &ConceptId, term: &str) -> Result<bool> {
        self.require_concept(concept)?;
        let key = fold(term);
        let before = self.synonyms.len();
        self.synonyms
            .retain(|s| !(&s.concept_id == concept && fold(&s.term) == key));
        let changed = self.synonyms.len() != before;
        if changed {
            self.bump();
        }
        Ok(changed)
    }

    // ---- mappings ----

    /// Upserts a mapping. Manual mappings overwrite automatic ones; automatic
    /// mappings never overwrite manual ones.
    pub fn map_paper(
        &mut self,
        paper: &PaperId,
        concept: &ConceptId,
        provenance: Provenance,
        occurrence_count: u32,
    ) -> Result<MapOutcome> {
        self.require_paper(paper)?;
        self.require_concept(concept)?;
        let outcome = self.upsert_mapping(Mapping {
            paper_id: paper.clone(),
            concept_id: concept.clone(),
            provenance,
            occurrence_count,
        });
        if outcome.changed {
            self.bump();
        }
        Ok(outcome)
    }

    pub(crate) fn upsert_mapping(&mut self, incoming: Mapping) -> MapOutcome {
        let key = (incoming.paper_id.clone(), incoming.concept_id.clone());
        match self.mappings.get_mut(&key) {
            Some(existing) => {
                if existing.provenance.is_manual() && !incoming.provenance.is_manual() {
                    return MapOutcome {
                        mapping: existing.clone(),
                        changed: false,
                    };
                }
                let changed = *existing != incoming;
                *existing = incoming;
                MapOutcome {
                    mapping: existing.clone(),
                    changed,
                }
            }
            None => {
                self.mappings.insert(key, incoming.clone());
                MapOutcome {
                    mapping: incoming,
                    changed: true,
                }
            }
        }
    }

    /// Removes a mapping. Returns `false` when there was nothing to remove.
    pub fn unmap_paper(&mut self, paper: &PaperId, concept: &ConceptId) -> bool {
        let changed = self
            .mappings
            .shift_remove(&(paper.clone(), concept.clone()))
            .is_some();
        if changed {
            self.bump();
        }
        changed
    }

    // ---- layout ----

    /// Replaces the saved layout wholesale. Fails without changes when the
    /// snapshot references unknown concepts or dimensions.
    pub fn save_layout(&mut self, snapshot: LayoutSnapshot) -> Result<u64> {
        let unknown: Vec<String> = snapshot
            .keys()
            .filter(|key| {
                !self.concepts.contains_key(&ConceptId::from(key.as_str()))
                    && !self.dimensions.contains_key(&DimensionId::from(key.as_str()))
            })
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(Error::StaleLayout { ids: unknown });
        }
        self.positions = Some(snapshot);
        self.bump();
        Ok(self.version)
    }

    // ---- merge ----

    /// Folds `absorbed` into `survivor`: mappings, synonyms and relations are
    /// re-pointed, the absorbed name becomes a synonym, and the absorbed
    /// concept is deleted. Rejected without changes if the result would
    /// contain a hierarchy cycle.
    pub fn merge_concepts(&mut self, survivor: &ConceptId, absorbed: &ConceptId) -> Result<ConceptId> {
        if survivor == absorbed {
            return Err(Error::validation(
                "merge",
                "survivor and absorbed concept must differ",
            ));
        }
        self.require_concept(survivor)?;
        let absorbed_name = self.require_concept(absorbed)?.name.clone();

        let existing_pairs: HashSet<(ConceptId, ConceptId)> = self
            .relations
            .values()
            .filter(|r| &r.source_id != absorbed && &r.target_id != absorbed)
            .map(|r| (r.source_id.clone(), r.target_id.clone()))
            .collect();

        let mut relations = IndexMap::with_capacity(self.relations.len());
        for relation in self.relations.values() {
            let mut relation = relation.clone();
            let touched = &relation.source_id == absorbed || &relation.target_id == absorbed;
            if !touched {
                relations.insert(relation.id.clone(), relation);
                continue;
            }
            if &relation.source_id == absorbed {
                relation.source_id = survivor.clone();
            }
            if &relation.target_id == absorbed {
                relation.target_id = survivor.clone();
            }
            if relation.source_id == relation.target_id {
                if relation.rel_type.is_hierarchical() {
                    return Err(Error::HierarchyCycle {
                        path: vec![self.display_name(survivor), absorbed_name],
                    });
                }
                continue;
            }
            let pair = (relation.source_id.clone(), relation.target_id.clone());
            if existing_pairs.contains(&pair) {
                continue;
            }
            relations.insert(relation.id.clone(), relation);
        }
        let hierarchy_edges: Vec<(&ConceptId, &ConceptId)> = relations
            .values()
            .filter(|r: &&Relation| r.rel_type.is_hierarchical())
            .map(|r| (&r.source_id, &r.target_id))
            .collect();
        if let Some(cycle) = find_cycle(&hierarchy_edges) {
            return Err(Error::HierarchyCycle {
                path: cycle.iter().map(|c| self.display_name(c)).collect(),
            });
        }

        // Validated; apply.
        self.relations = relations;

        let moved: Vec<Mapping> = self
            .mappings
            .values()
            .filter(|m| &m.concept_id == absorbed)
            .cloned()
            .collect();
        self.mappings.retain(|(_, c), _| c != absorbed);
        for mut mapping in moved {
            mapping.concept_id = survivor.clone();
            self.upsert_mapping(mapping);
        }

        let survivor_name = fold(&self.concepts[survivor].name);
        let mut terms: Vec<String> = self
            .synonyms
            .iter()
            .filter(|s| &s.concept_id == absorbed)
            .map(|s| s.term.clone())
            .collect();
        terms.push(absorbed_name);
        self.synonyms.retain(|s| &s.concept_id != absorbed);
        for term in terms {
            let key = fold(&term);
            let duplicate = key == survivor_name
                || self
                    .synonyms
                    .iter()
                    .any(|s| &s.concept_id == survivor && fold(&s.term) == key);
            if !duplicate {
                self.synonyms.push(Synonym {
                    concept_id: survivor.clone(),
                    term,
                });
            }
        }

        if let Some(positions) = self.positions.as_mut() {
            positions.remove(absorbed.as_str());
        }
        self.concepts.shift_remove(absorbed);
        self.bump();
        Ok(survivor.clone())
    }

    // ---- lookups ----

    pub(crate) fn require_dimension(&self, id: &DimensionId) -> Result<&Dimension> {
        self.dimensions
            .get(id)
            .ok_or_else(|| Error::not_found("dimension", id))
    }

    pub(crate) fn require_concept(&self, id: &ConceptId) -> Result<&Concept> {
        self.concepts
            .get(id)
            .ok_or_else(|| Error::not_found("concept", id))
    }

    pub(crate) fn require_relation(&self, id: &RelationId) -> Result<&Relation> {
        self.relations
            .get(id)
            .ok_or_else(|| Error::not_found("relation", id))
    }

    pub(crate) fn require_paper(&self, id: &PaperId) -> Result<&Paper> {
        self.papers
            .get(id)
            .ok_or_else(|| Error::not_found("paper", id))
    }

    /// Checks every structural invariant. Used when loading documents.
    pub fn validate(&self) -> Result<()> {
        clean_name("taxonomy name", &self.name)?;
        let mut dim_names = HashSet::new();
        for dim in self.dimensions.values() {
            clean_name("dimension name", &dim.name)?;
            if !dim_names.insert(fold(&dim.name)) {
                return Err(Error::DuplicateName {
                    kind: "dimension",
                    name: dim.name.clone(),
                });
            }
        }
        let mut concept_names = HashSet::new();
        for concept in self.concepts.values() {
            clean_name("concept name", &concept.name)?;
            self.require_dimension(&concept.dimension_id)?;
            if !concept_names.insert((concept.dimension_id.clone(), fold(&concept.name))) {
                return Err(Error::DuplicateName {
                    kind: "concept",
                    name: concept.name.clone(),
                });
            }
        }
        let mut pairs = HashSet::new();
        for relation in self.relations.values() {
            if relation.source_id == relation.target_id {
                return Err(Error::SelfLoop);
            }
            self.require_concept(&relation.source_id)?;
            self.require_concept(&relation.target_id)?;
            if !pairs.insert((&relation.source_id, &relation.target_id)) {
                return Err(Error::DuplicateRelation {
                    source_id: relation.source_id.to_string(),
                    target: relation.target_id.to_string(),
                });
            }
        }
        let edges: Vec<(&ConceptId, &ConceptId)> = self
            .relations
            .values()
            .filter(|r| r.rel_type.is_hierarchical())
            .map(|r| (&r.source_id, &r.target_id))
            .collect();
        if let Some(cycle) = find_cycle(&edges) {
            return Err(Error::HierarchyCycle {
                path: cycle.iter().map(|c| self.display_name(c)).collect(),
            });
        }
        let mut synonym_keys = HashSet::new();
        for synonym in &self.synonyms {
            clean_name("synonym", &synonym.term)?;
            self.require_concept(&synonym.concept_id)?;
            if !synonym_keys.insert((&synonym.concept_id, fold(&synonym.term))) {
                return Err(Error::DuplicateName {
                    kind: "synonym",
                    name: synonym.term.clone(),
                });
            }
        }
        let mut dois = HashSet::new();
        for paper in self.papers.values() {
            if let Some(doi) = paper.doi.as_deref() {
                if !dois.insert(fold(doi)) {
                    return Err(Error::DuplicateName {
                        kind: "doi",
                        name: doi.to_owned(),
                    });
                }
            }
        }
        for mapping in self.mappings.values() {
            self.require_paper(&mapping.paper_id)?;
            self.require_concept(&mapping.concept_id)?;
        }
        if let Some(positions) = &self.positions {
            let unknown: Vec<String> = positions
                .keys()
                .filter(|key| {
                    !self.concepts.contains_key(&ConceptId::from(key.as_str()))
                        && !self.dimensions.contains_key(&DimensionId::from(key.as_str()))
                })
                .cloned()
                .collect();
            if !unknown.is_empty() {
                return Err(Error::StaleLayout { ids: unknown });
            }
        }
        Ok(())
    }
}

/// Finds a directed cycle in an edge list, returning its nodes in order.
pub(crate) fn find_cycle<'a>(edges: &[(&'a ConceptId, &'a ConceptId)]) -> Option<Vec<ConceptId>> {
    let mut adjacency: IndexMap<&ConceptId, Vec<&ConceptId>> = IndexMap::new();
    for (from, to) in edges {
        adjacency.entry(*from).or_default().push(*to);
        adjacency.entry(*to).or_default();
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut marks: HashMap<&ConceptId, Mark> = adjacency.keys().map(|k| (*k, Mark::New)).collect();
    for start in adjacency.keys() {
        if marks[start] != Mark::New {
            continue;
        }
        // Iterative DFS keeping the active path on a stack.
        let mut stack: Vec<(&ConceptId, usize)> = vec![(start, 0)];
        marks.insert(start, Mark::Active);
        while let Some((node, next)) = stack.last_mut() {
            let successors = &adjacency[*node];
            if *next < successors.len() {
                let succ = successors[*next];
                *next += 1;
                match marks[succ] {
                    Mark::New => {
                        marks.insert(succ, Mark::Active);
                        stack.push((succ, 0));
                    }
                    Mark::Active => {
                        let begin = stack.iter().position(|(n, _)| *n == succ).unwrap_or(0);
                        return Some(stack[begin..].iter().map(|(n, _)| (*n).clone()).collect());
                    }
                    Mark::Done => {}
                }
            } else {
                marks.insert(*node, Mark::Done);
                stack.pop();
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (Taxonomy, DimensionId) {
        let tax = Taxonomy::new("demo").unwrap();
        let dim = tax.dimensions().next().unwrap().id.clone();
        (tax, dim)
    }

    fn names(tax: &Taxonomy, ids: &[&str]) -> Vec<ConceptId> {
        let dim = tax.dimensions().next().unwrap().id.clone();
        ids.iter()
            .map(|n| tax.concept_by_name(&dim, n).unwrap().id.clone())
            .collect()
    }

    #[test]
    fn create_taxonomy_has_default_dimension() {
        let tax = Taxonomy::new("demo").unwrap();
        assert_eq!(tax.version(), 1);
        let dims: Vec<_> = tax.dimensions().map(|d| d.name.as_str()).collect();
        assert_eq!(dims, ["default"]);
        assert!(matches!(
            Taxonomy::new("  "),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn concept_names_are_unique_per_dimension_case_insensitively() {
        let (mut tax, default) = fixture();
        let defense = tax.add_dimension("Defense", "").unwrap();
        let other = tax.add_dimension("Attack", "").unwrap();
        assert_eq!(tax.version(), 3);
        tax.add_concept(&defense, "Hashing", ConceptKind::Node).unwrap();
        assert_eq!(tax.version(), 4);
        let err = tax
            .add_concept(&defense, "hashing", ConceptKind::Node)
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateName { .. }));
        assert_eq!(tax.version(), 4);
        tax.add_concept(&other, "Hashing", ConceptKind::Major).unwrap();
        tax.add_concept(&default, "HASHING", ConceptKind::Node).unwrap();
        assert_eq!(tax.concepts().len(), 3);
        assert!(tax
            .add_concept(&DimensionId::from("nope"), "x", ConceptKind::Node)
            .is_err());
    }

    #[test]
    fn relation_rules() {
        let (mut tax, dim) = fixture();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        assert!(matches!(
            tax.add_relation(&a, &a, RelationType::Association, ""),
            Err(Error::SelfLoop)
        ));
        tax.add_relation(&a, &b, RelationType::Inheritance, "").unwrap();
        assert!(matches!(
            tax.add_relation(&a, &b, RelationType::Association, ""),
            Err(Error::DuplicateRelation { .. })
        ));
        match tax.add_relation(&b, &a, RelationType::Composition, "") {
            Err(Error::HierarchyCycle { path }) => assert_eq!(path, ["A", "B"]),
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn associations_are_exempt_from_acyclicity() {
        let (mut tax, dim) = fixture();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        tax.add_relation(&a, &b, RelationType::Association, "").unwrap();
        tax.add_relation(&b, &a, RelationType::Association, "").unwrap();
        // Promoting one of them to inheritance is still fine, the other is a peer link.
        let ab = tax.relation_between(&a, &b).unwrap().id.clone();
        tax.set_relation_type(&ab, RelationType::Inheritance).unwrap();
        let ba = tax.relation_between(&b, &a).unwrap().id.clone();
        assert!(matches!(
            tax.set_relation_type(&ba, RelationType::Aggregation),
            Err(Error::HierarchyCycle { .. })
        ));
        assert_eq!(tax.relation(&ba).unwrap().rel_type, RelationType::Association);
    }

    #[test]
    fn longer_cycles_report_the_full_path() {
        let (mut tax, dim) = fixture();
        for n in ["A", "B", "C"] {
            tax.add_concept(&dim, n, ConceptKind::Node).unwrap();
        }
        let ids = names(&tax, &["A", "B", "C"]);
        tax.add_relation(&ids[0], &ids[1], RelationType::Inheritance, "").unwrap();
        tax.add_relation(&ids[1], &ids[2], RelationType::Inheritance, "").unwrap();
        match tax.add_relation(&ids[2], &ids[0], RelationType::Inheritance, "") {
            Err(Error::HierarchyCycle { path }) => assert_eq!(path, ["A", "B", "C"]),
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn remove_middle_of_chain_makes_child_a_root() {
        let (mut tax, dim) = fixture();
        for n in ["A", "B", "C"] {
            tax.add_concept(&dim, n, ConceptKind::Node).unwrap();
        }
        let ids = names(&tax, &["A", "B", "C"]);
        tax.add_relation(&ids[0], &ids[1], RelationType::Inheritance, "").unwrap();
        tax.add_relation(&ids[1], &ids[2], RelationType::Inheritance, "").unwrap();
        let v = tax.version();
        tax.remove_concept(&ids[1]).unwrap();
        assert_eq!(tax.version(), v + 1);
        assert_eq!(tax.relations().len(), 0);
        let roots: Vec<_> = tax.hierarchy().dimensions[0]
            .roots
            .iter()
            .map(|n| n.concept_id.clone())
            .collect();
        assert_eq!(roots, vec![ids[0].clone(), ids[2].clone()]);
        assert!(tax.remove_concept(&ids[1]).is_err());
    }

    #[test]
    fn rename_and_annotate() {
        let (mut tax, dim) = fixture();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        assert!(matches!(
            tax.rename_concept(&a, "b"),
            Err(Error::DuplicateName { .. })
        ));
        tax.rename_concept(&a, "a").unwrap();
        let r = tax.add_relation(&a, &b, RelationType::Association, "").unwrap();
        tax.annotate_relation(&r, "uses at runtime").unwrap();
        assert_eq!(tax.relation(&r).unwrap().annotation, "uses at runtime");
    }

    #[test]
    fn layout_is_replaced_wholesale_and_validated() {
        let (mut tax, dim) = fixture();
        let a = tax.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = tax.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        let mut first = LayoutSnapshot::new();
        first.insert(a.to_string(), super::super::Position { x: 10.0, y: 20.0 });
        first.insert(b.to_string(), super::super::Position { x: 1.0, y: 2.0 });
        tax.save_layout(first).unwrap();
        assert_eq!(tax.positions().unwrap()[a.as_str()].x, 10.0);

        let mut second = LayoutSnapshot::new();
        second.insert(a.to_string(), super::super::Position { x: 5.0, y: 5.0 });
        tax.save_layout(second).unwrap();
        assert!(tax.positions().unwrap().get(b.as_str()).is_none());

        tax.remove_concept(&b).unwrap();
        let v = tax.version();
        let mut stale = LayoutSnapshot::new();
        stale.insert(b.to_string(), super::super::Position { x: 0.0, y: 0.0 });
        match tax.save_layout(stale) {
            Err(Error::StaleLayout { ids }) => assert_eq!(ids, vec![b.to_string()]),
            other => panic!("{other:?}"),
        }
        assert_eq!(tax.version(), v);
        assert_eq!(tax.positions().unwrap()[a.as_str()].x, 5.0);
    }

    #[test]
    fn find_cycle_reports_none_for_dag() {
        let a = ConceptId::from("a");
        let b = ConceptId::from("b");
        let c = ConceptId::from("c");
        assert!(find_cycle(&[(&a, &b), (&b, &c), (&a, &c)]).is_none());
        assert_eq!(
            find_cycle(&[(&a, &b), (&b, &c), (&c, &b)]).unwrap(),
            vec![b.clone(), c.clone()]
        );
    }
}
