//! Forking a taxonomy and folding a fork's additions back into its parent.
//!
//! Forks regenerate every dimension, concept and relation id, so merging
//! matches elements by dimension name and concept name (case-insensitive).
//! Papers keep their ids across a fork. The merge is additive: elements
//! deleted in the fork are not deleted in the parent, and edits that
//! contradict the parent are reported as conflicts and left unapplied.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use serde::Serialize;

use super::{fold, Concept, ConceptKind, Dimension, Mapping, Relation, RelationType, Synonym, Taxonomy};
use crate::error::{Error, Result};
use crate::ids::{ConceptId, DimensionId, PaperId, RelationId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MergeConflict {
    ConceptKind {
        dimension: String,
        concept: String,
        parent: ConceptKind,
        fork: ConceptKind,
    },
    RelationType {
        source: String,
        target: String,
        parent: RelationType,
        fork: RelationType,
    },
    HierarchyCycle {
        source: String,
        target: String,
    },
    DuplicateDoi {
        paper_id: PaperId,
        doi: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MergeReport {
    pub added_dimensions: Vec<String>,
    /// `(dimension, concept)` names.
    pub added_concepts: Vec<(String, String)>,
    /// `(source, target)` concept names.
    pub added_relations: Vec<(String, String)>,
    pub added_synonyms: Vec<(String, String)>,
    pub added_papers: Vec<PaperId>,
    /// `(paper, concept name)`.
    pub added_mappings: Vec<(PaperId, String)>,
    pub conflicts: Vec<MergeConflict>,
}

impl MergeReport {
    pub fn is_empty(&self) -> bool {
        self.added_dimensions.is_empty()
            && self.added_concepts.is_empty()
            && self.added_relations.is_empty()
            && self.added_synonyms.is_empty()
            && self.added_papers.is_empty()
            && self.added_mappings.is_empty()
            && self.conflicts.is_empty()
    }
}

impl Taxonomy {
    /// Deep copy with fresh ids, named `"<name> (fork)"`, at version 1.
    pub fn fork(&self) -> Taxonomy {
        let dim_ids: HashMap<&DimensionId, DimensionId> = self
            .dimensions
            .keys()
            .map(|id| (id, DimensionId::generate()))
            .collect();
        let concept_ids: HashMap<&ConceptId, ConceptId> = self
            .concepts
            .keys()
            .map(|id| (id, ConceptId::generate()))
            .collect();

        let dimensions = self
            .dimensions
            .values()
            .map(|d| {
                let id = dim_ids[&d.id].clone();
                (id.clone(), Dimension { id, ..d.clone() })
            })
            .collect();
        let concepts = self
            .concepts
            .values()
            .map(|c| {
                let id = concept_ids[&c.id].clone();
                let concept = Concept {
                    id: id.clone(),
                    dimension_id: dim_ids[&c.dimension_id].clone(),
                    ..c.clone()
                };
                (id, concept)
            })
            .collect();
        let relations = self
            .relations
            .values()
            .map(|r| {
                let relation = Relation {
                    id: RelationId::generate(),
                    source_id: concept_ids[&r.source_id].clone(),
                    target_id: concept_ids[&r.target_id].clone(),
                    ..r.clone()
                };
                (relation.id.clone(), relation)
            })
            .collect();
        let synonyms = self
            .synonyms
            .iter()
            .map(|s| Synonym {
                concept_id: concept_ids[&s.concept_id].clone(),
                term: s.term.clone(),
            })
            .collect();
        let mappings = self
            .mappings
            .values()
            .map(|m| {
                let concept_id = concept_ids[&m.concept_id].clone();
                (
                    (m.paper_id.clone(), concept_id.clone()),
                    Mapping {
                        concept_id,
                        ..m.clone()
                    },
                )
            })
            .collect();
        let positions = self.positions.as_ref().map(|snapshot| {
            snapshot
                .iter()
                .filter_map(|(key, pos)| {
                    let concept = ConceptId::from(key.as_str());
                    let dimension = DimensionId::from(key.as_str());
                    concept_ids
                        .get(&concept)
                        .map(|c| c.to_string())
                        .or_else(|| dim_ids.get(&dimension).map(|d| d.to_string()))
                        .map(|k| (k, *pos))
                })
                .collect()
        });

        Taxonomy {
            id: crate::ids::TaxonomyId::generate(),
            name: format!("{} (fork)", self.name),
            version: 1,
            public: self.public,
            parent_id: Some(self.id.clone()),
            dimensions,
            concepts,
            relations,
            synonyms,
            papers: self.papers.clone(),
            mappings,
            positions,
        }
    }

    /// Adds everything present in `fork` but missing here. The version is
    /// bumped exactly once, even when nothing was added.
    pub fn merge_fork(&mut self, fork: &Taxonomy) -> Result<MergeReport> {
        if fork.parent_id.as_ref() != Some(&self.id) {
            return Err(Error::NotDescendant {
                parent: self.id.to_string(),
                fork: fork.id.to_string(),
            });
        }
        let mut report = MergeReport::default();

        // Dimensions by name.
        let mut dim_map: HashMap<&DimensionId, DimensionId> = HashMap::new();
        for dim in fork.dimensions.values() {
            let target = match self.dimension_by_name(&dim.name) {
                Some(existing) => existing.id.clone(),
                None => {
                    let id = DimensionId::generate();
                    self.dimensions.insert(
                        id.clone(),
                        Dimension {
                            id: id.clone(),
                            ..dim.clone()
                        },
                    );
                    report.added_dimensions.push(dim.name.clone());
                    id
                }
            };
            dim_map.insert(&dim.id, target);
        }

        // Concepts by (dimension name, concept name).
        let mut concept_map: HashMap<&ConceptId, ConceptId> = HashMap::new();
        for concept in fork.concepts.values() {
            let dimension = dim_map[&concept.dimension_id].clone();
            let dim_name = self.dimensions[&dimension].name.clone();
            let target = match self.concept_by_name(&dimension, &concept.name) {
                Some(existing) => {
                    if existing.kind != concept.kind {
                        report.conflicts.push(MergeConflict::ConceptKind {
                            dimension: dim_name,
                            concept: existing.name.clone(),
                            parent: existing.kind,
                            fork: concept.kind,
                        });
                    }
                    existing.id.clone()
                }
                None => {
                    let id = ConceptId::generate();
                    self.concepts.insert(
                        id.clone(),
                        Concept {
                            id: id.clone(),
                            dimension_id: dimension,
                            ..concept.clone()
                        },
                    );
                    report.added_concepts.push((dim_name, concept.name.clone()));
                    id
                }
            };
            concept_map.insert(&concept.id, target);
        }

        for relation in fork.relations.values() {
            let source = concept_map[&relation.source_id].clone();
            let target = concept_map[&relation.target_id].clone();
            let names = (self.display_name(&source), self.display_name(&target));
            if let Some(existing) = self.relation_between(&source, &target) {
                if existing.rel_type != relation.rel_type {
                    report.conflicts.push(MergeConflict::RelationType {
                        source: names.0,
                        target: names.1,
                        parent: existing.rel_type,
                        fork: relation.rel_type,
                    });
                }
                continue;
            }
            if relation.rel_type.is_hierarchical()
                && self.would_close_cycle(&source, &target).is_err()
            {
                report.conflicts.push(MergeConflict::HierarchyCycle {
                    source: names.0,
                    target: names.1,
                });
                continue;
            }
            let id = RelationId::generate();
            self.relations.insert(
                id.clone(),
                Relation {
                    id,
                    source_id: source,
                    target_id: target,
                    ..relation.clone()
                },
            );
            report.added_relations.push(names);
        }

        for synonym in &fork.synonyms {
            let concept = concept_map[&synonym.concept_id].clone();
            let key = fold(&synonym.term);
            let exists = self
                .synonyms
                .iter()
                .any(|s| s.concept_id == concept && fold(&s.term) == key);
            if !exists {
                report
                    .added_synonyms
                    .push((self.display_name(&concept), synonym.term.clone()));
                self.synonyms.push(Synonym {
                    concept_id: concept,
                    term: synonym.term.clone(),
                });
            }
        }

        let known_dois: HashSet<String> = self
            .papers
            .values()
            .filter_map(|p| p.doi.as_deref().map(fold))
            .collect();
        let mut skipped_papers = HashSet::new();
        for paper in fork.papers.values() {
            if self.papers.contains_key(&paper.id) {
                continue;
            }
            if let Some(doi) = paper.doi.as_deref() {
                if known_dois.contains(&fold(doi)) {
                    report.conflicts.push(MergeConflict::DuplicateDoi {
                        paper_id: paper.id.clone(),
                        doi: doi.to_owned(),
                    });
                    skipped_papers.insert(&paper.id);
                    continue;
                }
            }
            self.papers.insert(paper.id.clone(), paper.clone());
            report.added_papers.push(paper.id.clone());
        }

        let mut added: IndexMap<(PaperId, ConceptId), Mapping> = IndexMap::new();
        for mapping in fork.mappings.values() {
            if skipped_papers.contains(&mapping.paper_id) {
                continue;
            }
            let concept = concept_map[&mapping.concept_id].clone();
            let key = (mapping.paper_id.clone(), concept.clone());
            if self.mappings.contains_key(&key) || added.contains_key(&key) {
                continue;
            }
            report
                .added_mappings
                .push((mapping.paper_id.clone(), self.display_name(&concept)));
            added.insert(
                key,
                Mapping {
                    concept_id: concept,
                    ..mapping.clone()
                },
            );
        }
        self.mappings.extend(added);

        self.bump();
        Ok(report)
    }

    fn would_close_cycle(&self, source: &ConceptId, target: &ConceptId) -> Result<()> {
        let mut edges: Vec<(&ConceptId, &ConceptId)> = self
            .relations
            .values()
            .filter(|r| r.rel_type.is_hierarchical())
            .map(|r| (&r.source_id, &r.target_id))
            .collect();
        edges.push((source, target));
        match super::model::find_cycle(&edges) {
            Some(path) => Err(Error::HierarchyCycle {
                path: path.iter().map(|c| self.display_name(c)).collect(),
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::review::PaperRecord;

    fn sample() -> Taxonomy {
        let mut tax = Taxonomy::new("demo").unwrap();
        let dim = tax.dimensions().next().unwrap().id.clone();
        let names = ["Hashing", "Checksumming", "Attestation", "Guards", "Tamper proofing"];
        let ids: Vec<_> = names
            .iter()
            .map(|n| tax.add_concept(&dim, n, ConceptKind::Node).unwrap())
            .collect();
        tax.add_relation(&ids[1], &ids[0], RelationType::Inheritance, "").unwrap();
        tax.add_relation(&ids[2], &ids[3], RelationType::Association, "peer").unwrap();
        tax.import_papers(vec![PaperRecord::titled("P1")]);
        let p = tax.papers().next().unwrap().id.clone();
        tax.map_paper(&p, &ids[0], crate::taxonomy::Provenance::Manual, 0).unwrap();
        tax.add_synonym(&ids[0], "digest").unwrap();
        tax
    }

    #[test]
    fn fork_is_a_renamed_deep_copy() {
        let parent = sample();
        let fork = parent.fork();
        assert_eq!(fork.name(), "demo (fork)");
        assert_eq!(fork.version(), 1);
        assert_eq!(fork.parent_id(), Some(parent.id()));
        assert_eq!(fork.concepts().len(), 5);
        let parent_ids: HashSet<_> = parent.concepts().map(|c| c.id.clone()).collect();
        assert!(fork.concepts().all(|c| !parent_ids.contains(&c.id)));
        let names = |t: &Taxonomy| {
            let mut v: Vec<(String, String, RelationType)> = t
                .relations()
                .map(|r| (t.display_name(&r.source_id), t.display_name(&r.target_id), r.rel_type))
                .collect();
            v.sort();
            v
        };
        assert_eq!(names(&parent), names(&fork));
        fork.validate().unwrap();
    }

    #[test]
    fn fork_mutation_does_not_touch_parent() {
        let parent = sample();
        let before = parent.clone();
        let mut fork = parent.fork();
        let dim = fork.dimensions().next().unwrap().id.clone();
        fork.add_concept(&dim, "Obfuscation", ConceptKind::Node).unwrap();
        assert_eq!(parent, before);
    }

    #[test]
    fn empty_fork() {
        let parent = Taxonomy::new("empty").unwrap();
        let fork = parent.fork();
        assert_eq!(fork.concepts().len(), 0);
        assert_eq!(fork.dimensions().len(), 1);
    }

    #[test]
    fn merge_adds_new_concepts() {
        let mut parent = sample();
        let mut fork = parent.fork();
        let dim = fork.dimensions().next().unwrap().id.clone();
        fork.add_concept(&dim, "Obfuscation", ConceptKind::Major).unwrap();
        let v = parent.version();
        let report = parent.merge_fork(&fork).unwrap();
        assert_eq!(parent.version(), v + 1);
        assert_eq!(report.added_concepts, vec![("default".into(), "Obfuscation".into())]);
        let pdim = parent.dimensions().next().unwrap().id.clone();
        assert!(parent.concept_by_name(&pdim, "obfuscation").is_some());
        parent.validate().unwrap();
    }

    #[test]
    fn conflicting_relation_type_is_reported_not_applied() {
        let mut parent = Taxonomy::new("demo").unwrap();
        let dim = parent.dimensions().next().unwrap().id.clone();
        let a = parent.add_concept(&dim, "A", ConceptKind::Node).unwrap();
        let b = parent.add_concept(&dim, "B", ConceptKind::Node).unwrap();
        let r = parent.add_relation(&a, &b, RelationType::Association, "").unwrap();
        let mut fork = parent.fork();
        let fr = fork.relations().next().unwrap().id.clone();
        fork.set_relation_type(&fr, RelationType::Inheritance).unwrap();
        let report = parent.merge_fork(&fork).unwrap();
        assert_eq!(
            report.conflicts,
            vec![MergeConflict::RelationType {
                source: "A".into(),
                target: "B".into(),
                parent: RelationType::Association,
                fork: RelationType::Inheritance,
            }]
        );
        assert_eq!(parent.relation(&r).unwrap().rel_type, RelationType::Association);
    }

    #[test]
    fn identical_fork_merges_to_empty_report() {
        let mut parent = sample();
        let fork = parent.fork();
        let before = parent.clone();
        let report = parent.merge_fork(&fork).unwrap();
        assert!(report.is_empty(), "{report:?}");
        assert_eq!(parent.version(), before.version() + 1);
        let mut expected = before;
        expected.version += 1;
        assert_eq!(parent, expected);
    }

    #[test]
    fn merge_requires_descent() {
        let mut parent = sample();
        let stranger = Taxonomy::new("other").unwrap();
        assert!(matches!(
            parent.merge_fork(&stranger),
            Err(Error::NotDescendant { .. })
        ));
        let grandchild = parent.fork().fork();
        assert!(parent.merge_fork(&grandchild).is_err());
    }

    #[test]
    fn merge_brings_new_mappings_and_papers() {
        let mut parent = sample();
        let mut fork = parent.fork();
        let fdim = fork.dimensions().next().unwrap().id.clone();
        let guards = fork.concept_by_name(&fdim, "Guards").unwrap().id.clone();
        fork.import_papers(vec![PaperRecord::titled("P2")]);
        let p2 = fork.papers().find(|p| p.title == "P2").unwrap().id.clone();
        fork.map_paper(&p2, &guards, crate::taxonomy::Provenance::Manual, 0).unwrap();
        let report = parent.merge_fork(&fork).unwrap();
        assert_eq!(report.added_papers, vec![p2.clone()]);
        assert_eq!(report.added_mappings, vec![(p2.clone(), "Guards".to_string())]);
        parent.validate().unwrap();
    }
}
