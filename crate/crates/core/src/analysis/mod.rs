//! Read-only analyses over a taxonomy snapshot.
//!
//! Counts are aggregated over subtrees: `papers*(c)` is the set of papers
//! mapped to `c` or to any descendant of `c` in the derived hierarchy.

mod bench;
mod circles;
mod matrix;
mod surface;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::ids::{ConceptId, DimensionId, PaperId};
use crate::review::Paper;
use crate::taxonomy::{Hierarchy, Taxonomy};

pub use bench::{benchmark_taxonomy, random_matrix_benchmark, BenchConfig, BenchReport, BenchRow};
pub use circles::{cropcircles_layout, Circle, CircleLayout, DimensionGroup};
pub use matrix::{build_matrix, CorrelationMatrix};
pub use surface::{build_surface, SurfacePoint, SurfaceProperty};

/// Restricts which papers are counted and which concepts appear on the axis.
/// The default filter keeps everything.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Filter {
    /// Keep only concepts of these dimensions.
    pub dimensions: Option<BTreeSet<DimensionId>>,
    /// Keep only concepts inside the subtrees rooted here.
    pub subtree_roots: Option<BTreeSet<ConceptId>>,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub min_votes: Option<usize>,
    pub tag: Option<String>,
    /// Cells below this value are reported as zero.
    pub min_cell: u64,
}

impl Filter {
    pub fn is_identity(&self) -> bool {
        *self == Filter::default()
    }

    /// Stable key identifying this filter in caches.
    pub fn fingerprint(&self) -> String {
        serde_json::to_string(self).expect("filter serialises")
    }

    pub fn admits_paper(&self, paper: &Paper) -> bool {
        if self.year_min.is_some() || self.year_max.is_some() {
            let Some(year) = paper.year else {
                return false;
            };
            if self.year_min.is_some_and(|min| year < min) || self.year_max.is_some_and(|max| year > max) {
                return false;
            }
        }
        if self.min_votes.is_some_and(|min| paper.positive_votes() < min) {
            return false;
        }
        match &self.tag {
            Some(tag) => paper.has_tag(tag),
            None => true,
        }
    }

    /// Concepts kept on the axis, in depth-first hierarchy order.
    pub(crate) fn axis(&self, tax: &Taxonomy, hierarchy: &Hierarchy) -> Vec<(ConceptId, usize)> {
        let in_subtree: Option<BTreeSet<ConceptId>> = self.subtree_roots.as_ref().map(|roots| {
            roots
                .iter()
                .flat_map(|root| hierarchy.subtree(root))
                .collect()
        });
        hierarchy
            .preorder()
            .into_iter()
            .filter(|(node, _)| {
                let id = &node.concept_id;
                let dim_ok = self.dimensions.as_ref().is_none_or(|dims| {
                    tax.concept(id)
                        .is_some_and(|c| dims.contains(&c.dimension_id))
                });
                dim_ok && in_subtree.as_ref().is_none_or(|set| set.contains(id))
            })
            .map(|(node, depth)| (node.concept_id.clone(), depth))
            .collect()
    }
}

/// For every paper passing `filter`, the axis positions whose `papers*`
/// contain it. Each list is sorted and free of duplicates.
pub(crate) fn paper_memberships<'t>(
    tax: &'t Taxonomy,
    hierarchy: &Hierarchy,
    axis: &[ConceptId],
    filter: &Filter,
) -> Vec<(&'t Paper, Vec<usize>)> {
    let position: HashMap<&ConceptId, usize> = axis.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut by_paper: HashMap<&PaperId, Vec<usize>> = HashMap::new();
    for mapping in tax.mappings() {
        let slots = by_paper.entry(&mapping.paper_id).or_default();
        for ancestor in hierarchy.ancestors_inclusive(&mapping.concept_id) {
            if let Some(&i) = position.get(ancestor) {
                slots.push(i);
            }
        }
    }
    tax.papers()
        .filter(|p| filter.admits_paper(p))
        .filter_map(|p| {
            let mut slots = by_paper.remove(&p.id)?;
            slots.sort_unstable();
            slots.dedup();
            (!slots.is_empty()).then_some((p, slots))
        })
        .collect()
}

/// Papers mapped to `concept` or any of its descendants.
pub fn effective_papers(tax: &Taxonomy, concept: &ConceptId) -> crate::Result<BTreeSet<PaperId>> {
    tax.require_concept(concept)?;
    let hierarchy = tax.hierarchy();
    let subtree: BTreeSet<ConceptId> = hierarchy.subtree(concept).into_iter().collect();
    Ok(tax
        .mappings()
        .filter(|m| subtree.contains(&m.concept_id))
        .map(|m| m.paper_id.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageEntry {
    pub concept_id: ConceptId,
    pub name: String,
    pub paper_count: u64,
    pub depth: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    /// One entry per concept in depth-first hierarchy order.
    pub entries: Vec<CoverageEntry>,
    /// Concepts without any paper in their subtree.
    pub gaps: Vec<ConceptId>,
}

pub fn coverage_report(tax: &Taxonomy) -> CoverageReport {
    let matrix = build_matrix(tax, &Filter::default());
    let mut report = CoverageReport::default();
    for (i, concept_id) in matrix.axis.iter().enumerate() {
        let paper_count = matrix.cells[i][i];
        if paper_count == 0 {
            report.gaps.push(concept_id.clone());
        }
        report.entries.push(CoverageEntry {
            concept_id: concept_id.clone(),
            name: matrix.labels[i].clone(),
            paper_count,
            depth: matrix.depths[i],
        });
    }
    report
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::review::PaperRecord;
    use crate::taxonomy::{ConceptKind, Provenance, RelationType, Taxonomy};
    use crate::{ConceptId, PaperId};

    pub fn leaf(tax: &mut Taxonomy, name: &str) -> ConceptId {
        let dim = tax.dimensions().next().unwrap().id.clone();
        tax.add_concept(&dim, name, ConceptKind::Node).unwrap()
    }

    pub fn child(tax: &mut Taxonomy, parent: &ConceptId, name: &str) -> ConceptId {
        let c = leaf(tax, name);
        tax.add_relation(&c, parent, RelationType::Inheritance, "").unwrap();
        c
    }

    pub fn papers(tax: &mut Taxonomy, ids: &[(&str, u64)]) {
        let records = ids
            .iter()
            .map(|(id, citations)| PaperRecord {
                id: Some((*id).into()),
                citation_count: *citations,
                ..PaperRecord::titled(&format!("Paper {id}"))
            })
            .collect();
        let outcome = tax.import_papers(records);
        assert!(outcome.rejected.is_empty());
    }

    pub fn map(tax: &mut Taxonomy, paper: &str, concept: &ConceptId) {
        tax.map_paper(&PaperId::from(paper), concept, Provenance::Manual, 0)
            .unwrap();
    }
}
