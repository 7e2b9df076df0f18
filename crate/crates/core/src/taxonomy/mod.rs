//! Taxonomy domain model and mutation engine.
//!
//! A [`Taxonomy`] is a versioned container of dimensions, concepts, typed
//! relations, synonyms, papers and paper-to-concept mappings. Every mutating
//! method validates first and only then applies its change, so a failed call
//! leaves the taxonomy untouched. The version counter increases by exactly one
//! for each call that changes state.

mod document;
mod fork;
mod hierarchy;
mod model;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ids::{ConceptId, DimensionId, PaperId, RelationId};
use crate::matcher::MatchMethod;

pub use document::{TaxonomyDocument, TaxonomyHeader};
pub use fork::{MergeConflict, MergeReport};
pub use hierarchy::{DimensionTree, Hierarchy, HierarchyNode};
pub use model::{MapOutcome, Taxonomy, DEFAULT_DIMENSION};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub id: DimensionId,
    pub name: String,
    #[serde(default)]
    pub description: String,
}

/// Display emphasis of a concept in the editors. Carries no other semantics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptKind {
    Major,
    #[default]
    Node,
}

impl FromStr for ConceptKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "major" => Ok(ConceptKind::Major),
            "node" => Ok(ConceptKind::Node),
            _ => Err(Error::UnknownVariant {
                kind: "concept kind",
                value: s.to_owned(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub dimension_id: DimensionId,
    pub name: String,
    #[serde(default)]
    pub kind: ConceptKind,
    #[serde(default)]
    pub notes: String,
}

/// UML relation types. Inheritance, composition and aggregation edges are
/// read child to parent and form the concept hierarchy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationType {
    #[default]
    Unspecified,
    Association,
    Inheritance,
    Composition,
    Aggregation,
}

impl RelationType {
    pub const ALL: [RelationType; 5] = [
        RelationType::Unspecified,
        RelationType::Association,
        RelationType::Inheritance,
        RelationType::Composition,
        RelationType::Aggregation,
    ];

    /// Whether edges of this type take part in the parent-child hierarchy.
    pub fn is_hierarchical(self) -> bool {
        matches!(
            self,
            RelationType::Inheritance | RelationType::Composition | RelationType::Aggregation
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::Unspecified => "unspecified",
            RelationType::Association => "association",
            RelationType::Inheritance => "inheritance",
            RelationType::Composition => "composition",
            RelationType::Aggregation => "aggregation",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim().to_ascii_lowercase();
        RelationType::ALL
            .into_iter()
            .find(|t| t.as_str() == wanted)
            .ok_or_else(|| Error::UnknownVariant {
                kind: "relation type",
                value: s.to_owned(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub id: RelationId,
    pub source_id: ConceptId,
    pub target_id: ConceptId,
    #[serde(default)]
    pub rel_type: RelationType,
    #[serde(default)]
    pub annotation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synonym {
    pub concept_id: ConceptId,
    pub term: String,
}

/// Where a paper-to-concept mapping came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "method", rename_all = "lowercase")]
pub enum Provenance {
    Manual,
    Auto(MatchMethod),
}

impl Provenance {
    pub fn is_manual(self) -> bool {
        matches!(self, Provenance::Manual)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mapping {
    pub paper_id: PaperId,
    pub concept_id: ConceptId,
    pub provenance: Provenance,
    #[serde(default)]
    pub occurrence_count: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

/// Saved editor coordinates keyed by concept or dimension id.
pub type LayoutSnapshot = BTreeMap<String, Position>;

/// Case-folded comparison key for names and terms.
pub(crate) fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

pub(crate) fn clean_name(field: &'static str, name: &str) -> Result<String, Error> {
    let trimmed = name.trim();
    if trimmed.is_empty() {
        return Err(Error::validation(field, "must not be empty"));
    }
    Ok(trimmed.to_owned())
}
