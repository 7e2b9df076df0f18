//! Canonical JSON interchange document.
//!
//! ```json
//! {
//!   "taxonomy":   { "id", "name", "version", "public", "parent_id" },
//!   "dimensions": [ { "id", "name", "description" } ],
//!   "concepts":   [ { "id", "dimension_id", "name", "kind", "notes" } ],
//!   "relations":  [ { "id", "source_id", "target_id", "rel_type", "annotation" } ],
//!   "synonyms":   [ { "concept_id", "term" } ],
//!   "papers":     [ { "id", "title", "abstract", "authors", "year", "doi",
//!                     "citation_count", "body_text", "tags", "votes" } ],
//!   "mappings":   [ { "paper_id", "concept_id", "provenance", "occurrence_count" } ],
//!   "positions":  { "<concept or dimension id>": { "x", "y" } } | null
//! }
//! ```
//!
//! Arrays keep insertion order and field order is fixed, so export of an
//! imported document reproduces the input bytes.

use serde::{Deserialize, Serialize};

use super::{Concept, Dimension, LayoutSnapshot, Mapping, Relation, Synonym, Taxonomy};
use crate::error::{Error, Result};
use crate::ids::TaxonomyId;
use crate::review::Paper;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyHeader {
    pub id: TaxonomyId,
    pub name: String,
    pub version: u64,
    #[serde(default)]
    pub public: bool,
    #[serde(default)]
    pub parent_id: Option<TaxonomyId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyDocument {
    pub taxonomy: TaxonomyHeader,
    #[serde(default)]
    pub dimensions: Vec<Dimension>,
    #[serde(default)]
    pub concepts: Vec<Concept>,
    #[serde(default)]
    pub relations: Vec<Relation>,
    #[serde(default)]
    pub synonyms: Vec<Synonym>,
    #[serde(default)]
    pub papers: Vec<Paper>,
    #[serde(default)]
    pub mappings: Vec<Mapping>,
    #[serde(default)]
    pub positions: Option<LayoutSnapshot>,
}

impl Taxonomy {
    pub fn header(&self) -> TaxonomyHeader {
        TaxonomyHeader {
            id: self.id.clone(),
            name: self.name.clone(),
            version: self.version,
            public: self.public,
            parent_id: self.parent_id.clone(),
        }
    }

    pub fn to_document(&self) -> TaxonomyDocument {
        TaxonomyDocument {
            taxonomy: self.header(),
            dimensions: self.dimensions.values().cloned().collect(),
            concepts: self.concepts.values().cloned().collect(),
            relations: self.relations.values().cloned().collect(),
            synonyms: self.synonyms.clone(),
            papers: self.papers.values().cloned().collect(),
            mappings: self.mappings.values().cloned().collect(),
            positions: self.positions.clone(),
        }
    }

    /// Rebuilds a taxonomy from a document, checking every invariant.
    pub fn from_document(doc: TaxonomyDocument) -> Result<Self> {
        fn unique<K: std::hash::Hash + Eq, V>(
            kind: &'static str,
            items: impl IntoIterator<Item = (K, V)>,
            name: impl Fn(&K) -> String,
        ) -> Result<indexmap::IndexMap<K, V>> {
            let mut map = indexmap::IndexMap::new();
            for (k, v) in items {
                if map.contains_key(&k) {
                    return Err(Error::DuplicateName {
                        kind,
                        name: name(&k),
                    });
                }
                map.insert(k, v);
            }
            Ok(map)
        }

        let tax = Taxonomy {
            id: doc.taxonomy.id,
            name: doc.taxonomy.name,
            version: doc.taxonomy.version,
            public: doc.taxonomy.public,
            parent_id: doc.taxonomy.parent_id,
            dimensions: unique(
                "dimension id",
                doc.dimensions.into_iter().map(|d| (d.id.clone(), d)),
                |k| k.to_string(),
            )?,
            concepts: unique(
                "concept id",
                doc.concepts.into_iter().map(|c| (c.id.clone(), c)),
                |k| k.to_string(),
            )?,
            relations: unique(
                "relation id",
                doc.relations.into_iter().map(|r| (r.id.clone(), r)),
                |k| k.to_string(),
            )?,
            synonyms: doc.synonyms,
            papers: unique(
                "paper id",
                doc.papers.into_iter().map(|p| (p.id.clone(), p)),
                |k| k.to_string(),
            )?,
            mappings: unique(
                "mapping",
                doc.mappings
                    .into_iter()
                    .map(|m| ((m.paper_id.clone(), m.concept_id.clone()), m)),
                |(p, c)| format!("{p}/{c}"),
            )?,
            positions: doc.positions,
        };
        if tax.version == 0 {
            return Err(Error::validation("version", "must be at least 1"));
        }
        tax.validate()?;
        Ok(tax)
    }

    /// Pretty-printed canonical JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("taxonomy documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TaxonomyDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_document(doc)
    }
}
