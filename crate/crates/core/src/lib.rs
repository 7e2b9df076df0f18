//! Core engine for building, screening and analysing research taxonomies.
//!
//! The crate is organised by subsystem:
//!
//! * [`taxonomy`]: dimensions, concepts, typed relations, mappings, fork/merge
//!   and hierarchy derivation.
//! * [`review`]: paper intake, include/exclude voting, tagging and
//!   tag-to-concept import.
//! * [`matcher`]: text normalisation, string similarity and keyword-based
//!   paper-to-concept suggestion.
//! * [`analysis`]: correlation matrices, 3D surfaces, coverage and
//!   nested-circle layouts.
//! * [`store`]: document storage, the versioned taxonomy workspace and the
//!   view cache.

pub mod analysis;
pub mod error;
pub mod ids;
pub mod matcher;
pub mod review;
pub mod store;
pub mod taxonomy;

pub use error::{Error, Result};
pub use ids::{ConceptId, DimensionId, PaperId, RelationId, TaxonomyId};
pub use taxonomy::{
    Concept, ConceptKind, Dimension, Hierarchy, LayoutSnapshot, Mapping, MergeReport, Position,
    Provenance, Relation, RelationType, Synonym, Taxonomy,
};
