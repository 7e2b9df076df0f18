use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    #[error("{kind} not found: {id}")]
    NotFound { kind: &'static str, id: String },

    #[error("a taxonomy named {0:?} already exists")]
    NameConflict(String),

    #[error("{kind} {name:?} already exists in this scope")]
    DuplicateName { kind: &'static str, name: String },

    #[error("a relation cannot connect a concept to itself")]
    SelfLoop,

    #[error("a relation from {source_id} to {target} already exists")]
    DuplicateRelation { source_id: String, target: String },

    #[error("hierarchy cycle: {}", path.join(" -> "))]
    HierarchyCycle { path: Vec<String> },

    #[error("version conflict: expected {expected}, current is {actual}")]
    VersionConflict { expected: u64, actual: u64 },

    #[error("taxonomy {fork} is not a fork of {parent}")]
    NotDescendant { parent: String, fork: String },

    #[error("layout references unknown elements: {}", ids.join(", "))]
    StaleLayout { ids: Vec<String> },

    #[error("conformity is undefined for an empty manual baseline")]
    UndefinedBaseline,

    #[error("unknown {kind} {value:?}")]
    UnknownVariant { kind: &'static str, value: String },

    #[error("matrix was built from version {matrix}, taxonomy is at {taxonomy}")]
    StaleMatrix { matrix: u64, taxonomy: u64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("view builder failed: {0}")]
    Builder(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Validation { .. } => "validation",
            Error::NotFound { .. } => "not_found",
            Error::NameConflict(_) => "name_conflict",
            Error::DuplicateName { .. } => "duplicate_name",
            Error::SelfLoop => "self_loop",
            Error::DuplicateRelation { .. } => "duplicate_relation",
            Error::HierarchyCycle { .. } => "hierarchy_cycle",
            Error::VersionConflict { .. } => "version_conflict",
            Error::NotDescendant { .. } => "not_descendant",
            Error::StaleLayout { .. } => "stale_layout",
            Error::UndefinedBaseline => "undefined_baseline",
            Error::UnknownVariant { .. } => "unknown_variant",
            Error::StaleMatrix { .. } => "stale_matrix",
            Error::Parse { .. } => "parse",
            Error::Builder(_) => "builder",
            Error::Io(_) => "io",
            Error::Json(_) => "serialization",
        }
    }

    pub(crate) fn validation(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn not_found(kind: &'static str, id: impl ToString) -> Self {
        Error::NotFound {
            kind,
            id: id.to_string(),
        }
    }
}
