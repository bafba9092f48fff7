//! Error types shared across the crate.

use thiserror::Error;

use crate::model::{NodeId, NodeKind, Violation};

/// Errors raised by tree mutations, queries, and metadata updates.
///
/// Display output is deliberately terse (ids only where possible) so the
/// CLI can emit stable `ERROR <code>: <detail>` lines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    /// The string is not usable as a node identifier.
    #[error("{0}")]
    InvalidId(String),

    /// The identifier already names a node in the tree.
    #[error("{0}")]
    DuplicateId(NodeId),

    /// The identifier names no node in the tree.
    #[error("{0}")]
    UnknownNode(NodeId),

    /// The node exists but has the wrong kind for the operation.
    #[error("{id}")]
    KindMismatch { id: NodeId, expected: NodeKind },

    /// The component is already present in the product's composition.
    #[error("{component}")]
    DuplicateEntry { product: NodeId, component: NodeId },

    /// Unforced removal refused: the listed products reference the node.
    #[error("{}", format_ids(.users))]
    InUse { id: NodeId, users: Vec<NodeId> },

    /// Unforced removal refused: the node still has version children.
    #[error("{0}")]
    HasVersions(NodeId),

    /// Composition of a product version is fixed at creation.
    #[error("{0}")]
    FrozenVersion(NodeId),

    /// Metadata record violates its date-ordering invariant.
    #[error("{0}")]
    InvalidRecord(String),

    /// Serialization refused: the tree fails its structural invariants.
    #[error("{} violation(s), first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidTree(Vec<Violation>),
}

impl TreeError {
    /// Stable machine-readable code, used verbatim in CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            TreeError::InvalidId(_) => "InvalidId",
            TreeError::DuplicateId(_) => "DuplicateId",
            TreeError::UnknownNode(_) => "UnknownNode",
            TreeError::KindMismatch { .. } => "KindMismatch",
            TreeError::DuplicateEntry { .. } => "DuplicateEntry",
            TreeError::InUse { .. } => "InUse",
            TreeError::HasVersions(_) => "HasVersions",
            TreeError::FrozenVersion(_) => "FrozenVersion",
            TreeError::InvalidRecord(_) => "InvalidRecord",
            TreeError::InvalidTree(_) => "InvalidTree",
        }
    }
}

fn format_ids(ids: &[NodeId]) -> String {
    ids.iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Errors raised while reading XML documents (tree file or metadata sidecar).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XmlError {
    /// The text is not well-formed XML.
    #[error("{0}")]
    Parse(String),

    /// Well-formed XML that violates the document rules.
    #[error("{rule} at {location}: {message}")]
    Schema {
        rule: String,
        location: String,
        message: String,
    },

    /// A composition entry names a component absent from the repository.
    #[error("{location}: no such component {referee}")]
    DanglingReference { location: String, referee: String },
}

impl XmlError {
    /// Stable machine-readable code, used verbatim in CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            XmlError::Parse(_) => "ParseError",
            XmlError::Schema { .. } => "SchemaError",
            XmlError::DanglingReference { .. } => "DanglingReference",
        }
    }
}
