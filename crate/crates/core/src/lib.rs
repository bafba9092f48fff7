//! Development-tree registry for software product lines.
//!
//! A product line's shared components, their version chains, its products,
//! and each product's composition live in one tree with two subtrees under a
//! fixed root: the core-asset repository and the products. The crate covers:
//!
//! - [`model`] — the tree types and their structural invariants
//! - [`ops`] — mutations and the document-order traversal
//! - [`queries`] — listings, version history, and where-used traceability
//! - [`xml`] — canonical XML serialization, parsing, and validation
//! - [`meta`] — per-node metadata records and their sidecar file
//!
//! A tree value moves freely between threads and supports concurrent
//! readers; callers serialize writes.

pub mod error;
pub mod meta;
pub mod model;
pub mod ops;
pub mod queries;
pub mod xml;

pub use error::{TreeError, XmlError};
pub use meta::{load_metadata, parse_date, save_metadata, MetadataDocument};
pub use model::{DevelopmentTree, MetadataRecord, NodeId, NodeKind, TestResult, Violation};
pub use ops::{EntryKind, TraversalEntry};
pub use queries::UsageReport;
pub use xml::{from_xml, to_xml, validate, Issue, Rule, ValidationReport};
