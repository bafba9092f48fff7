//! The development-tree data model.
//!
//! A [`DevelopmentTree`] holds one repository subtree (components and their
//! version chains) and one products subtree (products, their compositions,
//! and their version chains) under a fixed conceptual root. Nodes live in a
//! flat id index; parent/child links and the two base lists carry the shape.
//! All identifiers share one namespace so composition entries can reference
//! exact version nodes unambiguously.

use std::collections::HashMap;
use std::fmt;

use chrono::NaiveDate;

use crate::error::TreeError;

/// Element names reserved by the document dialect; never valid as node ids.
pub const RESERVED_NAMES: [&str; 3] = ["Software_Product_Line", "Core_Asset_Repository", "Product"];

/// Identifier of a component, component version, or product node.
///
/// Ids double as XML element names in the tree document, so the grammar is
/// a strict subset of XML names: an ASCII letter or underscore followed by
/// ASCII letters, digits, hyphens, underscores, or periods.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(String);

impl NodeId {
    /// Validates and wraps an identifier.
    pub fn new(value: impl Into<String>) -> Result<Self, TreeError> {
        let value = value.into();
        if let Some(reason) = Self::syntax_error(&value) {
            return Err(TreeError::InvalidId(format!("{value:?}: {reason}")));
        }
        Ok(NodeId(value))
    }

    /// Returns why `value` is not a valid identifier, or `None` if it is.
    pub fn syntax_error(value: &str) -> Option<&'static str> {
        let mut chars = value.chars();
        match chars.next() {
            None => return Some("empty identifier"),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(_) => return Some("must begin with a letter or underscore"),
        }
        if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.')) {
            return Some("allowed characters are letters, digits, '-', '_', '.'");
        }
        if RESERVED_NAMES.contains(&value) {
            return Some("reserved element name");
        }
        None
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    // Reserved names appear as pseudo-node ids in traversal output; they are
    // constructed here, never through `new`.
    pub(crate) fn fixed(name: &'static str) -> Self {
        NodeId(name.to_owned())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Whether a node is a component (repository subtree) or a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Component,
    Product,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::Component => f.write_str("component"),
            NodeKind::Product => f.write_str("product"),
        }
    }
}

/// Per-node storage. Components never carry composition entries.
#[derive(Debug, Clone)]
pub(crate) struct NodeEntry {
    pub(crate) kind: NodeKind,
    /// Version parent; `None` for base nodes.
    pub(crate) parent: Option<NodeId>,
    /// Version children, in insertion order.
    pub(crate) children: Vec<NodeId>,
    /// Composition entries (products only), in insertion order.
    pub(crate) composition: Vec<NodeId>,
    /// Creation ordinal; strictly increasing across the whole tree.
    pub(crate) ordinal: u64,
}

/// The whole registry: repository and products subtrees plus the id index.
#[derive(Debug, Clone, Default)]
pub struct DevelopmentTree {
    /// Base components, in insertion order.
    pub(crate) repository: Vec<NodeId>,
    /// Base products, in insertion order.
    pub(crate) products: Vec<NodeId>,
    /// Id index over every node in both subtrees.
    pub(crate) nodes: HashMap<NodeId, NodeEntry>,
    pub(crate) next_ordinal: u64,
}

/// A broken structural invariant, named together with the offending node(s).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// An id in the index fails the identifier grammar.
    BadIdSyntax { id: String },
    /// A composition entry references a node absent from the index.
    DanglingReference { product: NodeId, referee: NodeId },
    /// A composition entry references a product instead of a component.
    ReferenceKind { product: NodeId, referee: NodeId },
    /// The same component appears twice in one composition.
    DuplicateEntry { product: NodeId, referee: NodeId },
    /// A child list names a node that is not in the index.
    UnknownChild { parent: NodeId, child: NodeId },
    /// A node is reachable from two parents or part of a cycle.
    SharedNode { id: NodeId },
    /// A version child's kind differs from its parent's.
    ChildKind { parent: NodeId, child: NodeId },
    /// A node's parent link disagrees with the tree structure.
    ParentLink { id: NodeId },
    /// An indexed node is not reachable from either subtree.
    Unreachable { id: NodeId },
    /// Sibling ordinals are not strictly increasing, or a child was
    /// apparently created before its parent.
    OrdinalOrder { id: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadIdSyntax { id } => write!(f, "bad id syntax: {id:?}"),
            Violation::DanglingReference { product, referee } => {
                write!(f, "dangling reference: {product} -> {referee}")
            }
            Violation::ReferenceKind { product, referee } => {
                write!(f, "composition of {product} references non-component {referee}")
            }
            Violation::DuplicateEntry { product, referee } => {
                write!(f, "duplicate entry {referee} in composition of {product}")
            }
            Violation::UnknownChild { parent, child } => {
                write!(f, "unknown child {child} under {parent}")
            }
            Violation::SharedNode { id } => write!(f, "node {id} reached twice"),
            Violation::ChildKind { parent, child } => {
                write!(f, "child {child} of {parent} has mismatched kind")
            }
            Violation::ParentLink { id } => write!(f, "parent link of {id} disagrees with structure"),
            Violation::Unreachable { id } => write!(f, "indexed node {id} unreachable"),
            Violation::OrdinalOrder { id } => write!(f, "ordinal order broken at {id}"),
        }
    }
}

impl DevelopmentTree {
    /// Creates an empty tree: repository and products subtrees, no nodes.
    pub fn new() -> Self {
        Self::default()
    }

    /// True if the id names a node in the tree.
    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    /// Kind of the node, if present.
    pub fn kind(&self, id: &NodeId) -> Option<NodeKind> {
        self.nodes.get(id).map(|n| n.kind)
    }

    /// Number of nodes (components and products, bases and versions).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Base components in insertion order.
    pub fn base_components(&self) -> &[NodeId] {
        &self.repository
    }

    /// Base products in insertion order.
    pub fn base_products(&self) -> &[NodeId] {
        &self.products
    }

    /// Version children of a node, in insertion order.
    pub fn version_children(&self, id: &NodeId) -> Result<&[NodeId], TreeError> {
        self.nodes
            .get(id)
            .map(|n| n.children.as_slice())
            .ok_or_else(|| TreeError::UnknownNode(id.clone()))
    }

    /// Version parent of a node (`None` for base nodes).
    pub fn version_parent(&self, id: &NodeId) -> Result<Option<&NodeId>, TreeError> {
        self.nodes
            .get(id)
            .map(|n| n.parent.as_ref())
            .ok_or_else(|| TreeError::UnknownNode(id.clone()))
    }

    pub(crate) fn entry(&self, id: &NodeId) -> Result<&NodeEntry, TreeError> {
        self.nodes
            .get(id)
            .ok_or_else(|| TreeError::UnknownNode(id.clone()))
    }

    pub(crate) fn expect_kind(&self, id: &NodeId, expected: NodeKind) -> Result<&NodeEntry, TreeError> {
        let entry = self.entry(id)?;
        if entry.kind != expected {
            return Err(TreeError::KindMismatch {
                id: id.clone(),
                expected,
            });
        }
        Ok(entry)
    }

    pub(crate) fn expect_fresh(&self, id: &NodeId) -> Result<(), TreeError> {
        if self.contains(id) {
            return Err(TreeError::DuplicateId(id.clone()));
        }
        Ok(())
    }

    /// Checks every structural invariant by full traversal and returns all
    /// violations found. An empty result means the tree is valid.
    pub fn check_invariants(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut reached: HashMap<&NodeId, ()> = HashMap::with_capacity(self.nodes.len());

        for id in self.nodes.keys() {
            if let Some(_reason) = NodeId::syntax_error(id.as_str()) {
                violations.push(Violation::BadIdSyntax {
                    id: id.as_str().to_owned(),
                });
            }
        }

        self.walk_subtree(&self.repository, NodeKind::Component, None, &mut reached, &mut violations);
        self.walk_subtree(&self.products, NodeKind::Product, None, &mut reached, &mut violations);

        for id in self.nodes.keys() {
            if !reached.contains_key(id) {
                violations.push(Violation::Unreachable { id: id.clone() });
            }
        }

        // Composition rules need the full index, so they run after the walk.
        for (id, entry) in &self.nodes {
            if entry.kind != NodeKind::Product {
                continue;
            }
            for (i, referee) in entry.composition.iter().enumerate() {
                match self.nodes.get(referee) {
                    None => violations.push(Violation::DanglingReference {
                        product: id.clone(),
                        referee: referee.clone(),
                    }),
                    Some(target) if target.kind != NodeKind::Component => {
                        violations.push(Violation::ReferenceKind {
                            product: id.clone(),
                            referee: referee.clone(),
                        })
                    }
                    Some(_) => {}
                }
                if entry.composition[..i].contains(referee) {
                    violations.push(Violation::DuplicateEntry {
                        product: id.clone(),
                        referee: referee.clone(),
                    });
                }
            }
        }

        violations
    }

    fn walk_subtree<'a>(
        &'a self,
        roots: &'a [NodeId],
        kind: NodeKind,
        parent: Option<&'a NodeId>,
        reached: &mut HashMap<&'a NodeId, ()>,
        violations: &mut Vec<Violation>,
    ) {
        let mut last_ordinal: Option<u64> = None;
        for id in roots {
            let entry = match self.nodes.get(id) {
                Some(entry) => entry,
                None => {
                    violations.push(Violation::UnknownChild {
                        parent: parent
                            .cloned()
                            .unwrap_or_else(|| NodeId::fixed("Software_Product_Line")),
                        child: id.clone(),
                    });
                    continue;
                }
            };
            if reached.insert(id, ()).is_some() {
                violations.push(Violation::SharedNode { id: id.clone() });
                continue; // do not recurse into a shared subtree twice
            }
            if entry.kind != kind {
                violations.push(Violation::ChildKind {
                    parent: parent
                        .cloned()
                        .unwrap_or_else(|| NodeId::fixed("Software_Product_Line")),
                    child: id.clone(),
                });
            }
            if entry.parent.as_ref() != parent {
                violations.push(Violation::ParentLink { id: id.clone() });
            }
            if let Some(prev) = last_ordinal {
                if entry.ordinal <= prev {
                    violations.push(Violation::OrdinalOrder { id: id.clone() });
                }
            }
            if let Some(p) = parent {
                if let Some(parent_entry) = self.nodes.get(p) {
                    if entry.ordinal <= parent_entry.ordinal {
                        violations.push(Violation::OrdinalOrder { id: id.clone() });
                    }
                }
            }
            last_ordinal = Some(entry.ordinal);
            self.walk_subtree(&entry.children, kind, Some(id), reached, violations);
        }
    }
}

/// Structural equality: same shape, kinds, sibling order, and compositions.
/// Creation ordinals are an internal tiebreak and do not participate, so a
/// tree rebuilt from its serialized form compares equal to the original.
impl PartialEq for DevelopmentTree {
    fn eq(&self, other: &Self) -> bool {
        if self.repository != other.repository || self.products != other.products {
            return false;
        }
        if self.nodes.len() != other.nodes.len() {
            return false;
        }
        self.nodes.iter().all(|(id, entry)| {
            other.nodes.get(id).is_some_and(|o| {
                entry.kind == o.kind
                    && entry.parent == o.parent
                    && entry.children == o.children
                    && entry.composition == o.composition
            })
        })
    }
}

impl Eq for DevelopmentTree {}

/// Outcome of testing a component or product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestResult {
    Pass,
    Fail,
    Untested,
}

impl TestResult {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestResult::Pass => "pass",
            TestResult::Fail => "fail",
            TestResult::Untested => "untested",
        }
    }

    pub fn parse(value: &str) -> Option<Self> {
        match value {
            "pass" => Some(TestResult::Pass),
            "fail" => Some(TestResult::Fail),
            "untested" => Some(TestResult::Untested),
            _ => None,
        }
    }
}

impl fmt::Display for TestResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-node attributes stored beside the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataRecord {
    pub author: String,
    pub developed_date: NaiveDate,
    pub release_date: Option<NaiveDate>,
    pub test_date: Option<NaiveDate>,
    pub test_result: Option<TestResult>,
    pub notes: Option<String>,
}

impl MetadataRecord {
    /// A record with only the required fields set.
    pub fn new(author: impl Into<String>, developed_date: NaiveDate) -> Self {
        MetadataRecord {
            author: author.into(),
            developed_date,
            release_date: None,
            test_date: None,
            test_result: None,
            notes: None,
        }
    }

    /// Dates must not precede the development date.
    pub fn validate(&self) -> Result<(), TreeError> {
        if let Some(release) = self.release_date {
            if release < self.developed_date {
                return Err(TreeError::InvalidRecord(format!(
                    "release_date {release} precedes developed_date {}",
                    self.developed_date
                )));
            }
        }
        if let Some(test) = self.test_date {
            if test < self.developed_date {
                return Err(TreeError::InvalidRecord(format!(
                    "test_date {test} precedes developed_date {}",
                    self.developed_date
                )));
            }
        }
        Ok(())
    }
}
