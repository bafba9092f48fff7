//! Read-only queries over the development tree: asset listings, version
//! history, product compositions, and where-used traceability.
//!
//! Every result is an ordered list (document order for enumerations,
//! oldest-first for lineages) so CLI output is reproducible byte for byte.

use crate::error::TreeError;
use crate::model::{DevelopmentTree, NodeId, NodeKind};

/// Where a component is used, both directly and across its version tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageReport {
    pub component: NodeId,
    /// Products whose composition names exactly this node.
    pub direct_users: Vec<NodeId>,
    /// Products whose composition names any node in this component's
    /// version tree (the base and every descendant).
    pub lineage_users: Vec<NodeId>,
}

impl DevelopmentTree {
    /// All component nodes, bases and versions, in document order.
    pub fn list_core_assets(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        for base in &self.repository {
            self.collect_preorder(base, &mut out);
        }
        out
    }

    /// All product nodes, bases and versions, in document order.
    pub fn list_products(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        for base in &self.products {
            self.collect_preorder(base, &mut out);
        }
        out
    }

    /// The version path from the base component down to `id`, oldest first.
    pub fn version_history(&self, id: &NodeId) -> Result<Vec<NodeId>, TreeError> {
        self.expect_kind(id, NodeKind::Component)?;
        Ok(self.path_from_base(id))
    }

    /// The version path from the base product down to `id`, oldest first.
    pub fn product_lineage(&self, id: &NodeId) -> Result<Vec<NodeId>, TreeError> {
        self.expect_kind(id, NodeKind::Product)?;
        Ok(self.path_from_base(id))
    }

    /// Leaves of the version subtree rooted at `id`, in document order;
    /// `id` itself when it has no versions. These are the candidates a new
    /// product would pick from.
    pub fn latest_versions(&self, id: &NodeId) -> Result<Vec<NodeId>, TreeError> {
        self.expect_kind(id, NodeKind::Component)?;
        let mut leaves = Vec::new();
        let mut stack = vec![id];
        while let Some(current) = stack.pop() {
            let children = &self.nodes[current].children;
            if children.is_empty() {
                leaves.push(current.clone());
            } else {
                stack.extend(children.iter().rev());
            }
        }
        Ok(leaves)
    }

    /// The product's composition entries in insertion order.
    pub fn composition(&self, product: &NodeId) -> Result<Vec<NodeId>, TreeError> {
        let entry = self.expect_kind(product, NodeKind::Product)?;
        Ok(entry.composition.clone())
    }

    /// Products using this component, directly and across its version tree.
    /// Both lists come back in document order.
    pub fn where_used(&self, component: &NodeId) -> Result<UsageReport, TreeError> {
        self.expect_kind(component, NodeKind::Component)?;
        let direct_users = self.referencing_products(std::slice::from_ref(component));

        let base = self
            .path_from_base(component)
            .into_iter()
            .next()
            .expect("path includes the node itself");
        let mut lineage = Vec::new();
        self.collect_preorder(&base, &mut lineage);
        let lineage_users = self.referencing_products(&lineage);

        Ok(UsageReport {
            component: component.clone(),
            direct_users,
            lineage_users,
        })
    }

    fn collect_preorder(&self, id: &NodeId, out: &mut Vec<NodeId>) {
        out.push(id.clone());
        for child in &self.nodes[id].children {
            self.collect_preorder(child, out);
        }
    }

    fn path_from_base(&self, id: &NodeId) -> Vec<NodeId> {
        let mut path = vec![id.clone()];
        let mut current = id;
        while let Some(parent) = &self.nodes[current].parent {
            path.push(parent.clone());
            current = parent;
        }
        path.reverse();
        path
    }
}
