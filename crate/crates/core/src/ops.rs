//! Mutations of the development tree and the whole-tree traversal.
//!
//! Every mutation validates all of its preconditions before touching the
//! tree, so a failed call leaves the tree exactly as it was.

use std::collections::HashSet;

use crate::error::TreeError;
use crate::model::{DevelopmentTree, NodeEntry, NodeId, NodeKind};

/// What a traversal entry stands for.
///
/// `RepositoryRoot` marks both the global repository under the root and the
/// composition container that every product node owns; the two positions
/// share one element name in the document dialect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntryKind {
    Root,
    RepositoryRoot,
    Component,
    ProductsRoot,
    Product,
    CompositionRef,
    ProductVersion,
}

/// One visited node in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalEntry {
    pub id: NodeId,
    pub kind: EntryKind,
    pub depth: usize,
}

impl TraversalEntry {
    fn new(id: NodeId, kind: EntryKind, depth: usize) -> Self {
        TraversalEntry { id, kind, depth }
    }
}

impl DevelopmentTree {
    /// Appends a new base component to the repository subtree.
    pub fn add_component(&mut self, id: NodeId) -> Result<(), TreeError> {
        self.expect_fresh(&id)?;
        let entry = self.new_entry(NodeKind::Component, None);
        self.nodes.insert(id.clone(), entry);
        self.repository.push(id);
        Ok(())
    }

    /// Appends `new_id` as the last version child of component `base`.
    pub fn add_component_version(&mut self, base: &NodeId, new_id: NodeId) -> Result<(), TreeError> {
        self.expect_kind(base, NodeKind::Component)?;
        self.expect_fresh(&new_id)?;
        let entry = self.new_entry(NodeKind::Component, Some(base.clone()));
        self.nodes.insert(new_id.clone(), entry);
        self.nodes
            .get_mut(base)
            .expect("base checked above")
            .children
            .push(new_id);
        Ok(())
    }

    /// Appends a new base product with an empty composition. The composition
    /// container exists from the moment the product does.
    pub fn add_product(&mut self, id: NodeId) -> Result<(), TreeError> {
        self.expect_fresh(&id)?;
        let entry = self.new_entry(NodeKind::Product, None);
        self.nodes.insert(id.clone(), entry);
        self.products.push(id);
        Ok(())
    }

    /// Appends a component reference to a base product's composition.
    ///
    /// Product versions carry the composition they were created with and
    /// cannot be recomposed.
    pub fn add_to_composition(&mut self, product: &NodeId, component: &NodeId) -> Result<(), TreeError> {
        let entry = self.expect_kind(product, NodeKind::Product)?;
        if entry.parent.is_some() {
            return Err(TreeError::FrozenVersion(product.clone()));
        }
        if entry.composition.contains(component) {
            return Err(TreeError::DuplicateEntry {
                product: product.clone(),
                component: component.clone(),
            });
        }
        self.expect_kind(component, NodeKind::Component)?;
        self.nodes
            .get_mut(product)
            .expect("product checked above")
            .composition
            .push(component.clone());
        Ok(())
    }

    /// Appends `new_id` as the last version child of product `base`, with
    /// the given composition fixed at creation. Nothing changes on error.
    pub fn add_product_version(
        &mut self,
        base: &NodeId,
        new_id: NodeId,
        composition: &[NodeId],
    ) -> Result<(), TreeError> {
        self.expect_kind(base, NodeKind::Product)?;
        self.expect_fresh(&new_id)?;
        for (i, referee) in composition.iter().enumerate() {
            self.expect_kind(referee, NodeKind::Component)?;
            if composition[..i].contains(referee) {
                return Err(TreeError::DuplicateEntry {
                    product: new_id.clone(),
                    component: referee.clone(),
                });
            }
        }
        let mut entry = self.new_entry(NodeKind::Product, Some(base.clone()));
        entry.composition = composition.to_vec();
        self.nodes.insert(new_id.clone(), entry);
        self.nodes
            .get_mut(base)
            .expect("base checked above")
            .children
            .push(new_id);
        Ok(())
    }

    /// Removes a node. Without `force` the node must be a version leaf that
    /// no product references. With `force` the node goes together with its
    /// whole version subtree, and every composition entry referencing any
    /// removed node is purged.
    ///
    /// Returns the removed ids in document order so callers can retire
    /// per-node metadata alongside.
    pub fn remove_node(&mut self, id: &NodeId, force: bool) -> Result<Vec<NodeId>, TreeError> {
        let entry = self.entry(id)?;
        if !force {
            if entry.kind == NodeKind::Component {
                let users = self.referencing_products(std::slice::from_ref(id));
                if !users.is_empty() {
                    return Err(TreeError::InUse {
                        id: id.clone(),
                        users,
                    });
                }
            }
            if !entry.children.is_empty() {
                return Err(TreeError::HasVersions(id.clone()));
            }
        }

        let mut removed = Vec::new();
        self.collect_subtree(id, &mut removed);

        let parent = self.nodes[id].parent.clone();
        match parent {
            Some(parent) => {
                let siblings = &mut self.nodes.get_mut(&parent).expect("parent indexed").children;
                siblings.retain(|c| c != id);
            }
            None => {
                self.repository.retain(|c| c != id);
                self.products.retain(|p| p != id);
            }
        }
        let gone: HashSet<&NodeId> = removed.iter().collect();
        for entry in self.nodes.values_mut() {
            if !entry.composition.is_empty() {
                entry.composition.retain(|referee| !gone.contains(referee));
            }
        }
        for r in &removed {
            self.nodes.remove(r);
        }
        Ok(removed)
    }

    /// Renames a node. Every composition entry referencing the old id is
    /// rewritten to the new one.
    pub fn rename_node(&mut self, id: &NodeId, new_id: NodeId) -> Result<(), TreeError> {
        self.entry(id)?;
        self.expect_fresh(&new_id)?;

        let entry = self.nodes.remove(id).expect("checked above");
        match &entry.parent {
            Some(parent) => {
                for child in &mut self.nodes.get_mut(parent).expect("parent indexed").children {
                    if child == id {
                        *child = new_id.clone();
                    }
                }
            }
            None => {
                for base in self.repository.iter_mut().chain(self.products.iter_mut()) {
                    if base == id {
                        *base = new_id.clone();
                    }
                }
            }
        }
        for child in &entry.children {
            self.nodes.get_mut(child).expect("child indexed").parent = Some(new_id.clone());
        }
        self.nodes.insert(new_id.clone(), entry);
        for node in self.nodes.values_mut() {
            for referee in &mut node.composition {
                if referee == id {
                    *referee = new_id.clone();
                }
            }
        }
        Ok(())
    }

    /// Depth-first pre-order walk over the whole tree, in document order:
    /// the root, the repository subtree, then the products subtree. Each
    /// product is followed by its composition container and entries, then
    /// its version children.
    pub fn traverse(&self) -> Vec<TraversalEntry> {
        let mut out = Vec::with_capacity(3 + self.nodes.len());
        out.push(TraversalEntry::new(
            NodeId::fixed("Software_Product_Line"),
            EntryKind::Root,
            0,
        ));
        out.push(TraversalEntry::new(
            NodeId::fixed("Core_Asset_Repository"),
            EntryKind::RepositoryRoot,
            1,
        ));
        for component in &self.repository {
            self.visit_component(component, 2, &mut out);
        }
        out.push(TraversalEntry::new(
            NodeId::fixed("Product"),
            EntryKind::ProductsRoot,
            1,
        ));
        for product in &self.products {
            self.visit_product(product, 2, true, &mut out);
        }
        out
    }

    fn visit_component(&self, id: &NodeId, depth: usize, out: &mut Vec<TraversalEntry>) {
        out.push(TraversalEntry::new(id.clone(), EntryKind::Component, depth));
        for child in &self.nodes[id].children {
            self.visit_component(child, depth + 1, out);
        }
    }

    fn visit_product(&self, id: &NodeId, depth: usize, base: bool, out: &mut Vec<TraversalEntry>) {
        let kind = if base {
            EntryKind::Product
        } else {
            EntryKind::ProductVersion
        };
        out.push(TraversalEntry::new(id.clone(), kind, depth));
        out.push(TraversalEntry::new(
            NodeId::fixed("Core_Asset_Repository"),
            EntryKind::RepositoryRoot,
            depth + 1,
        ));
        let entry = &self.nodes[id];
        for referee in &entry.composition {
            out.push(TraversalEntry::new(
                referee.clone(),
                EntryKind::CompositionRef,
                depth + 2,
            ));
        }
        for child in &entry.children {
            self.visit_product(child, depth + 1, false, out);
        }
    }

    /// Product nodes (bases and versions, in document order) whose
    /// composition references any of `targets`.
    pub(crate) fn referencing_products(&self, targets: &[NodeId]) -> Vec<NodeId> {
        let mut users = Vec::new();
        let mut stack: Vec<&NodeId> = self.products.iter().rev().collect();
        while let Some(id) = stack.pop() {
            let entry = &self.nodes[id];
            if targets.iter().any(|t| entry.composition.contains(t)) {
                users.push(id.clone());
            }
            stack.extend(entry.children.iter().rev());
        }
        users
    }

    fn collect_subtree(&self, id: &NodeId, out: &mut Vec<NodeId>) {
        out.push(id.clone());
        for child in &self.nodes[id].children {
            self.collect_subtree(child, out);
        }
    }

    fn new_entry(&mut self, kind: NodeKind, parent: Option<NodeId>) -> NodeEntry {
        let ordinal = self.next_ordinal;
        self.next_ordinal += 1;
        NodeEntry {
            kind,
            parent,
            children: Vec::new(),
            composition: Vec::new(),
            ordinal,
        }
    }
}
