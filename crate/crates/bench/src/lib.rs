//! Deterministic fixtures for the registry benchmarks.

use spltree::{DevelopmentTree, NodeId};

fn id(s: &str) -> NodeId {
    NodeId::new(s).unwrap()
}

/// Builds a tree with `bases` components carrying linear version chains of
/// `chain` nodes each, plus `products` products whose compositions cycle
/// through the repository.
pub fn build_tree(bases: usize, chain: usize, products: usize, picks: usize) -> DevelopmentTree {
    let mut tree = DevelopmentTree::new();
    for b in 0..bases {
        let base = id(&format!("c{b}"));
        tree.add_component(base.clone()).unwrap();
        let mut parent = base;
        for v in 1..chain {
            let version = id(&format!("c{b}v{v}"));
            tree.add_component_version(&parent, version.clone()).unwrap();
            parent = version;
        }
    }
    let components = tree.list_core_assets();
    for p in 0..products {
        let product = id(&format!("p{p}"));
        tree.add_product(product.clone()).unwrap();
        for k in 0..picks {
            let component = &components[(p * 31 + k * 7) % components.len()];
            let _ = tree.add_to_composition(&product, component);
        }
    }
    tree
}
