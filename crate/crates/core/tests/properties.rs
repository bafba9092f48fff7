//! Property tests: randomized mutation scripts must preserve every
//! structural invariant, traversal discipline, serialization round-trips,
//! and mutation atomicity.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use spltree::{
    from_xml, load_metadata, save_metadata, to_xml, DevelopmentTree, EntryKind, MetadataDocument,
    MetadataRecord, NodeId, TestResult,
};

fn id(s: &str) -> NodeId {
    NodeId::new(s).unwrap()
}

/// One encoded mutation; indices are taken modulo whatever exists when the
/// step runs, so any script is applicable to any intermediate tree.
type Step = (u8, usize, usize);

fn step_strategy() -> impl Strategy<Value = Step> {
    (any::<u8>(), 0usize..97, 0usize..89)
}

fn script_strategy(max_len: usize) -> impl Strategy<Value = Vec<Step>> {
    proptest::collection::vec(step_strategy(), 0..max_len)
}

struct Interpreter {
    tree: DevelopmentTree,
    fresh: u32,
}

impl Interpreter {
    fn new() -> Self {
        Interpreter {
            tree: DevelopmentTree::new(),
            fresh: 0,
        }
    }

    fn fresh_id(&mut self) -> NodeId {
        let name = format!("n{}", self.fresh);
        self.fresh += 1;
        id(&name)
    }

    fn run(&mut self, script: &[Step]) {
        for step in script {
            self.apply(*step);
        }
    }

    /// Applies one step; steps whose preconditions cannot be met (or that
    /// legitimately fail, like removing a referenced component) are skipped.
    fn apply(&mut self, (op, a, b): Step) {
        let components = self.tree.list_core_assets();
        let products = self.tree.list_products();
        match op % 8 {
            0 => {
                let new = self.fresh_id();
                self.tree.add_component(new).unwrap();
            }
            1 => {
                if let Some(base) = pick(&components, a) {
                    let new = self.fresh_id();
                    self.tree.add_component_version(&base, new).unwrap();
                }
            }
            2 => {
                let new = self.fresh_id();
                self.tree.add_product(new).unwrap();
            }
            3 => {
                let bases = self.tree.base_products().to_vec();
                if let (Some(product), Some(component)) = (pick(&bases, a), pick(&components, b)) {
                    // Re-adding an existing entry is a legitimate failure.
                    let _ = self.tree.add_to_composition(&product, &component);
                }
            }
            4 => {
                if let Some(base) = pick(&products, a) {
                    let composition = sample_distinct(&components, a, b);
                    let new = self.fresh_id();
                    self.tree
                        .add_product_version(&base, new, &composition)
                        .unwrap();
                }
            }
            5 => {
                let all = [components.as_slice(), products.as_slice()].concat();
                if let Some(target) = pick(&all, a.wrapping_add(b)) {
                    let new = self.fresh_id();
                    self.tree.rename_node(&target, new).unwrap();
                }
            }
            6 | 7 => {
                let all = [components.as_slice(), products.as_slice()].concat();
                if let Some(target) = pick(&all, a) {
                    // Unforced removals may be refused; that path is covered
                    // by the atomicity battery.
                    let _ = self.tree.remove_node(&target, b % 2 == 0);
                }
            }
            _ => unreachable!(),
        }
    }
}

fn pick(list: &[NodeId], index: usize) -> Option<NodeId> {
    if list.is_empty() {
        None
    } else {
        Some(list[index % list.len()].clone())
    }
}

/// Up to four distinct components, chosen by stride.
fn sample_distinct(components: &[NodeId], start: usize, stride: usize) -> Vec<NodeId> {
    if components.is_empty() {
        return Vec::new();
    }
    let count = (start + stride) % 5;
    let mut picked = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut cursor = start % components.len();
    for _ in 0..count {
        if seen.insert(cursor) {
            picked.push(components[cursor].clone());
        }
        cursor = (cursor + 1 + stride % 3) % components.len();
    }
    picked
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scripts_preserve_invariants_and_traversal_discipline(script in script_strategy(120)) {
        let mut interp = Interpreter::new();
        interp.run(&script);
        let tree = &interp.tree;

        prop_assert_eq!(tree.check_invariants(), vec![]);

        let entries = tree.traverse();

        // Depth discipline: the root sits at 0 and every entry hangs one
        // level below an earlier entry.
        prop_assert_eq!(entries[0].depth, 0);
        let mut stack: Vec<usize> = Vec::new();
        for entry in &entries {
            while stack.len() > entry.depth {
                stack.pop();
            }
            prop_assert_eq!(entry.depth, stack.len());
            stack.push(entry.depth);
        }

        // Version parents always precede their children in the sequence.
        let mut position = std::collections::HashMap::new();
        for (index, entry) in entries.iter().enumerate() {
            if matches!(entry.kind, EntryKind::Component | EntryKind::Product | EntryKind::ProductVersion) {
                position.insert(entry.id.clone(), index);
                if let Some(parent) = tree.version_parent(&entry.id).unwrap() {
                    let parent_pos = position.get(parent);
                    prop_assert!(parent_pos.is_some_and(|p| *p < index));
                }
            }
        }

        // Every indexed node appears exactly once.
        let mut visited: Vec<NodeId> = entries
            .iter()
            .filter(|e| matches!(e.kind, EntryKind::Component | EntryKind::Product | EntryKind::ProductVersion))
            .map(|e| e.id.clone())
            .collect();
        let mut indexed = [tree.list_core_assets(), tree.list_products()].concat();
        prop_assert_eq!(visited.len(), tree.node_count());
        visited.sort();
        indexed.sort();
        prop_assert_eq!(&visited, &indexed);
        prop_assert!(visited.windows(2).all(|w| w[0] != w[1]));

        // Entry count bookkeeping: skeleton + nodes + refs + one container
        // per product node.
        let product_nodes = tree.list_products();
        let refs: usize = product_nodes
            .iter()
            .map(|p| tree.composition(p).unwrap().len())
            .sum();
        prop_assert_eq!(
            entries.len(),
            3 + tree.node_count() + refs + product_nodes.len()
        );
    }

    #[test]
    fn scripts_round_trip_through_xml(script in script_strategy(100)) {
        let mut interp = Interpreter::new();
        interp.run(&script);
        let doc = to_xml(&interp.tree).unwrap();
        let rebuilt = from_xml(&doc).unwrap();
        prop_assert_eq!(&rebuilt, &interp.tree);
        prop_assert_eq!(to_xml(&rebuilt).unwrap(), doc);
    }

    #[test]
    fn failed_mutations_leave_the_tree_untouched(script in script_strategy(60)) {
        let mut interp = Interpreter::new();
        interp.run(&script);
        let mut tree = interp.tree.clone();

        let components = tree.list_core_assets();
        let products = tree.list_products();
        let unknown = id("never_created");
        let before = to_xml(&tree).unwrap();

        let attempt = |tree: &DevelopmentTree,
                       result: Result<(), spltree::TreeError>|
         -> Result<(), TestCaseError> {
            prop_assert!(result.is_err());
            prop_assert_eq!(to_xml(tree).unwrap(), before.clone());
            Ok(())
        };

        if let Some(existing) = components.first().cloned() {
            let r = tree.add_component(existing.clone());
            attempt(&tree, r)?;
            let r = tree.add_product(existing.clone());
            attempt(&tree, r)?;
            let r = tree.add_component_version(&unknown, id("f1"));
            attempt(&tree, r)?;
            let r = tree.add_component_version(&existing, existing.clone());
            attempt(&tree, r)?;
            let r = tree.add_to_composition(&existing, &existing);
            attempt(&tree, r)?;
            let r = tree.add_product_version(&existing, id("f2"), &[]);
            attempt(&tree, r)?;
        }
        if let Some(product) = products.first().cloned() {
            let r = tree.add_product_version(&product, product.clone(), &[]);
            attempt(&tree, r)?;
            let r = tree.add_product_version(&product, id("f3"), std::slice::from_ref(&unknown));
            attempt(&tree, r)?;
            let r = tree.add_product_version(&product, id("f4"), std::slice::from_ref(&product));
            attempt(&tree, r)?;
            let r = tree.add_to_composition(&product, &unknown);
            attempt(&tree, r)?;
            if let Some(component) = components.first().cloned() {
                let r = tree
                    .add_product_version(&product, id("f5"), &[component.clone(), component.clone()]);
                attempt(&tree, r)?;
            }
            let r = tree.add_component_version(&product, id("f6"));
            attempt(&tree, r)?;
        }
        let r = tree.remove_node(&unknown, true).map(|_| ());
        attempt(&tree, r)?;
        let r = tree.rename_node(&unknown, id("f7"));
        attempt(&tree, r)?;
        if components.len() >= 2 {
            let r = tree.rename_node(&components[0], components[1].clone());
            attempt(&tree, r)?;
        }
        // A referenced component refuses unforced removal.
        if let Some(used) = products
            .iter()
            .flat_map(|p| tree.composition(p).unwrap())
            .next()
        {
            let r = tree.remove_node(&used, false).map(|_| ());
            attempt(&tree, r)?;
        }
        // A node with version children refuses unforced removal.
        if let Some(versioned) = components
            .iter()
            .find(|c| !tree.version_children(c).unwrap().is_empty())
        {
            let r = tree.remove_node(versioned, false).map(|_| ());
            attempt(&tree, r)?;
        }
    }

    #[test]
    fn forced_removal_never_leaves_dangling_references(
        script in script_strategy(80),
        victims in proptest::collection::vec((0usize..64, any::<bool>()), 1..12),
    ) {
        let mut interp = Interpreter::new();
        interp.run(&script);
        let tree = &mut interp.tree;
        for (index, pick_component) in victims {
            let list = if pick_component {
                tree.list_core_assets()
            } else {
                tree.list_products()
            };
            if list.is_empty() {
                continue;
            }
            let victim = &list[index % list.len()];
            tree.remove_node(victim, true).unwrap();
            prop_assert_eq!(tree.check_invariants(), vec![]);
        }
    }

    #[test]
    fn metadata_documents_survive_save_and_load(doc in metadata_doc_strategy()) {
        let saved = save_metadata(&doc);
        let loaded = load_metadata(&saved).unwrap();
        prop_assert_eq!(&loaded, &doc);
        prop_assert_eq!(save_metadata(&loaded), saved);
    }
}

fn date_strategy() -> impl Strategy<Value = chrono::NaiveDate> {
    (1990i32..2035, 1u32..366)
        .prop_map(|(year, ordinal)| chrono::NaiveDate::from_yo_opt(year, ordinal).unwrap())
}

fn record_strategy() -> impl Strategy<Value = MetadataRecord> {
    (
        "[a-zA-Z0-9 &<>\"'._-]{0,16}",
        date_strategy(),
        proptest::option::of(0u64..700),
        proptest::option::of(0u64..700),
        proptest::option::of(0u8..3),
        proptest::option::of("[ -~\n]{0,32}"),
    )
        .prop_map(|(author, developed, release, test, result, notes)| {
            let mut record = MetadataRecord::new(author, developed);
            record.release_date = release.and_then(|d| developed.checked_add_days(chrono::Days::new(d)));
            record.test_date = test.and_then(|d| developed.checked_add_days(chrono::Days::new(d)));
            record.test_result = result.map(|r| match r {
                0 => TestResult::Pass,
                1 => TestResult::Fail,
                _ => TestResult::Untested,
            });
            record.notes = notes;
            record
        })
}

fn metadata_doc_strategy() -> impl Strategy<Value = MetadataDocument> {
    proptest::collection::vec((0u32..10_000, record_strategy()), 0..16).prop_map(|entries| {
        let mut doc = MetadataDocument::new();
        for (suffix, record) in entries {
            doc.set(id(&format!("n{suffix}")), record).unwrap();
        }
        doc
    })
}

#[test]
fn interpreter_builds_nontrivial_trees() {
    // A fixed script touching every opcode, as a sanity anchor for the
    // randomized suites above.
    let script: Vec<(u8, usize, usize)> = (0..64)
        .map(|i| (i as u8, (i * 7 + 3) as usize, (i * 5 + 1) as usize))
        .collect();
    let mut interp = Interpreter::new();
    interp.run(&script);
    assert!(interp.tree.node_count() > 8);
    assert!(!interp.tree.base_products().is_empty());
    assert_eq!(interp.tree.check_invariants(), vec![]);
}

#[test]
fn long_sequences_visit_every_index_entry_exactly_once() {
    // Sequences of >= 500 operations, checked after every chunk: the set of
    // ids the traversal visits equals the id index, with no repeats.
    for seed in [3u64, 59, 901] {
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state
        };
        let script: Vec<Step> = (0..700)
            .map(|_| {
                (
                    (next() >> 32) as u8,
                    (next() >> 24) as usize % 97,
                    (next() >> 16) as usize % 89,
                )
            })
            .collect();
        let mut interp = Interpreter::new();
        for chunk in script.chunks(100) {
            interp.run(chunk);
            let tree = &interp.tree;
            assert_eq!(tree.check_invariants(), vec![]);
            let mut visited: Vec<NodeId> = tree
                .traverse()
                .into_iter()
                .filter(|e| {
                    matches!(
                        e.kind,
                        EntryKind::Component | EntryKind::Product | EntryKind::ProductVersion
                    )
                })
                .map(|e| e.id)
                .collect();
            assert_eq!(visited.len(), tree.node_count());
            let mut indexed = [tree.list_core_assets(), tree.list_products()].concat();
            visited.sort();
            indexed.sort();
            assert_eq!(visited, indexed, "seed {seed}");
        }
        assert!(interp.tree.node_count() > 100, "seed {seed} built too little");
    }
}
