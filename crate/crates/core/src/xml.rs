//! XML handling for the development tree: canonical serialization, parsing,
//! and structural validation of documents.
//!
//! The dialect is the tree itself: node identifiers double as element names.
//! The root `Software_Product_Line` holds one `Core_Asset_Repository` with
//! component elements (version children nested inside their parents) and one
//! `Product` container whose product elements each own a
//! `Core_Asset_Repository` child listing composition entries as empty
//! elements, followed by nested product-version elements.
//!
//! Serialization is canonical: UTF-8, two-space indentation, explicit close
//! tags, one element per line, and a format-version comment after the XML
//! declaration. The same tree always yields byte-identical output.

use std::collections::{HashMap, HashSet};
use std::fmt;

use quick_xml::events::{BytesRef, BytesStart, Event};
use quick_xml::Reader;

use crate::error::{TreeError, XmlError};
use crate::model::{DevelopmentTree, NodeId};

pub(crate) const ROOT_NAME: &str = "Software_Product_Line";
pub(crate) const REPOSITORY_NAME: &str = "Core_Asset_Repository";
pub(crate) const PRODUCTS_NAME: &str = "Product";

const XML_DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>";
const FORMAT_COMMENT: &str = "<!-- spltree format 1 -->";

/// Rules the validator enforces, with stable names for reports and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// The text is well-formed XML.
    WellFormed,
    /// The document element is `Software_Product_Line`.
    RootName,
    /// The root holds exactly one repository then one products container.
    RootShape,
    /// Element names follow the node-identifier grammar.
    IdSyntax,
    /// Node identifiers are globally unique.
    UniqueIds,
    /// Each product holds one composition container first, then versions.
    ProductShape,
    /// Composition entries are empty reference elements.
    CompositionShape,
    /// Composition references resolve to repository components.
    DanglingRef,
    /// No component appears twice in one composition.
    DuplicateEntry,
    /// Tree elements carry no attributes.
    NoAttributes,
    /// Tree elements carry no character data.
    NoText,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::WellFormed => "well-formed",
            Rule::RootName => "root-name",
            Rule::RootShape => "root-shape",
            Rule::IdSyntax => "id-syntax",
            Rule::UniqueIds => "unique-ids",
            Rule::ProductShape => "product-shape",
            Rule::CompositionShape => "composition-shape",
            Rule::DanglingRef => "dangling-ref",
            Rule::DuplicateEntry => "duplicate-entry",
            Rule::NoAttributes => "no-attributes",
            Rule::NoText => "no-text",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub rule: Rule,
    /// Slash-separated element path, e.g. `/Software_Product_Line/Product/P2`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.rule, self.location, self.message)
    }
}

/// Outcome of validating a document against the dialect rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn from_issues(issues: Vec<Issue>) -> Self {
        ValidationReport {
            valid: issues.is_empty(),
            issues,
        }
    }
}

/// Serializes the tree as a canonical document.
///
/// Refuses trees that fail [`DevelopmentTree::check_invariants`].
pub fn to_xml(tree: &DevelopmentTree) -> Result<String, TreeError> {
    let violations = tree.check_invariants();
    if !violations.is_empty() {
        return Err(TreeError::InvalidTree(violations));
    }
    let mut writer = CanonicalWriter::new();
    writer.open(ROOT_NAME);
    if tree.repository.is_empty() {
        writer.leaf(REPOSITORY_NAME);
    } else {
        writer.open(REPOSITORY_NAME);
        for component in &tree.repository {
            write_component(tree, component, &mut writer);
        }
        writer.close(REPOSITORY_NAME);
    }
    if tree.products.is_empty() {
        writer.leaf(PRODUCTS_NAME);
    } else {
        writer.open(PRODUCTS_NAME);
        for product in &tree.products {
            write_product(tree, product, &mut writer);
        }
        writer.close(PRODUCTS_NAME);
    }
    writer.close(ROOT_NAME);
    Ok(writer.finish())
}

fn write_component(tree: &DevelopmentTree, id: &NodeId, writer: &mut CanonicalWriter) {
    let children = &tree.nodes[id].children;
    if children.is_empty() {
        writer.leaf(id.as_str());
    } else {
        writer.open(id.as_str());
        for child in children {
            write_component(tree, child, writer);
        }
        writer.close(id.as_str());
    }
}

fn write_product(tree: &DevelopmentTree, id: &NodeId, writer: &mut CanonicalWriter) {
    // A product element always holds its composition container.
    writer.open(id.as_str());
    let entry = &tree.nodes[id];
    if entry.composition.is_empty() {
        writer.leaf(REPOSITORY_NAME);
    } else {
        writer.open(REPOSITORY_NAME);
        for referee in &entry.composition {
            writer.leaf(referee.as_str());
        }
        writer.close(REPOSITORY_NAME);
    }
    for version in &entry.children {
        write_product(tree, version, writer);
    }
    writer.close(id.as_str());
}

/// Parses a document and rebuilds the tree.
///
/// Accepts anything [`validate`] accepts; composition entries are resolved
/// against the global repository.
pub fn from_xml(text: &str) -> Result<DevelopmentTree, XmlError> {
    let root = parse_raw(text).map_err(XmlError::Parse)?;
    let issues = analyze(&root);
    if let Some(first) = issues.into_iter().next() {
        return Err(issue_to_error(first));
    }
    Ok(build(&root))
}

/// Checks a document against every dialect rule and reports all violations.
pub fn validate(text: &str) -> ValidationReport {
    match parse_raw(text) {
        Err(message) => ValidationReport::from_issues(vec![Issue {
            rule: Rule::WellFormed,
            location: "/".to_owned(),
            message,
        }]),
        Ok(root) => ValidationReport::from_issues(analyze(&root)),
    }
}

fn issue_to_error(issue: Issue) -> XmlError {
    match issue.rule {
        Rule::DanglingRef => {
            let referee = issue
                .location
                .rsplit('/')
                .next()
                .unwrap_or_default()
                .to_owned();
            XmlError::DanglingReference {
                location: issue.location,
                referee,
            }
        }
        rule => XmlError::Schema {
            rule: rule.name().to_owned(),
            location: issue.location,
            message: issue.message,
        },
    }
}

// ---------------------------------------------------------------------------
// Raw parsing
// ---------------------------------------------------------------------------

/// A parsed element with declaration, comments, doctype, and processing
/// instructions already stripped.
#[derive(Debug, Clone, Default)]
pub(crate) struct RawElement {
    pub(crate) name: String,
    pub(crate) attrs: Vec<(String, String)>,
    pub(crate) children: Vec<RawElement>,
    /// Concatenated character data, entities resolved.
    pub(crate) text: String,
}

/// Parses text into an element tree, reporting well-formedness problems as
/// error messages.
pub(crate) fn parse_raw(text: &str) -> Result<RawElement, String> {
    let mut reader = Reader::from_str(text);
    let mut stack: Vec<RawElement> = Vec::new();
    let mut root: Option<RawElement> = None;

    fn attach(element: RawElement, stack: &mut [RawElement], root: &mut Option<RawElement>) {
        match stack.last_mut() {
            Some(parent) => parent.children.push(element),
            None => *root = Some(element),
        }
    }

    loop {
        match reader.read_event().map_err(|e| e.to_string())? {
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) | Event::DocType(_) | Event::PI(_) => {}
            Event::Start(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err("content after document element".to_owned());
                }
                stack.push(element_from_start(&start)?);
            }
            Event::Empty(start) => {
                if root.is_some() && stack.is_empty() {
                    return Err("content after document element".to_owned());
                }
                attach(element_from_start(&start)?, &mut stack, &mut root);
            }
            Event::End(_) => {
                // Mismatched names are already an error with default config.
                let element = stack.pop().expect("reader rejects unmatched ends");
                attach(element, &mut stack, &mut root);
            }
            Event::Text(t) => {
                let decoded = t.decode().map_err(|e| e.to_string())?;
                match stack.last_mut() {
                    Some(top) => top.text.push_str(&decoded),
                    None if decoded.trim().is_empty() => {}
                    None => return Err("character data outside document element".to_owned()),
                }
            }
            Event::CData(c) => {
                let bytes = c.into_inner();
                let decoded =
                    std::str::from_utf8(&bytes).map_err(|e| e.to_string())?;
                match stack.last_mut() {
                    Some(top) => top.text.push_str(decoded),
                    None if decoded.trim().is_empty() => {}
                    None => return Err("character data outside document element".to_owned()),
                }
            }
            Event::GeneralRef(r) => {
                let ch = resolve_reference(&r)?;
                match stack.last_mut() {
                    Some(top) => top.text.push(ch),
                    None => return Err("character data outside document element".to_owned()),
                }
            }
        }
    }
    if !stack.is_empty() {
        return Err(format!("unclosed element <{}>", stack.last().unwrap().name));
    }
    root.ok_or_else(|| "no document element".to_owned())
}

fn element_from_start(start: &BytesStart<'_>) -> Result<RawElement, String> {
    let name = std::str::from_utf8(start.name().as_ref())
        .map_err(|e| e.to_string())?
        .to_owned();
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = std::str::from_utf8(attr.key.as_ref())
            .map_err(|e| e.to_string())?
            .to_owned();
        let value = attr
            .normalized_value(quick_xml::XmlVersion::Implicit1_0)
            .map_err(|e| e.to_string())?
            .into_owned();
        attrs.push((key, value));
    }
    Ok(RawElement {
        name,
        attrs,
        children: Vec::new(),
        text: String::new(),
    })
}

fn resolve_reference(reference: &BytesRef<'_>) -> Result<char, String> {
    if let Some(ch) = reference.resolve_char_ref().map_err(|e| e.to_string())? {
        return Ok(ch);
    }
    match reference.as_ref() {
        b"amp" => Ok('&'),
        b"lt" => Ok('<'),
        b"gt" => Ok('>'),
        b"quot" => Ok('"'),
        b"apos" => Ok('\''),
        other => Err(format!(
            "unknown entity &{};",
            String::from_utf8_lossy(other)
        )),
    }
}

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

struct Analysis {
    issues: Vec<Issue>,
    /// (id, path) of every component and product element, document order.
    node_ids: Vec<(String, String, bool)>,
    /// (referee id, path, owning product path) of every composition entry.
    refs: Vec<(String, String, String)>,
}

fn analyze(root: &RawElement) -> Vec<Issue> {
    let mut analysis = Analysis {
        issues: Vec::new(),
        node_ids: Vec::new(),
        refs: Vec::new(),
    };

    let root_path = format!("/{}", root.name);
    if root.name != ROOT_NAME {
        analysis.issues.push(Issue {
            rule: Rule::RootName,
            location: root_path.clone(),
            message: format!("document element is <{}>, expected <{ROOT_NAME}>", root.name),
        });
    }
    check_plain(root, &root_path, &mut analysis.issues);

    let child_names: Vec<&str> = root.children.iter().map(|c| c.name.as_str()).collect();
    if child_names != [REPOSITORY_NAME, PRODUCTS_NAME] {
        analysis.issues.push(Issue {
            rule: Rule::RootShape,
            location: root_path.clone(),
            message: format!(
                "root must hold exactly <{REPOSITORY_NAME}> then <{PRODUCTS_NAME}>, found [{}]",
                child_names.join(", ")
            ),
        });
    }

    if let Some(repository) = root.children.iter().find(|c| c.name == REPOSITORY_NAME) {
        let path = format!("{root_path}/{REPOSITORY_NAME}");
        check_plain(repository, &path, &mut analysis.issues);
        for component in &repository.children {
            walk_component(component, &path, &mut analysis);
        }
    }
    if let Some(products) = root.children.iter().find(|c| c.name == PRODUCTS_NAME) {
        let path = format!("{root_path}/{PRODUCTS_NAME}");
        check_plain(products, &path, &mut analysis.issues);
        for product in &products.children {
            walk_product(product, &path, &mut analysis);
        }
    }

    let mut issues = analysis.issues;

    let mut seen: HashSet<&str> = HashSet::new();
    for (id, path, _) in &analysis.node_ids {
        if !seen.insert(id.as_str()) {
            issues.push(Issue {
                rule: Rule::UniqueIds,
                location: path.clone(),
                message: format!("duplicate identifier {id}"),
            });
        }
    }

    let components: HashSet<&str> = analysis
        .node_ids
        .iter()
        .filter(|(_, _, is_component)| *is_component)
        .map(|(id, _, _)| id.as_str())
        .collect();
    let mut seen_per_product: HashMap<&str, HashSet<&str>> = HashMap::new();
    for (referee, path, product_path) in &analysis.refs {
        if !components.contains(referee.as_str()) {
            issues.push(Issue {
                rule: Rule::DanglingRef,
                location: path.clone(),
                message: format!("no component named {referee} in the repository"),
            });
        }
        if !seen_per_product
            .entry(product_path.as_str())
            .or_default()
            .insert(referee.as_str())
        {
            issues.push(Issue {
                rule: Rule::DuplicateEntry,
                location: path.clone(),
                message: format!("{referee} listed twice in one composition"),
            });
        }
    }

    issues
}

fn walk_component(element: &RawElement, parent_path: &str, analysis: &mut Analysis) {
    let path = format!("{parent_path}/{}", element.name);
    check_id(&element.name, &path, &mut analysis.issues);
    check_plain(element, &path, &mut analysis.issues);
    analysis
        .node_ids
        .push((element.name.clone(), path.clone(), true));
    for child in &element.children {
        walk_component(child, &path, analysis);
    }
}

fn walk_product(element: &RawElement, parent_path: &str, analysis: &mut Analysis) {
    let path = format!("{parent_path}/{}", element.name);
    check_id(&element.name, &path, &mut analysis.issues);
    check_plain(element, &path, &mut analysis.issues);
    analysis
        .node_ids
        .push((element.name.clone(), path.clone(), false));

    let mut container: Option<&RawElement> = None;
    let mut versions: Vec<&RawElement> = Vec::new();
    for (index, child) in element.children.iter().enumerate() {
        if child.name == REPOSITORY_NAME {
            if container.is_none() {
                if index != 0 {
                    analysis.issues.push(Issue {
                        rule: Rule::ProductShape,
                        location: path.clone(),
                        message: format!("<{REPOSITORY_NAME}> must be the first child"),
                    });
                }
                container = Some(child);
            } else {
                analysis.issues.push(Issue {
                    rule: Rule::ProductShape,
                    location: path.clone(),
                    message: format!("more than one <{REPOSITORY_NAME}> child"),
                });
            }
        } else {
            versions.push(child);
        }
    }
    match container {
        None => analysis.issues.push(Issue {
            rule: Rule::ProductShape,
            location: path.clone(),
            message: format!("missing <{REPOSITORY_NAME}> composition container"),
        }),
        Some(container) => {
            let container_path = format!("{path}/{REPOSITORY_NAME}");
            check_plain(container, &container_path, &mut analysis.issues);
            for referee in &container.children {
                let referee_path = format!("{container_path}/{}", referee.name);
                check_id(&referee.name, &referee_path, &mut analysis.issues);
                check_plain(referee, &referee_path, &mut analysis.issues);
                if !referee.children.is_empty() {
                    analysis.issues.push(Issue {
                        rule: Rule::CompositionShape,
                        location: referee_path.clone(),
                        message: "composition entries must be empty elements".to_owned(),
                    });
                }
                analysis
                    .refs
                    .push((referee.name.clone(), referee_path, path.clone()));
            }
        }
    }
    for version in versions {
        walk_product(version, &path, analysis);
    }
}

fn check_id(name: &str, path: &str, issues: &mut Vec<Issue>) {
    if let Some(reason) = NodeId::syntax_error(name) {
        issues.push(Issue {
            rule: Rule::IdSyntax,
            location: path.to_owned(),
            message: format!("{name:?}: {reason}"),
        });
    }
}

fn check_plain(element: &RawElement, path: &str, issues: &mut Vec<Issue>) {
    if !element.attrs.is_empty() {
        issues.push(Issue {
            rule: Rule::NoAttributes,
            location: path.to_owned(),
            message: format!("unexpected attribute {:?}", element.attrs[0].0),
        });
    }
    if !element.text.trim().is_empty() {
        issues.push(Issue {
            rule: Rule::NoText,
            location: path.to_owned(),
            message: "unexpected character data".to_owned(),
        });
    }
}

// ---------------------------------------------------------------------------
// Tree construction (documents that passed analysis)
// ---------------------------------------------------------------------------

fn build(root: &RawElement) -> DevelopmentTree {
    let mut tree = DevelopmentTree::new();
    let repository = root
        .children
        .iter()
        .find(|c| c.name == REPOSITORY_NAME)
        .expect("analysis guarantees the repository child");
    for component in &repository.children {
        build_component(&mut tree, component, None);
    }
    let products = root
        .children
        .iter()
        .find(|c| c.name == PRODUCTS_NAME)
        .expect("analysis guarantees the products container");
    for product in &products.children {
        build_product(&mut tree, product, None);
    }
    tree
}

fn build_component(tree: &mut DevelopmentTree, element: &RawElement, parent: Option<&NodeId>) {
    let id = NodeId::new(element.name.clone()).expect("analysis validated ids");
    match parent {
        None => tree.add_component(id.clone()),
        Some(base) => tree.add_component_version(base, id.clone()),
    }
    .expect("analysis validated the document");
    for child in &element.children {
        build_component(tree, child, Some(&id));
    }
}

fn build_product(tree: &mut DevelopmentTree, element: &RawElement, parent: Option<&NodeId>) {
    let id = NodeId::new(element.name.clone()).expect("analysis validated ids");
    let container = &element.children[0];
    let composition: Vec<NodeId> = container
        .children
        .iter()
        .map(|r| NodeId::new(r.name.clone()).expect("analysis validated ids"))
        .collect();
    match parent {
        None => {
            tree.add_product(id.clone()).expect("analysis validated the document");
            for referee in &composition {
                tree.add_to_composition(&id, referee)
                    .expect("analysis validated the document");
            }
        }
        Some(base) => {
            tree.add_product_version(base, id.clone(), &composition)
                .expect("analysis validated the document");
        }
    }
    for version in &element.children[1..] {
        build_product(tree, version, Some(&id));
    }
}

// ---------------------------------------------------------------------------
// Canonical writing
// ---------------------------------------------------------------------------

/// Line-oriented writer producing the canonical byte layout. Shared with the
/// metadata sidecar so both files look the same.
pub(crate) struct CanonicalWriter {
    out: String,
    depth: usize,
}

impl CanonicalWriter {
    pub(crate) fn new() -> Self {
        let mut out = String::new();
        out.push_str(XML_DECL);
        out.push('\n');
        out.push_str(FORMAT_COMMENT);
        out.push('\n');
        CanonicalWriter { out, depth: 0 }
    }

    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    pub(crate) fn open(&mut self, name: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    pub(crate) fn open_with_id(&mut self, name: &str, id: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        self.out.push_str(" id=\"");
        escape_into(id, &mut self.out);
        self.out.push_str("\">\n");
        self.depth += 1;
    }

    pub(crate) fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub(crate) fn leaf(&mut self, name: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        self.out.push_str("></");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub(crate) fn text_element(&mut self, name: &str, text: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(name);
        self.out.push('>');
        escape_into(text, &mut self.out);
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    pub(crate) fn finish(self) -> String {
        debug_assert_eq!(self.depth, 0);
        self.out
    }
}

fn escape_into(value: &str, out: &mut String) {
    for ch in value.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{id, sample_tree};

    const EMPTY_DOC: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <!-- spltree format 1 -->\n\
         <Software_Product_Line>\n\
         \x20 <Core_Asset_Repository></Core_Asset_Repository>\n\
         \x20 <Product></Product>\n\
         </Software_Product_Line>\n";

    #[test]
    fn empty_tree_serializes_to_the_fixed_skeleton() {
        assert_eq!(to_xml(&DevelopmentTree::new()).unwrap(), EMPTY_DOC);
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = to_xml(&sample_tree()).unwrap();
        let b = to_xml(&sample_tree()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn product_version_nests_inside_its_base() {
        let mut tree = sample_tree();
        tree.add_product_version(&id("P1"), id("P1v2"), &[id("C4")])
            .unwrap();
        let doc = to_xml(&tree).unwrap();
        let expected = "    <P1>\n\
             \x20     <Core_Asset_Repository>\n\
             \x20       <C1></C1>\n\
             \x20       <C2></C2>\n\
             \x20       <C3></C3>\n\
             \x20     </Core_Asset_Repository>\n\
             \x20     <P1v2>\n\
             \x20       <Core_Asset_Repository>\n\
             \x20         <C4></C4>\n\
             \x20       </Core_Asset_Repository>\n\
             \x20     </P1v2>\n\
             \x20   </P1>\n";
        assert!(doc.contains(expected), "document was:\n{doc}");
    }

    #[test]
    fn round_trips_the_sample_tree() {
        let tree = sample_tree();
        let doc = to_xml(&tree).unwrap();
        let rebuilt = from_xml(&doc).unwrap();
        assert_eq!(rebuilt, tree);
        assert_eq!(to_xml(&rebuilt).unwrap(), doc);
    }

    #[test]
    fn reads_hand_written_layouts() {
        // Whitespace-free, self-closing tags, no format comment.
        let doc = "<?xml version=\"1.0\" ?><Software_Product_Line>\
             <Core_Asset_Repository><C1><C4/></C1><C3/></Core_Asset_Repository>\
             <Product><P1><Core_Asset_Repository><C4/></Core_Asset_Repository></P1></Product>\
             </Software_Product_Line>";
        let tree = from_xml(doc).unwrap();
        assert_eq!(tree.version_history(&id("C4")).unwrap(), vec![id("C1"), id("C4")]);
        assert_eq!(tree.composition(&id("P1")).unwrap(), vec![id("C4")]);
        // Canonicalization is idempotent.
        let first = to_xml(&tree).unwrap();
        let second = to_xml(&from_xml(&first).unwrap()).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn malformed_text_is_a_parse_error() {
        for doc in [
            "",
            "<Software_Product_Line>",
            "<a><b></a></b>",
            "<a></a><b></b>",
            "junk",
        ] {
            assert!(
                matches!(from_xml(doc), Err(XmlError::Parse(_))),
                "{doc:?} should fail to parse"
            );
            let report = validate(doc);
            assert!(!report.valid);
            assert_eq!(report.issues[0].rule, Rule::WellFormed);
        }
    }

    #[test]
    fn dangling_reference_is_its_own_error() {
        let doc = "<Software_Product_Line>\
             <Core_Asset_Repository><C1></C1></Core_Asset_Repository>\
             <Product><P2><Core_Asset_Repository><C9/></Core_Asset_Repository></P2></Product>\
             </Software_Product_Line>";
        match from_xml(doc) {
            Err(XmlError::DanglingReference { referee, .. }) => assert_eq!(referee, "C9"),
            other => panic!("expected dangling reference, got {other:?}"),
        }
        let report = validate(doc);
        assert_eq!(report.issues.len(), 1);
        assert_eq!(report.issues[0].rule, Rule::DanglingRef);
    }

    #[test]
    fn validator_reports_every_violation() {
        // Wrong root name plus a dangling reference: both must show up.
        let doc = "<SPL>\
             <Core_Asset_Repository><C1></C1></Core_Asset_Repository>\
             <Product><P1><Core_Asset_Repository><C9/></Core_Asset_Repository></P1></Product>\
             </SPL>";
        let report = validate(doc);
        let rules: Vec<Rule> = report.issues.iter().map(|i| i.rule).collect();
        assert_eq!(rules, vec![Rule::RootName, Rule::DanglingRef]);
    }

    #[test]
    fn validation_rule_matrix() {
        let cases: Vec<(&str, Rule)> = vec![
            (
                // products container before the repository
                "<Software_Product_Line><Product></Product>\
                 <Core_Asset_Repository></Core_Asset_Repository></Software_Product_Line>",
                Rule::RootShape,
            ),
            (
                // missing repository child
                "<Software_Product_Line><Product></Product></Software_Product_Line>",
                Rule::RootShape,
            ),
            (
                // two repository children at root
                "<Software_Product_Line><Core_Asset_Repository></Core_Asset_Repository>\
                 <Core_Asset_Repository></Core_Asset_Repository>\
                 <Product></Product></Software_Product_Line>",
                Rule::RootShape,
            ),
            (
                // well-formed XML name outside the id grammar
                "<Software_Product_Line><Core_Asset_Repository><x1><a:b/></x1>\
                 </Core_Asset_Repository><Product></Product></Software_Product_Line>",
                Rule::IdSyntax,
            ),
            (
                // duplicate id: version repeats a sibling base name
                "<Software_Product_Line><Core_Asset_Repository><C1><C2/></C1><C2/>\
                 </Core_Asset_Repository><Product></Product></Software_Product_Line>",
                Rule::UniqueIds,
            ),
            (
                // product without composition container
                "<Software_Product_Line><Core_Asset_Repository></Core_Asset_Repository>\
                 <Product><P1></P1></Product></Software_Product_Line>",
                Rule::ProductShape,
            ),
            (
                // composition entry with children
                "<Software_Product_Line><Core_Asset_Repository><C1><C4/></C1>\
                 </Core_Asset_Repository><Product><P1><Core_Asset_Repository>\
                 <C1><C4/></C1></Core_Asset_Repository></P1></Product></Software_Product_Line>",
                Rule::CompositionShape,
            ),
            (
                // same component twice in one composition
                "<Software_Product_Line><Core_Asset_Repository><C1/></Core_Asset_Repository>\
                 <Product><P1><Core_Asset_Repository><C1/><C1/></Core_Asset_Repository></P1>\
                 </Product></Software_Product_Line>",
                Rule::DuplicateEntry,
            ),
            (
                // stray attribute
                "<Software_Product_Line><Core_Asset_Repository><C1 version=\"2\"/>\
                 </Core_Asset_Repository><Product></Product></Software_Product_Line>",
                Rule::NoAttributes,
            ),
            (
                // character data inside a component
                "<Software_Product_Line><Core_Asset_Repository><C1>source</C1>\
                 </Core_Asset_Repository><Product></Product></Software_Product_Line>",
                Rule::NoText,
            ),
        ];
        for (doc, expected) in cases {
            let report = validate(doc);
            assert!(!report.valid, "expected {expected:?} for {doc}");
            assert_eq!(
                report.issues.iter().map(|i| i.rule).collect::<Vec<_>>(),
                vec![expected],
                "wrong issues for {doc}"
            );
            assert!(from_xml(doc).is_err());
        }
    }

    #[test]
    fn ref_naming_a_product_is_dangling() {
        let doc = "<Software_Product_Line>\
             <Core_Asset_Repository><C1/></Core_Asset_Repository>\
             <Product><P1><Core_Asset_Repository><P1/></Core_Asset_Repository></P1></Product>\
             </Software_Product_Line>";
        let report = validate(doc);
        assert_eq!(
            report.issues.iter().map(|i| i.rule).collect::<Vec<_>>(),
            vec![Rule::DanglingRef]
        );
    }

    #[test]
    fn to_xml_refuses_broken_trees() {
        let mut tree = sample_tree();
        tree.nodes
            .get_mut(&id("P2"))
            .unwrap()
            .composition
            .push(NodeId::fixed("C9"));
        assert!(matches!(to_xml(&tree), Err(TreeError::InvalidTree(_))));
    }

    #[test]
    fn doctype_and_comments_are_tolerated() {
        let doc = "<?xml version=\"1.0\"?>\n\
             <!DOCTYPE Software_Product_Line>\n\
             <!-- exported by hand -->\n\
             <Software_Product_Line>\n\
             <Core_Asset_Repository><C1/></Core_Asset_Repository>\n\
             <Product></Product>\n\
             </Software_Product_Line>";
        let tree = from_xml(doc).unwrap();
        assert_eq!(tree.list_core_assets(), vec![id("C1")]);
    }
}
