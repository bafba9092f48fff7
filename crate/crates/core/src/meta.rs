//! Per-node metadata and its XML sidecar file.
//!
//! The sidecar lives beside the tree document and keys records by an `id`
//! attribute instead of the element name, so the tree file stays bit-pure
//! while both files share one toolchain. Entries are written sorted by id;
//! dates are strict zero-padded year-month-day.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::error::{TreeError, XmlError};
use crate::model::{DevelopmentTree, MetadataRecord, NodeId, TestResult};
use crate::xml::{parse_raw, CanonicalWriter, RawElement};

const META_ROOT: &str = "Metadata";
const NODE_ELEMENT: &str = "Node";
const AUTHOR: &str = "Author";
const DEVELOPED: &str = "DevelopedDate";
const RELEASED: &str = "ReleaseDate";
const TESTED: &str = "TestDate";
const RESULT: &str = "TestResult";
const NOTES: &str = "Notes";
const FIELDS: [&str; 6] = [AUTHOR, DEVELOPED, RELEASED, TESTED, RESULT, NOTES];

/// All metadata records, keyed by node id.
///
/// Agreement with a tree is never assumed; [`MetadataDocument::reconcile`]
/// checks it explicitly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataDocument {
    entries: BTreeMap<NodeId, MetadataRecord>,
}

impl MetadataDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Inserts or replaces the record for `id`. Last write wins.
    pub fn set(&mut self, id: NodeId, record: MetadataRecord) -> Result<(), TreeError> {
        record.validate()?;
        self.entries.insert(id, record);
        Ok(())
    }

    pub fn get(&self, id: &NodeId) -> Option<&MetadataRecord> {
        self.entries.get(id)
    }

    pub fn remove(&mut self, id: &NodeId) -> Option<MetadataRecord> {
        self.entries.remove(id)
    }

    /// Moves a record to a new key when a node is renamed.
    pub fn rename(&mut self, old: &NodeId, new: NodeId) {
        if let Some(record) = self.entries.remove(old) {
            self.entries.insert(new, record);
        }
    }

    /// Ids carrying metadata, in sorted order.
    pub fn ids(&self) -> impl Iterator<Item = &NodeId> {
        self.entries.keys()
    }

    /// Ids present here but absent from the tree, in sorted order.
    pub fn reconcile(&self, tree: &DevelopmentTree) -> Vec<NodeId> {
        self.entries
            .keys()
            .filter(|id| !tree.contains(id))
            .cloned()
            .collect()
    }
}

/// Strict calendar-date parsing: exactly `YYYY-MM-DD`, zero padded.
pub fn parse_date(value: &str) -> Option<NaiveDate> {
    let bytes = value.as_bytes();
    if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
        return None;
    }
    for (i, b) in bytes.iter().enumerate() {
        if i != 4 && i != 7 && !b.is_ascii_digit() {
            return None;
        }
    }
    let year: i32 = value[0..4].parse().ok()?;
    let month: u32 = value[5..7].parse().ok()?;
    let day: u32 = value[8..10].parse().ok()?;
    NaiveDate::from_ymd_opt(year, month, day)
}

/// Serializes the document canonically; an empty document is the bare
/// `<Metadata></Metadata>` root.
pub fn save_metadata(doc: &MetadataDocument) -> String {
    let mut writer = CanonicalWriter::new();
    if doc.entries.is_empty() {
        writer.leaf(META_ROOT);
        return writer.finish();
    }
    writer.open(META_ROOT);
    for (id, record) in &doc.entries {
        writer.open_with_id(NODE_ELEMENT, id.as_str());
        writer.text_element(AUTHOR, &record.author);
        writer.text_element(DEVELOPED, &record.developed_date.to_string());
        if let Some(date) = record.release_date {
            writer.text_element(RELEASED, &date.to_string());
        }
        if let Some(date) = record.test_date {
            writer.text_element(TESTED, &date.to_string());
        }
        if let Some(result) = record.test_result {
            writer.text_element(RESULT, result.as_str());
        }
        if let Some(notes) = &record.notes {
            writer.text_element(NOTES, notes);
        }
        writer.close(NODE_ELEMENT);
    }
    writer.close(META_ROOT);
    writer.finish()
}

/// Parses a sidecar document; inverts [`save_metadata`] exactly.
pub fn load_metadata(text: &str) -> Result<MetadataDocument, XmlError> {
    let root = parse_raw(text).map_err(XmlError::Parse)?;
    if root.name != META_ROOT {
        return Err(schema(
            "meta-root",
            format!("/{}", root.name),
            format!("document element is <{}>, expected <{META_ROOT}>", root.name),
        ));
    }
    let root_path = format!("/{META_ROOT}");
    expect_plain(&root, &root_path)?;

    let mut doc = MetadataDocument::new();
    for node in &root.children {
        let record_path = format!("{root_path}/{NODE_ELEMENT}");
        if node.name != NODE_ELEMENT {
            return Err(schema(
                "meta-shape",
                format!("{root_path}/{}", node.name),
                format!("unexpected element <{}>", node.name),
            ));
        }
        let id = match node.attrs.as_slice() {
            [(key, value)] if key == "id" => NodeId::new(value.clone()).map_err(|e| {
                schema("meta-id", record_path.clone(), e.to_string())
            })?,
            _ => {
                return Err(schema(
                    "meta-shape",
                    record_path,
                    format!("<{NODE_ELEMENT}> needs exactly one id attribute"),
                ))
            }
        };
        let record_path = format!("{root_path}/{NODE_ELEMENT}[{id}]");
        if !node.text.trim().is_empty() {
            return Err(schema("meta-shape", record_path, "unexpected character data".into()));
        }
        if doc.entries.contains_key(&id) {
            return Err(schema(
                "meta-id",
                record_path,
                format!("duplicate id {id}"),
            ));
        }
        let record = parse_record(node, &record_path)?;
        record
            .validate()
            .map_err(|e| schema("meta-record", record_path.clone(), e.to_string()))?;
        doc.entries.insert(id, record);
    }
    Ok(doc)
}

fn parse_record(node: &RawElement, path: &str) -> Result<MetadataRecord, XmlError> {
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for field in &node.children {
        let field_path = format!("{path}/{}", field.name);
        let name = FIELDS
            .iter()
            .find(|f| **f == field.name)
            .ok_or_else(|| {
                schema(
                    "meta-shape",
                    field_path.clone(),
                    format!("unknown element <{}>", field.name),
                )
            })?;
        expect_plain_fields(field, &field_path)?;
        if !field.children.is_empty() {
            return Err(schema(
                "meta-shape",
                field_path.clone(),
                "field elements hold text only".into(),
            ));
        }
        if fields.insert(name, field.text.as_str()).is_some() {
            return Err(schema(
                "meta-shape",
                field_path,
                format!("<{}> given twice", field.name),
            ));
        }
    }

    let author = fields
        .get(AUTHOR)
        .ok_or_else(|| schema("meta-shape", path.to_owned(), format!("missing <{AUTHOR}>")))?;
    let developed = fields
        .get(DEVELOPED)
        .ok_or_else(|| schema("meta-shape", path.to_owned(), format!("missing <{DEVELOPED}>")))?;

    let date_field = |name: &str, value: &str| -> Result<NaiveDate, XmlError> {
        parse_date(value).ok_or_else(|| {
            schema(
                "meta-date",
                format!("{path}/{name}"),
                format!("{value:?} is not a zero-padded YYYY-MM-DD date"),
            )
        })
    };

    let mut record = MetadataRecord::new(author.to_string(), date_field(DEVELOPED, developed)?);
    if let Some(value) = fields.get(RELEASED) {
        record.release_date = Some(date_field(RELEASED, value)?);
    }
    if let Some(value) = fields.get(TESTED) {
        record.test_date = Some(date_field(TESTED, value)?);
    }
    if let Some(value) = fields.get(RESULT) {
        record.test_result = Some(TestResult::parse(value).ok_or_else(|| {
            schema(
                "meta-result",
                format!("{path}/{RESULT}"),
                format!("{value:?} is not pass, fail, or untested"),
            )
        })?);
    }
    if let Some(value) = fields.get(NOTES) {
        record.notes = Some(value.to_string());
    }
    Ok(record)
}

fn schema(rule: &str, location: String, message: String) -> XmlError {
    XmlError::Schema {
        rule: rule.to_owned(),
        location,
        message,
    }
}

fn expect_plain(element: &RawElement, path: &str) -> Result<(), XmlError> {
    if !element.attrs.is_empty() {
        return Err(schema(
            "meta-shape",
            path.to_owned(),
            format!("unexpected attribute {:?}", element.attrs[0].0),
        ));
    }
    if !element.text.trim().is_empty() {
        return Err(schema("meta-shape", path.to_owned(), "unexpected character data".into()));
    }
    Ok(())
}

fn expect_plain_fields(element: &RawElement, path: &str) -> Result<(), XmlError> {
    if !element.attrs.is_empty() {
        return Err(schema(
            "meta-shape",
            path.to_owned(),
            format!("unexpected attribute {:?}", element.attrs[0].0),
        ));
    }
    Ok(())
}
