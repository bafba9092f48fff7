//! The on-disk store: a tree document plus its metadata sidecar.
//!
//! Mutating commands take an advisory exclusive lock on `<tree>.lock` for
//! their whole duration and rewrite files atomically (temp file in the same
//! directory, then rename), so concurrent readers always see a consistent
//! snapshot.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fs2::FileExt;

use spltree::{from_xml, load_metadata, save_metadata, to_xml, DevelopmentTree, MetadataDocument};

use crate::error::{io_error, CliError};

/// Paths of the two store files. The sidecar sits beside the tree file with
/// `.meta` spliced in before the `.xml` suffix.
#[derive(Debug, Clone)]
pub struct StoreLocator {
    pub tree_path: PathBuf,
    pub meta_path: PathBuf,
}

impl StoreLocator {
    pub fn new(tree_path: PathBuf) -> Self {
        let meta_path = meta_path_for(&tree_path);
        StoreLocator {
            tree_path,
            meta_path,
        }
    }
}

fn meta_path_for(tree_path: &Path) -> PathBuf {
    let name = tree_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let meta_name = match name.strip_suffix(".xml") {
        Some(stem) => format!("{stem}.meta.xml"),
        None => format!("{name}.meta.xml"),
    };
    tree_path.with_file_name(meta_name)
}

/// In-memory image of the two files.
#[derive(Debug, Clone)]
pub struct Store {
    pub tree: DevelopmentTree,
    pub meta: MetadataDocument,
}

/// Reads both files. The sidecar may be absent; an absent sidecar is an
/// empty document.
pub fn load(locator: &StoreLocator) -> Result<Store, CliError> {
    let text = fs::read_to_string(&locator.tree_path).map_err(io_error(&locator.tree_path))?;
    let tree = from_xml(&text)?;
    let meta = if locator.meta_path.exists() {
        let text = fs::read_to_string(&locator.meta_path).map_err(io_error(&locator.meta_path))?;
        load_metadata(&text)?
    } else {
        MetadataDocument::new()
    };
    Ok(Store { tree, meta })
}

/// Writes both files atomically.
pub fn save(locator: &StoreLocator, store: &Store) -> Result<(), CliError> {
    let tree_doc = to_xml(&store.tree).map_err(CliError::Domain)?;
    write_atomic(&locator.tree_path, tree_doc.as_bytes())?;
    write_atomic(&locator.meta_path, save_metadata(&store.meta).as_bytes())?;
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut temp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_error(path))?;
    temp.write_all(bytes).map_err(io_error(path))?;
    temp.as_file().sync_all().map_err(io_error(path))?;
    temp.persist(path)
        .map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e.error,
        })?;
    Ok(())
}

/// Advisory exclusive lock over the store, held until dropped.
#[derive(Debug)]
pub struct StoreLock {
    _file: fs::File,
}

impl StoreLock {
    pub fn acquire(locator: &StoreLocator) -> Result<Self, CliError> {
        let path = lock_path(&locator.tree_path);
        let file = fs::OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)
            .map_err(io_error(&path))?;
        file.lock_exclusive().map_err(io_error(&path))?;
        Ok(StoreLock { _file: file })
    }
}

fn lock_path(tree_path: &Path) -> PathBuf {
    let mut name = tree_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".lock");
    tree_path.with_file_name(name)
}
