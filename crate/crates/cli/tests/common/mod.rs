//! Helpers for driving the compiled binary in tests.

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct CmdResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_spltree")
}

/// Runs the binary with `SPLTREE_STORE` pointing at `store`.
pub fn spltree(store: &Path, args: &[&str]) -> CmdResult {
    let output = Command::new(binary())
        .args(args)
        .env("SPLTREE_STORE", store)
        .output()
        .expect("failed to spawn the spltree binary");
    CmdResult {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8(output.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(output.stderr).expect("stderr is UTF-8"),
    }
}

pub fn expect_ok(store: &Path, args: &[&str]) -> String {
    let result = spltree(store, args);
    assert_eq!(
        result.code, 0,
        "command {args:?} failed: {}",
        result.stderr
    );
    result.stdout
}

/// Builds the worked-example store in `dir` and returns the tree path.
pub fn build_sample_store(dir: &Path) -> PathBuf {
    let store = dir.join("line.spl.xml");
    expect_ok(&store, &["init", store.to_str().unwrap()]);
    for cmd in [
        vec!["add-component", "C1"],
        vec!["add-component", "C2"],
        vec!["add-component", "C3"],
        vec!["add-version", "C1", "C4"],
        vec!["add-version", "C2", "C5"],
        vec!["add-product", "P1"],
        vec!["compose", "P1", "C1", "C2", "C3"],
        vec!["add-product", "P2"],
        vec!["compose", "P2", "C4", "C5"],
    ] {
        expect_ok(&store, &cmd);
    }
    store
}

/// Byte snapshot of both store files (sidecar may be absent).
pub fn snapshot(store: &Path) -> (Vec<u8>, Option<Vec<u8>>) {
    let tree = std::fs::read(store).expect("tree file exists");
    let meta = std::fs::read(meta_path(store)).ok();
    (tree, meta)
}

pub fn meta_path(store: &Path) -> PathBuf {
    let name = store.file_name().unwrap().to_str().unwrap();
    let meta = match name.strip_suffix(".xml") {
        Some(stem) => format!("{stem}.meta.xml"),
        None => format!("{name}.meta.xml"),
    };
    store.with_file_name(meta)
}
