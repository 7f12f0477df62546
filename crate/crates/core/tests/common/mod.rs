#![allow(dead_code)]

use okapain_core::atlas::{load_atlas_file, Atlas};
use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn e7() -> Atlas {
    load_atlas_file(data_path("e7.atlas")).expect("e7 loads")
}

pub fn a8() -> Atlas {
    load_atlas_file(data_path("a8.atlas")).expect("a8 loads")
}

/// Load a shipped atlas with one piece of text replaced.
pub fn patched(name: &str, from: &str, to: &str) -> Atlas {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    assert!(text.contains(from), "{from} not in {name}");
    okapain_core::atlas::load_atlas(&text.replacen(from, to, 1)).expect("patched atlas loads")
}
