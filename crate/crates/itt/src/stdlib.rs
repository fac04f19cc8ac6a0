//! Locating the bundled `.itt` library.

use std::path::PathBuf;

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../stdlib")
}

pub fn manifest() -> PathBuf {
    dir().join("manifest.txt")
}
