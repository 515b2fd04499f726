#![allow(dead_code)]

pub mod mock;
pub mod oracles;

use std::path::PathBuf;

use dlgd::ingest::read_series_path;
use dlgd::series::{align, AlignedPair};

/// Seed of the committed crisis-shaped fixture.
pub const CRISIS_FIXTURE_SEED: u64 = 2008;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn crisis_fixture_paths() -> (PathBuf, PathBuf) {
    let dir = fixture_dir().join("crisis_shaped");
    (dir.join("rd.csv"), dir.join("lgd.csv"))
}

/// The committed crisis-shaped fixture, read back through the CSV reader.
pub fn crisis_fixture() -> AlignedPair {
    let (rd, lgd) = crisis_fixture_paths();
    let rd = read_series_path(&rd).unwrap().series;
    let lgd = read_series_path(&lgd).unwrap().series;
    align(&rd, &lgd).unwrap()
}
