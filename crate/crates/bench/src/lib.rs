//! Fixtures shared by the benchmarks.

use openimage_core::io::{bundled, parse_spec, SpecDocument};
use openimage_core::GroupTower;

pub fn example(name: &str) -> SpecDocument {
    parse_spec(bundled(name).expect("bundled example")).expect("bundled examples parse")
}

/// The tower of a bundled example truncated to `level`.
pub fn tower(name: &str, level: u32) -> (SpecDocument, GroupTower) {
    let doc = example(name);
    let t = doc.tower(Some(level), Some(1_000_000)).expect("bundled tower");
    (doc, t)
}
