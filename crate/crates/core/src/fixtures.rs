//! Small complexes shipped with the crate, parsed from the `fixtures/`
//! directory.

use crate::cwx::{parse, Document};

pub const FIG1: &str = include_str!("../fixtures/fig1.cwx");
pub const FIG1_SD: &str = include_str!("../fixtures/fig1_sd.cwx");
pub const DISC: &str = include_str!("../fixtures/disc.cwx");
pub const DISC_CA5: &str = include_str!("../fixtures/disc_ca5.cwx");
pub const DISC_BAD: &str = include_str!("../fixtures/disc_bad.cwx");
pub const HOLLOW_TRIANGLE: &str = include_str!("../fixtures/hollow_triangle.cwx");
pub const SQUARE_FRONTIER_FAIL: &str = include_str!("../fixtures/square_frontier_fail.cwx");
pub const CYCLIC_MVF: &str = include_str!("../fixtures/cyclic_mvf.cwx");

/// Every fixture by file stem.
pub const ALL: [(&str, &str); 8] = [
    ("fig1", FIG1),
    ("fig1_sd", FIG1_SD),
    ("disc", DISC),
    ("disc_ca5", DISC_CA5),
    ("disc_bad", DISC_BAD),
    ("hollow_triangle", HOLLOW_TRIANGLE),
    ("square_frontier_fail", SQUARE_FRONTIER_FAIL),
    ("cyclic_mvf", CYCLIC_MVF),
];

fn load(text: &str) -> Document {
    parse(text).expect("shipped fixtures parse")
}

/// A vertex `v` with four pendant edges.
pub fn fig1() -> Document {
    load(FIG1)
}

/// Expected subdivision of [`fig1`].
pub fn fig1_sd() -> Document {
    load(FIG1_SD)
}

/// Solid triangle with `f(ca) = 1.5`.
pub fn disc() -> Document {
    load(DISC)
}

/// Solid triangle with `f(ca) = 5`.
pub fn disc_ca5() -> Document {
    load(DISC_CA5)
}

/// Solid triangle whose function fails halo membership at `ca`.
pub fn disc_bad() -> Document {
    load(DISC_BAD)
}

pub fn hollow_triangle() -> Document {
    load(HOLLOW_TRIANGLE)
}

/// A square with a stratification that breaks the frontier axiom at `e1`.
pub fn square_frontier_fail() -> Document {
    load(SQUARE_FRONTIER_FAIL)
}

/// Hollow triangle with a cyclic multivector field.
pub fn cyclic_mvf() -> Document {
    load(CYCLIC_MVF)
}

pub fn all() -> Vec<Document> {
    ALL.iter().map(|(_, text)| load(text)).collect()
}
