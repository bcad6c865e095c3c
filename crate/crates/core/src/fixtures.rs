//! Bundled example contexts and posets.

use crate::context::{parse_cxt, FormalContext};
use crate::reduction::Poset;

pub const FORUM_ROMANUM_CXT: &str = include_str!("../fixtures/forum_romanum.cxt");
pub const CONTRANOMINAL3_CXT: &str = include_str!("../fixtures/contranominal3.cxt");
pub const DAS_CXT: &str = include_str!("../fixtures/das.cxt");
pub const ODD_CYCLE_PERSISTS_CXT: &str = include_str!("../fixtures/odd_cycle_persists.cxt");
pub const STANDARD_EXAMPLE_S3_JSON: &str = include_str!("../fixtures/standard_example_s3.json");
pub const GRID_2X2_JSON: &str = include_str!("../fixtures/grid_2x2.json");

/// Roman monuments and their architectural features, 14 × 7 with 44 crosses.
pub fn forum_romanum() -> FormalContext {
    parse_cxt(FORUM_ROMANUM_CXT).expect("bundled fixture parses")
}

/// The 3 × 3 contranominal scale.
pub fn contranominal3() -> FormalContext {
    parse_cxt(CONTRANOMINAL3_CXT).expect("bundled fixture parses")
}

/// 7 × 7 context whose pair `(6, f)` must lie in both factors.
pub fn das() -> FormalContext {
    parse_cxt(DAS_CXT).expect("bundled fixture parses")
}

/// 18 × 18 context where a minimal odd cycle transversal does not yield a
/// two-factorizable context.
pub fn odd_cycle_persists() -> FormalContext {
    parse_cxt(ODD_CYCLE_PERSISTS_CXT).expect("bundled fixture parses")
}

/// The inclusion-minimal transversal of [`odd_cycle_persists`] whose removal
/// creates a fresh odd cycle, as `(object, attribute)` names.
pub const ODD_CYCLE_PERSISTS_TRANSVERSAL: [(&str, &str); 17] = [
    ("6", "j"),
    ("4", "n"),
    ("7", "p"),
    ("18", "p"),
    ("6", "p"),
    ("6", "n"),
    ("12", "k"),
    ("10", "g"),
    ("6", "g"),
    ("5", "p"),
    ("2", "i"),
    ("4", "p"),
    ("12", "m"),
    ("3", "i"),
    ("12", "h"),
    ("1", "p"),
    ("2", "q"),
];

/// The bipartition of [`das`] without the isolated pair `(6, f)`, one string
/// per object: `1` and `2` mark the class of each incident pair.
pub const DAS_CLASSES: [&str; 7] =
    ["...1111", ".....11", "......1", "2......", "2....2.", "22..1.1", "222..2."];

/// Standard example S₃: `a_i < b_j` iff `i ≠ j`; order dimension three.
pub fn standard_example_s3() -> Poset {
    Poset::from_json(STANDARD_EXAMPLE_S3_JSON).expect("bundled fixture parses")
}

/// Product of two 2-chains.
pub fn grid_2x2() -> Poset {
    Poset::from_json(GRID_2X2_JSON).expect("bundled fixture parses")
}
