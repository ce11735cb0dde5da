//! Exact enumeration and generating-function analysis of double-star
//! (degree-pair edge) occurrences in random unlabeled trees, with the
//! Randić-index and average-distance applications built on top.

pub mod asymptotics;
pub mod distlab;
pub mod exact;
pub mod pattern_gf;
pub mod pseries;
pub mod randic_app;
pub mod treelab;

pub use treelab::{CaseKind, FreeTree, PatternSpec, SimpleGraph};
