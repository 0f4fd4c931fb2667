//! Material groupoids and double groupoids for discretized elastic bodies.
//!
//! The crate builds the groupoid of material isomorphisms of a discretized
//! body, intersects the groupoids of the constituents of a binary composite,
//! constructs the associated double groupoid and its core, classifies the
//! composite symmetry through the orthogonal normalizer of C = HᵀH, and
//! recovers material isomorphisms numerically from stored-energy functions.

pub mod body;
pub mod classifier;
pub mod cli;
pub mod double;
pub mod fixtures;
pub mod groupoid;
pub mod groups;
pub mod linalg;
pub mod report;
pub mod solver;
