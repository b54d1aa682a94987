//! Weights, canonical distance graphs, symbolic successors and the
//! LU-abstraction inclusion and membership tests.

mod bounds;
mod graph;
mod valuation;
mod weight;

pub use bounds::{Bound, ClockSet, LuBounds};
pub use graph::{alu_member, alu_subset, min_graph, zone_subset, DistanceGraph, Zone};
pub use valuation::Valuation;
pub use weight::{compare_by_definition, Strictness, Weight, MAX_CONSTANT};

#[cfg(test)]
mod tests;
