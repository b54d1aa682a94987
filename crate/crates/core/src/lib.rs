//! Reachability checking for timed automata with lazily inferred LU
//! abstraction bounds.

pub mod automaton;
pub mod error;
pub mod zone;
pub mod model;
pub mod reach;
pub mod audit;
