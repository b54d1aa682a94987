//! Model text format, benchmark families and random automata.

mod families;
mod parse;
mod random;

pub use families::{family_state_name, generate, Family, FamilySpec};
pub use parse::{format_guard, format_transition, parse, serialize};
pub use random::{random_ta, RandomParams};
