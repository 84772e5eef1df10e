pub mod algorithms;
pub mod bitset;
pub mod connected;
pub mod containers;
pub mod error;
pub mod expansion;
pub mod graph;
pub mod instances;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use graph::{BipartiteGraph, ExpanderCheck, ExpanderVerdict, ExpansionParams, Side, SideSet};
pub use instances::{generate, InstanceSpec};
pub mod oracle;
pub mod polymer;
pub mod simple;
