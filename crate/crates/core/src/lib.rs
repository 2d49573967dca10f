//! Divisor theory on metric graphs and degree-3 harmonic covers of trees.

pub mod divisor;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod iso;
pub mod metric;
pub mod moduli;
pub mod morphism;
pub mod rational;
pub mod search;
pub mod trigonal;

pub use error::{Error, Result};
pub use graph::{are_isomorphic, EdgeCut, WeightedGraph};
