//! Exact cutwidth of multigraphs by reduction and compression, plus tools
//! for studying immersion obstructions.

pub mod buckets;
pub mod compress;
pub mod error;
pub mod flow;
pub mod format;
pub mod multigraph;
pub mod obstructions;
pub mod oracle;
pub mod ordering;
pub mod reduce;
pub mod solver;

pub use error::{Error, Result};
pub use multigraph::{MultiGraph, VertexSet};
pub use ordering::Ordering;
