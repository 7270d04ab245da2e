//! Active learning of graph labelings with S² (shortest-shortest-path
//! sampling), its complexity parameters, graph generators and an experiment
//! harness.

pub mod complexity;
pub mod engine;
mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod ingest;
pub mod io;
pub mod labeling;
mod math;
pub mod oracle;
mod union_find;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Path};
pub use labeling::{Label, Labeling};
pub use union_find::UnionFind;
