//! Chained graphs, their propagation matrix, batching, splitting, and the
//! on-disk dataset format.

pub mod batch;
pub mod chain;
pub mod dataset;
pub mod propagation;
pub mod split;

pub use batch::{batch_graphs, BatchedGraph};
pub use chain::{build_chain_graph, truncate_graph, ChainedGraph};
pub use dataset::Dataset;
pub use propagation::PropagationMatrix;
pub use split::{split_dataset, DatasetSplit};
