//! Encrypted-traffic classification over chained packet graphs.
//!
//! A capture is split into bidirectional sessions; each session becomes a
//! chain of fixed-length packet byte vectors, and a stack of simple graph
//! convolutions with a pooling readout classifies the chain.

pub mod cli;
pub mod codec;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod train;

pub use error::{Error, Result};
pub use graph::{
    batch_graphs, build_chain_graph, BatchedGraph, ChainedGraph, Dataset, PropagationMatrix,
};
pub use ingest::{parse_pcap, CleanOptions, CleanPacket, FiveTuple, PcapCapture};
pub use metrics::{confusion, report, Averaging, ConfusionMatrix, EvalReport};
pub use model::{init_model, CgnnModel, Checkpoint, ModelDims, PoolKind};
pub use pipeline::{ingest_pcap, IngestOptions, IngestStats, SessionGraph};
pub use train::{fit, TrainConfig, TrainReport};

/// Floating-point element type for model math (`f32` for training, `f64`
/// for gradient checks).
pub trait Real: ndarray::NdFloat + num_traits::FromPrimitive {}

impl<T: ndarray::NdFloat + num_traits::FromPrimitive> Real for T {}
