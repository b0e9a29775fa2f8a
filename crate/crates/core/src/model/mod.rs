//! The CGNN classifier: stacked simple graph convolutions with ReLU, a
//! pooling readout, and a fully-connected softmax head.

pub mod checkpoint;
pub mod dims;
pub mod layers;
pub mod network;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use dims::{ModelDims, PoolKind};
pub use layers::{argmax, avg_pool, fc_softmax, pool, relu, sgc_layer, softmax};
pub use network::{init_model, CgnnModel, ForwardPass, Parameters};
