//! Command implementations behind the `cgnn` binary. Each command writes its
//! human-readable output to the given writer.

pub mod commands;
pub mod config;

pub use commands::{evaluate, inspect, predict, preprocess, train, EvalSplit, SessionPrediction};
pub use config::RunConfig;
