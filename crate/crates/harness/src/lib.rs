//! Dataset generation, benchmarking, splits and the grounding service.

pub mod bench;
pub mod config;
pub mod dataset;
pub mod generate;
pub mod ground;
pub mod server;
pub mod split;
pub mod synth;
