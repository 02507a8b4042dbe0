//! Simulation of nested quantum repeaters built from noisy DEJMPS
//! purification, entanglement pumping and entanglement swapping on
//! graph-diagonal pair states.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fixed_point;
pub mod model;
pub mod noise;
pub mod oracle;
pub mod protocols;
pub mod purification;
pub mod swapping;

pub use error::{Error, Result};
pub use model::{BitPair, GraphDiagonalState, WernerParams};
pub use noise::{MemorySides, NoiseModel, PauliChannel};
