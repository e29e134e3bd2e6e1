//! Fault-tolerance analysis for Bacon-Shor codes with transversal CCZ.

pub mod bits;
pub mod circuit;
pub mod code;
pub mod cost;
pub mod counting;
pub mod decoder;
pub mod error;
pub mod exrec;
pub mod frame;
pub mod ft;
pub mod gadgets;
pub mod noise;
pub mod pauli;
pub mod pauli_sum;
pub mod sim;

pub use error::{Error, Result};
