//! Linear response of subsystem entanglement entropy to a weak time-dependent
//! drive, with exact finite-dimensional dynamics for comparison.

pub mod dynamics;
pub mod error;
pub mod models;
pub mod response;
pub mod runner;
pub mod signal;
pub mod tensor;

pub use error::{Error, Result};
