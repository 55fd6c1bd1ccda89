//! SyncMap self-organizing chunking and a benchmark suite of continual
//! chunking problems.
//!
//! The pipeline is: generate a state stream ([`problems`]), encode it as
//! decaying activations ([`encoding`]), let the map self-organize
//! ([`dynamics`]), cluster the map ([`clustering`]) and score the result
//! against ground truth ([`metrics`]). [`parser`] provides the PARSER
//! baseline and [`harness`] runs whole experiments.

pub mod clustering;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod parser;
pub mod problems;

pub use error::{Error, Result};
