//! Quantization toolkit for a pair of linearly coupled oscillators.
//!
//! The crate covers the whole chain: the phase-space Hamiltonian matrix and
//! its region map ([`model`]), commutators of transformed variables
//! ([`phase`]), reduction to canonical decoupled modes ([`quantize`]), ladder
//! operators and spectra ([`spectral`]), classical trajectories
//! ([`dynamics`]), and the end-to-end runs behind the CLI ([`pipeline`]).

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod model;
pub mod output;
pub mod phase;
pub mod pipeline;
pub mod poly;
pub mod quantize;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::ModelParams;
