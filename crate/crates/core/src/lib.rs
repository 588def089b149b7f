//! Expectation values of near-Clifford circuits by Heisenberg-picture Pauli
//! propagation, truncated in the number of non-Clifford branchings.
//!
//! The usual pipeline is [`compile::compile`] (absorb Cliffords into the
//! observable), optionally [`propagate::lightcone_filter`], then
//! [`propagate::propagate`] and read off an [`propagate::OrderReport`].

pub mod analysis;
pub mod circuit;
pub mod compile;
pub mod error;
pub mod models;
pub mod noise;
pub mod oracle;
pub mod pauli;
pub mod propagate;

pub use circuit::{Circuit, CliffordGate, Gate};
pub use compile::{compile, compile_with, CompileOptions, InteractionPictureProgram};
pub use error::{Error, Result};
pub use noise::{Channel, NoiseSpec};
pub use pauli::{Pauli, PauliString, Phase};
pub use propagate::{propagate, propagate_with_noise, ObservableSum, OrderReport, PropagationConfig};
