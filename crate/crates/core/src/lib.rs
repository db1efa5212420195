//! Semiquantum witnessing games built from entanglement witnesses, the
//! pay-off optimizers that turn them into entanglement measures, and a
//! finite-statistics referee simulation.
//!
//! Subsystems are labelled `A0`, `A`, `B`, `B0`: Alice's question slot, the
//! two halves of the shared state, and Bob's question slot. Joint operators
//! are evaluated in that canonical order.

pub mod error;
pub mod exec;
pub mod game;
pub mod json;
pub mod optimize;
pub mod oracle;
pub mod protocol;
pub mod qops;
pub mod random;
pub mod states;
pub mod strategy;
pub mod witness;

pub use error::{Error, Result};
pub use game::Game;
pub use qops::{QuantumOperator, StateVector, SubsystemLayout};
pub use strategy::Strategy;
pub use witness::Witness;
