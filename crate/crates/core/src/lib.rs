//! Quantum, semi-classical and neo-classical models of energy exchange
//! between a radiation mode and a detector.
//!
//! The crate covers a qubit or a quantum oscillator absorbing energy from
//! either a classical drive or a quantized bosonic mode, with exact and
//! perturbative solutions side by side, and turns the energy bookkeeping of
//! each model into an auditable ledger.
//!
//! * [`hilbert`]: truncated Fock spaces, operators and states.
//! * [`models`]: Hamiltonians and the gravito-phononic SI mappings.
//! * [`dynamics`]: exact, piecewise and mean-field hybrid evolution plus
//!   closed-form transition probabilities.
//! * [`analysis`]: energy ledgers, scans and photo-electric signature reports.
//! * [`scenario`]: config-driven runs behind the `exchange` binary.

pub mod analysis;
pub mod constants;
pub mod dynamics;
pub mod hilbert;
pub mod models;
pub mod scenario;

pub use hilbert::{CoherentSpec, Factor, Operator, Pauli, SpaceDescriptor, StateVector};
pub use models::ModelSpec;
