//! Desk-scale simulation of single-step Feynman-Kitaev verification for
//! analog ZZ-lattice quantum simulators.
//!
//! The crate is split along the roles of the protocol:
//!
//! * [`lattice`] builds the square-lattice geometry and random inputs.
//! * [`simulator`] holds the exact statevector kernels and the alias-table
//!   sampler.
//! * [`prover`] models history-state provers, both honest and imperfect, and
//!   the echo preparation circuit.
//! * [`verifier`] runs the verification protocol copy by copy and makes the
//!   accept/reject decision.
//! * [`analysis`] contains the dense oracles and the bound checks.
//!
//! Copy-level work is data parallel. With the `parallel` feature (on by
//! default) [`Execution::Parallel`] runs on rayon; without it every path is
//! sequential. Results never depend on the execution mode.

pub mod analysis;
mod error;
pub mod exec;
pub mod lattice;
pub mod prover;
pub mod rng;
pub mod simulator;
pub mod verifier;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lattice::{build_lattice, random_input, InputSpec, InputType, LatticeGeometry};
pub use num_complex::Complex64;
pub use prover::{
    echo_prepare, make_degraded_model, make_honest_model, measure_copy, HistoryStateModel,
    MeasurementInstruction, MeasurementMode, NoiseModel,
};
pub use simulator::{Distribution, PureState};
pub use verifier::{decide, run_protocol, EstimatorReport, ProtocolConfig, ProtocolRun};

/// Largest system for full statevector work.
pub const MAX_STATE_QUBITS: usize = 26;

/// Largest system (clock excluded) the echo circuit is simulated on.
pub const MAX_ECHO_QUBITS: usize = 20;

/// Largest system (clock excluded) handled by dense-matrix oracles.
pub const MAX_DENSE_QUBITS: usize = 6;
