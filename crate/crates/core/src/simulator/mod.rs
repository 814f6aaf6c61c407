//! Exact statevector kernels and output-distribution sampling.
//!
//! Conventions used throughout the crate:
//!
//! * qubit `k` is bit `k` of a basis index (little endian);
//! * bit value 0 is spin `+1`, bit value 1 is spin `-1`;
//! * when a clock qubit is present it is the most significant bit, so the
//!   first half of an `(n+1)`-qubit vector is the clock-`|0>` branch.

mod distribution;
pub mod gates;
mod measurement;
mod state;

pub use distribution::{flip_channel, format_bits, parse_bits, Distribution};
pub use gates::Gate;
pub use measurement::{basis_change, BasisLabel, MeasurementRecord};
pub(crate) use state::{apply_gate_in_place, zz_phase_in_place};
pub use state::{
    apply_global_cz, apply_single_qubit, apply_zz_evolution, history_state,
    ideal_output_distribution, input_amplitudes, product_state, u_value, u_value_bits,
    walsh_hadamard, zz_energy, PureState,
};
