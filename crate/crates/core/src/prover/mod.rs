//! Simulated provers: analytic history-state models, the echo circuit and
//! per-copy measurement.

mod echo;
mod model;
mod sampler;

pub use echo::echo_prepare;
pub use model::{
    make_degraded_model, make_honest_model, tilted_input, HistoryStateModel, NoiseModel,
};
pub use sampler::{
    measure_copy, record_from_index, CopySampler, MeasurementInstruction, MeasurementMode,
};
