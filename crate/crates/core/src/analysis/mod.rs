//! Exact oracles, bound evaluators and randomized bound suites.

mod bounds;
pub mod dense;
mod density;
pub mod martingale;
mod params;
pub mod pauli;
pub mod random;
pub mod suites;

pub use bounds::{
    azuma_quantile, azuma_tail, compound_rejection_bound, fidelity_lower_bound,
    first_order_lower_bound, hoeffding_bound, noisy_measurement_tvd_bound, stochastic_trace_bound,
    tvd, tvd_fidelity_bound, tvd_slices,
};
pub use density::DensityMatrix;
pub use martingale::{martingale_experiment, CorrelationScheme, TailStatistics};
pub use params::{exact_parameters, parameters_from_ensemble, ExactParameters};
pub use pauli::{generalized_echo_prepare, php_negation_check, Pauli, PauliString, PauliTerm};
pub use suites::{run_suite, Suite, SuiteResult};
