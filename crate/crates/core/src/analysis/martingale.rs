//! Correlated-trial estimator experiment.
//!
//! Each trial measures the observable `A = beta Z` on a one-qubit state
//! `sigma_j` that may depend on all earlier outcomes. The estimator
//! `F = (1/N) sum F_j` is compared with `Tr(A tau)`, `tau = (1/N) sum sigma_j`.
//! Since `sum_j (F_j - Tr(A sigma_j))` is a martingale with differences bounded
//! by `2 beta`, Azuma gives `P(|F - Tr(A tau)| >= t) <= 2 exp(-t^2 N / (8 beta^2))`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bounds::azuma_quantile;
use crate::exec::Execution;
use crate::rng::Substreams;
use crate::{Error, Result};

/// How the per-trial state is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationScheme {
    /// Every trial uses the state with `<Z> = bloch_z`.
    Iid { bloch_z: f64 },
    /// `<Z> = +bloch_z` while the number of earlier `-1` outcomes is even,
    /// `-bloch_z` otherwise.
    Alternating { bloch_z: f64 },
}

impl CorrelationScheme {
    fn bloch_z(self) -> f64 {
        match self {
            CorrelationScheme::Iid { bloch_z } | CorrelationScheme::Alternating { bloch_z } => {
                bloch_z
            }
        }
    }
}

/// Empirical deviation quantiles over independent repetitions of the
/// `trials`-long experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailStatistics {
    pub trials: u64,
    pub beta: f64,
    pub repetitions: usize,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    pub max_abs: f64,
    /// Deviation at which the Azuma tail reaches 1%.
    pub azuma_q99: f64,
    /// `3.2 beta / sqrt(N)`.
    pub width_limit: f64,
}

impl TailStatistics {
    pub fn within_envelope(&self) -> bool {
        self.q99 <= self.azuma_q99
    }

    pub fn within_width(&self) -> bool {
        self.q99 <= self.width_limit
    }
}

/// `F - Tr(A tau)` for one run.
pub fn single_run<R: Rng + ?Sized>(
    scheme: CorrelationScheme,
    trials: u64,
    beta: f64,
    rng: &mut R,
) -> f64 {
    let mut parity = false;
    let mut sum_f = 0.0;
    let mut sum_expect = 0.0;
    for _ in 0..trials {
        let z = match scheme {
            CorrelationScheme::Iid { bloch_z } => bloch_z,
            CorrelationScheme::Alternating { bloch_z } => {
                if parity {
                    -bloch_z
                } else {
                    bloch_z
                }
            }
        };
        let plus = rng.random::<f64>() < 0.5 * (1.0 + z);
        sum_f += if plus { beta } else { -beta };
        sum_expect += beta * z;
        if !plus {
            parity = !parity;
        }
    }
    (sum_f - sum_expect) / trials as f64
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

pub fn martingale_experiment(
    scheme: CorrelationScheme,
    trials: u64,
    beta: f64,
    repetitions: usize,
    seed: u64,
    execution: Execution,
) -> Result<TailStatistics> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::validation(format!(
            "observable bound must be positive and finite, got {beta}"
        )));
    }
    let z = scheme.bloch_z();
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::validation(format!(
            "Bloch component {z} outside [-1, 1]"
        )));
    }
    if trials == 0 || repetitions == 0 {
        return Err(Error::validation("trials and repetitions must be positive"));
    }
    let streams = Substreams::new(seed, "martingale");
    let mut devs = execution.map_indexed(repetitions, |r| {
        single_run(scheme, trials, beta, &mut streams.stream(r as u64)).abs()
    });
    devs.sort_by(f64::total_cmp);
    Ok(TailStatistics {
        trials,
        beta,
        repetitions,
        q50: quantile(&devs, 0.5),
        q90: quantile(&devs, 0.9),
        q99: quantile(&devs, 0.99),
        max_abs: devs[devs.len() - 1],
        azuma_q99: azuma_quantile(0.01, trials, beta),
        width_limit: 3.2 * beta / (trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_matches_hoeffding_scale() {
        let s = martingale_experiment(
            CorrelationScheme::Iid { bloch_z: 0.3 },
            1000,
            1.0,
            2000,
            1,
            Execution::Parallel,
        )
        .unwrap();
        assert!(s.within_envelope() && s.within_width(), "{s:?}");
        // Binomial standard deviation sqrt(1 - 0.09)/sqrt(1000) ~ 0.030.
        let sd = (1.0f64 - 0.09).sqrt() / 1000f64.sqrt();
        assert!((s.q50 / sd - 0.674).abs() < 0.1, "{s:?}");
    }

    #[test]
    fn alternating_within_envelope() {
        let s = martingale_experiment(
            CorrelationScheme::Alternating { bloch_z: 0.8 },
            10_000,
            1.0,
            500,
            2,
            Execution::Parallel,
        )
        .unwrap();
        assert!((s.azuma_q99 - 0.065_105).abs() < 1e-5, "{s:?}");
        assert!(s.within_envelope() && s.within_width(), "{s:?}");
    }

    #[test]
    fn single_trial_bounded() {
        let s = martingale_experiment(
            CorrelationScheme::Alternating { bloch_z: 0.5 },
            1,
            2.0,
            200,
            3,
            Execution::Sequential,
        )
        .unwrap();
        assert!(s.max_abs <= 4.0);
    }

    #[test]
    fn unbounded_observable_rejected() {
        for beta in [0.0, -1.0, f64::INFINITY, f64::NAN] {
            assert!(matches!(
                martingale_experiment(
                    CorrelationScheme::Iid { bloch_z: 0.0 },
                    10,
                    beta,
                    10,
                    0,
                    Execution::Sequential
                ),
                Err(Error::Validation(_))
            ));
        }
    }

    #[test]
    fn sequential_equals_parallel() {
        let run = |e| {
            martingale_experiment(
                CorrelationScheme::Alternating { bloch_z: 0.4 },
                500,
                1.0,
                64,
                9,
                e,
            )
            .unwrap()
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }
}
