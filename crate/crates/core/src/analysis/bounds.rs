//! Closed-form bounds relating the protocol parameters, fidelities and
//! distribution distances.

use crate::simulator::Distribution;
use crate::{Error, Result};

/// Output-fidelity lower bound `16 |Tr[rho O_10]|^2 + 3 F_in - 6`.
///
/// `o10_sq` is the unscaled `|Tr[rho O_10]|^2` (at most 1/4).
pub fn fidelity_lower_bound(o10_sq: f64, f_in: f64) -> f64 {
    16.0 * o10_sq + 3.0 * f_in - 6.0
}

/// The same bound written in the deficits `eps = 1/4 - |Tr[rho O_10]|^2`
/// and `eps_in = 1 - F_in`.
pub fn first_order_lower_bound(eps: f64, eps_in: f64) -> f64 {
    1.0 - 16.0 * eps - 3.0 * eps_in
}

/// `1/2 sum |p - q|`.
pub fn tvd(p: &Distribution, q: &Distribution) -> Result<f64> {
    tvd_slices(p.probabilities(), q.probabilities())
}

pub fn tvd_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `sqrt(1 - F_out)`, the TVD ceiling implied by an output fidelity.
pub fn tvd_fidelity_bound(f_out: f64) -> f64 {
    (1.0 - f_out).max(0.0).sqrt()
}

/// Trace-distance bound for a mixed output state with infidelity
/// `delta_f` and impurity `delta_p`:
/// `delta_f + sqrt(delta_f - delta_f^2/2 - delta_p/2)`.
///
/// Radicands down to `-1e-12` are clamped to zero; anything lower means the
/// impurity exceeds what the fidelity allows.
pub fn stochastic_trace_bound(delta_f: f64, delta_p: f64) -> Result<f64> {
    let radicand = delta_f - delta_f * delta_f / 2.0 - delta_p / 2.0;
    if radicand < -1e-12 {
        return Err(Error::InconsistentInputs(format!(
            "impurity {delta_p} too large for infidelity {delta_f} (radicand {radicand:e})"
        )));
    }
    Ok(delta_f + radicand.max(0.0).sqrt())
}

/// Hoeffding tail `sides * exp(-2 delta^2 trials)` for a mean of `trials`
/// variables with unit range. Use `sides = 4` for a complex mean bounded
/// through its real and imaginary parts.
pub fn hoeffding_bound(delta: f64, trials: u64, sides: u32) -> f64 {
    f64::from(sides) * (-2.0 * delta * delta * trials as f64).exp()
}

/// Per-run rejection probability bound for an ideal prover with `n_m`
/// copies: `F_in` estimated from `n_m/8` clock-`+1` input tests at
/// precision 0.006, and `|<O_10>|^2` from `n_m/4` propagation tests at
/// precision 0.0015.
pub fn compound_rejection_bound(n_m: u64) -> f64 {
    let f_in = hoeffding_bound(0.006, n_m / 8, 2);
    let o10 = hoeffding_bound(0.0015, n_m / 4, 4);
    f_in.max(o10)
}

/// `(1 - eps n) sqrt(delta_f) + eps n` for sampling with per-qubit flip
/// rate `eps` on `n` qubits.
pub fn noisy_measurement_tvd_bound(delta_f: f64, eps: f64, n: usize) -> Result<f64> {
    let en = eps * n as f64;
    if en >= 1.0 {
        return Err(Error::OutOfRegime(format!("eps * n = {en} >= 1")));
    }
    Ok((1.0 - en) * delta_f.max(0.0).sqrt() + en)
}

/// Azuma tail `2 exp(-t^2 N / (8 beta^2))` for the mean of `N` trials whose
/// Doob martingale has differences bounded by `2 beta / N`.
pub fn azuma_tail(t: f64, trials: u64, beta: f64) -> f64 {
    2.0 * (-(t * t) * trials as f64 / (8.0 * beta * beta)).exp()
}

/// Deviation `t` at which [`azuma_tail`] equals `q`.
pub fn azuma_quantile(q: f64, trials: u64, beta: f64) -> f64 {
    beta * (8.0 * (2.0 / q).ln() / trials as f64).sqrt()
}
