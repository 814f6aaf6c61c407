//! Randomized batch checks of the analytic bounds.
//!
//! Every suite draws its instances from independent substreams keyed by the
//! seed, the suite name and the instance index, so results are identical for
//! any execution mode. A suite reports the worst margin, defined as how far
//! the observed quantity exceeds its bound; a positive margin is a violation.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::bounds::{
    fidelity_lower_bound, noisy_measurement_tvd_bound, stochastic_trace_bound, tvd,
    tvd_fidelity_bound,
};
use super::dense::{self, CMatrix};
use super::martingale::{martingale_experiment, CorrelationScheme};
use super::params::exact_parameters;
use super::pauli::{
    bipartite_string, generalized_echo_prepare, hamiltonian_matrix, xy_z_terms, zz_terms, Pauli,
    PauliString,
};
use super::random::{random_density_matrix, random_pure_state};
use super::DensityMatrix;
use crate::exec::Execution;
use crate::lattice::{build_lattice, random_input, LatticeGeometry};
use crate::rng::{derive_seed, tags, Substreams};
use crate::simulator::{
    apply_zz_evolution, flip_channel, history_state, product_state, walsh_hadamard, Distribution,
    PureState,
};
use crate::{Error, Result};

/// Slack on the output-fidelity lower bound inside the small-deficit regime.
pub const LOWER_BOUND_SLACK: f64 = 5e-3;
/// Largest deficit allowed for a lower-bound instance.
pub const LOWER_BOUND_REGIME: f64 = 0.02;
const TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    CauchySchwarz,
    LowerBound,
    TvdChain,
    Stochastic,
    Martingale,
    PhpEcho,
    NoisyMeas,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::CauchySchwarz,
        Suite::LowerBound,
        Suite::TvdChain,
        Suite::Stochastic,
        Suite::Martingale,
        Suite::PhpEcho,
        Suite::NoisyMeas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CauchySchwarz => "cauchy_schwarz",
            Suite::LowerBound => "lower_bound",
            Suite::TvdChain => "tvd_chain",
            Suite::Stochastic => "stochastic",
            Suite::Martingale => "martingale",
            Suite::PhpEcho => "php_echo",
            Suite::NoisyMeas => "noisy_meas",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::validation(format!("unknown suite {s:?}")))
    }
}

/// One CSV row of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub test_name: String,
    pub instances: usize,
    pub violations: usize,
    pub max_margin: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Run `instances` random instances of a suite.
///
/// For [`Suite::Martingale`] the instance count is the number of repetitions
/// of each tail experiment (i.i.d. and alternating schemes at `N = 10^3` and
/// `N = 10^4`), and a violation is an experiment whose 99% quantile leaves the
/// Azuma envelope.
pub fn run_suite(
    suite: Suite,
    instances: usize,
    seed: u64,
    execution: Execution,
) -> Result<SuiteResult> {
    let suite_seed = derive_seed(seed, tags::SUITE, suite as u64);
    let margins: Vec<f64> = match suite {
        Suite::Martingale => martingale_margins(instances, suite_seed, execution)?,
        _ => {
            let streams = Substreams::new(suite_seed, suite.name());
            execution
                .map_indexed(instances, |i| {
                    let mut rng = streams.stream(i as u64);
                    instance_margin(suite, i, &mut rng)
                })
                .into_iter()
                .collect::<Result<_>>()?
        }
    };
    Ok(SuiteResult {
        test_name: suite.name().to_string(),
        instances,
        violations: margins.iter().filter(|&&m| m > 0.0).count(),
        max_margin: margins.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

fn instance_margin<R: Rng>(suite: Suite, index: usize, rng: &mut R) -> Result<f64> {
    match suite {
        Suite::CauchySchwarz => cauchy_schwarz(index, rng),
        Suite::LowerBound => lower_bound(index, rng),
        Suite::TvdChain => tvd_chain(index, rng),
        Suite::Stochastic => stochastic(index, rng),
        Suite::PhpEcho => php_echo(index, rng),
        Suite::NoisyMeas => noisy_meas(rng),
        Suite::Martingale => unreachable!("handled separately"),
    }
}

fn small_lattice(index: usize) -> LatticeGeometry {
    let (r, c) = [(1, 2), (1, 3), (2, 2)][index % 3];
    build_lattice(r, c).expect("fixed small lattice")
}

fn cauchy_schwarz<R: Rng>(index: usize, rng: &mut R) -> Result<f64> {
    let lattice = small_lattice(index);
    let n = lattice.num_qubits();
    let input = random_input(n, rng);
    let rank = rng.random_range(1..=1usize << (n + 1));
    let rho = random_density_matrix(n + 1, rank, rng);
    let params = exact_parameters(&rho, &lattice, &input)?;
    Ok(params.tr_rho_o10.norm_sqr() - (0.25 + TOL))
}

/// `exp(-i angle K)` for a random two-qubit Pauli generator `K` of unit
/// norm acting on a random pair of the `total` qubits.
fn two_qubit_rotation<R: Rng>(total: usize, max_angle: f64, rng: &mut R) -> CMatrix {
    let q1 = rng.random_range(0..total);
    let q2 = (q1 + rng.random_range(1..total)) % total;
    let dim = 1 << total;
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let mut k = CMatrix::zeros(dim, dim);
    for &a in &paulis {
        for &b in &paulis {
            if a == Pauli::I && b == Pauli::I {
                continue;
            }
            let coeff: f64 = rng.random_range(-1.0..1.0);
            k += PauliString::from_sites(total, &[(q1, a), (q2, b)]).matrix()
                * Complex64::new(coeff, 0.0);
        }
    }
    let norm = k
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    let angle = rng.random_range(0.0..max_angle);
    dense::hermitian_evolution(&(k / Complex64::new(norm, 0.0)), angle)
}

/// Perfect history state with a few coherently rotated components and a
/// depolarizing admixture.
fn near_ideal_state<R: Rng>(
    lattice: &LatticeGeometry,
    rng: &mut R,
) -> Result<(DensityMatrix, crate::InputSpec)> {
    let n = lattice.num_qubits();
    let input = random_input(n, rng);
    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let psi = DVector::from_column_slice(history_state(lattice, &input, theta)?.amplitudes());
    let dim = 1 << (n + 1);
    let components = rng.random_range(1..=3);
    let mut m = CMatrix::zeros(dim, dim);
    let mut weights: Vec<f64> = (0..components)
        .map(|_| rng.random_range(0.1..1.0))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    for w in weights {
        let v = two_qubit_rotation(n + 1, 0.12, rng) * &psi;
        m += (&v * v.adjoint()) * Complex64::new(w, 0.0);
    }
    let depol = rng.random_range(0.0..0.015);
    let rho = DensityMatrix::new(m)?.depolarize(depol);
    Ok((rho, input))
}

fn lower_bound<R: Rng>(index: usize, rng: &mut R) -> Result<f64> {
    let lattice = small_lattice(index);
    for _ in 0..1000 {
        let (rho, input) = near_ideal_state(&lattice, rng)?;
        let p = exact_parameters(&rho, &lattice, &input)?;
        let o10_sq = p.tr_rho_o10.norm_sqr();
        let in_regime = 0.25 - o10_sq <= LOWER_BOUND_REGIME
            && (0.5 - p.p_samp).abs() <= LOWER_BOUND_REGIME
            && 1.0 - p.f_in <= LOWER_BOUND_REGIME;
        if in_regime {
            return Ok(fidelity_lower_bound(o10_sq, p.f_in) - LOWER_BOUND_SLACK - p.f_out);
        }
    }
    Err(Error::SearchFailure(
        "no in-regime state after 1000 draws".into(),
    ))
}

fn ideal_output(lattice: &LatticeGeometry, input: &crate::InputSpec) -> Result<PureState> {
    apply_zz_evolution(product_state(input)?, lattice, 1.0)
}

/// `normalize(ideal + scale * g)` for a Gaussian direction `g`.
fn perturbed<R: Rng>(ideal: &PureState, max_scale: f64, rng: &mut R) -> Result<PureState> {
    let g = random_pure_state(ideal.num_qubits(), rng);
    let s = rng.random_range(0.0..max_scale);
    let amps = ideal
        .amplitudes()
        .iter()
        .zip(g.amplitudes())
        .map(|(a, b)| a + b * s)
        .collect();
    PureState::normalized(ideal.num_qubits(), amps)
}

fn sampling_distribution(state: &PureState) -> Result<Distribution> {
    Distribution::new(walsh_hadamard(state.clone()).probabilities())
}

fn tvd_chain<R: Rng>(index: usize, rng: &mut R) -> Result<f64> {
    let lattice = small_lattice(index);
    let input = random_input(lattice.num_qubits(), rng);
    let ideal = ideal_output(&lattice, &input)?;
    let real = perturbed(&ideal, 2.0, rng)?;
    let d = tvd(
        &sampling_distribution(&ideal)?,
        &sampling_distribution(&real)?,
    )?;
    Ok(d - (tvd_fidelity_bound(ideal.fidelity(&real)) + TOL))
}

fn stochastic<R: Rng>(index: usize, rng: &mut R) -> Result<f64> {
    let lattice = small_lattice(index);
    let n = lattice.num_qubits();
    let input = random_input(n, rng);
    let ideal = ideal_output(&lattice, &input)?;
    let sigma = DensityMatrix::from_pure(&ideal);
    let near = DensityMatrix::from_pure(&perturbed(&ideal, 0.5, rng)?);
    let rank = rng.random_range(1..=1usize << n);
    let noise = random_density_matrix(n, rank, rng);
    let lambda: f64 = rng.random_range(0.0..1.0);
    let m = near.matrix() * Complex64::new(1.0 - lambda, 0.0)
        + noise.matrix() * Complex64::new(lambda, 0.0);
    let rho = DensityMatrix::new(m)?;
    let delta_f = 1.0 - rho.expectation_pure(&ideal);
    let delta_p = 1.0 - rho.purity();
    let bound = stochastic_trace_bound(delta_f, delta_p)?;
    Ok(rho.trace_distance(&sigma) - (bound + TOL))
}

fn php_echo<R: Rng>(index: usize, rng: &mut R) -> Result<f64> {
    let (r, c) = [(1, 2), (2, 2), (2, 3)][index % 3];
    let lattice = build_lattice(r, c)?;
    let n = lattice.num_qubits();
    let (terms, p, phi, time) = if index.is_multiple_of(2) {
        let phi = product_state(&random_input(n, rng))?;
        (
            zz_terms(&lattice),
            bipartite_string(&lattice, Pauli::I, Pauli::X),
            phi,
            1.0,
        )
    } else {
        let terms = xy_z_terms(
            &lattice,
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let time = rng.random_range(0.0..3.0);
        (
            terms,
            bipartite_string(&lattice, Pauli::X, Pauli::Y),
            random_pure_state(n, rng),
            time,
        )
    };
    let got = generalized_echo_prepare(&terms, &p, &phi, time)?;
    let u = (hamiltonian_matrix(&terms, n) * Complex64::new(0.0, -time)).exp();
    let v = DVector::from_column_slice(phi.amplitudes());
    let out = &u * &v;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps = v.iter().chain(out.iter()).map(|a| a * r).collect();
    let expect = PureState::normalized(n + 1, amps)?;
    Ok((1.0 - TOL) - got.fidelity(&expect))
}

fn noisy_meas<R: Rng>(rng: &mut R) -> Result<f64> {
    let lattice = build_lattice(2, 2)?;
    let n = lattice.num_qubits();
    let eps = 1.0 / (100.0 * n as f64);
    let input = random_input(n, rng);
    let ideal = ideal_output(&lattice, &input)?;
    let real = perturbed(&ideal, 0.3, rng)?;
    let noisy = flip_channel(&sampling_distribution(&real)?, eps)?;
    let d = tvd(&noisy, &sampling_distribution(&ideal)?)?;
    let bound = noisy_measurement_tvd_bound(1.0 - ideal.fidelity(&real), eps, n)?;
    Ok(d - (bound + TOL))
}

fn martingale_margins(repetitions: usize, seed: u64, execution: Execution) -> Result<Vec<f64>> {
    let schemes = [
        CorrelationScheme::Iid { bloch_z: 0.3 },
        CorrelationScheme::Alternating { bloch_z: 0.8 },
    ];
    let mut margins = Vec::new();
    for (k, scheme) in schemes.into_iter().enumerate() {
        for (j, trials) in [1_000u64, 10_000].into_iter().enumerate() {
            let s = derive_seed(seed, "martingale", (2 * k + j) as u64);
            let stats =
                martingale_experiment(scheme, trials, 1.0, repetitions.max(1), s, execution)?;
            margins.push(stats.q99 - stats.azuma_q99);
        }
    }
    Ok(margins)
}
