use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use super::gates::{unitarity_error, Gate};
use super::Distribution;
use crate::lattice::{InputSpec, InputType, LatticeGeometry};
use crate::{Error, Result, MAX_STATE_QUBITS};

const NORM_TOL: f64 = 1e-10;

/// A normalized `n`-qubit statevector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wrap amplitudes, checking length and normalization.
    pub fn new(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << num_qubits,
                actual: amplitudes.len(),
            });
        }
        let state = Self {
            num_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!("state norm^2 {norm} is not 1")));
        }
        Ok(state)
    }

    /// Normalize arbitrary non-zero amplitudes.
    pub fn normalized(num_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("cannot normalize a zero vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(num_qubits, amplitudes)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|clock> (x) self` with the clock as the new most significant qubit,
    /// for a clock state `c0|0> + c1|1>`.
    pub fn with_clock(&self, c0: Complex64, c1: Complex64) -> PureState {
        let mut amplitudes = Vec::with_capacity(2 * self.dim());
        amplitudes.extend(self.amplitudes.iter().map(|a| c0 * a));
        amplitudes.extend(self.amplitudes.iter().map(|a| c1 * a));
        PureState::from_raw(self.num_qubits + 1, amplitudes)
    }
}

fn check_capacity(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::Capacity {
            what,
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// Single-qubit amplitudes `[<0|s>, <1|s>]` of an input type.
pub fn input_amplitudes(kind: InputType) -> [Complex64; 2] {
    let a0 = Complex64::new(0.5, 0.5);
    match kind {
        InputType::X => [a0, Complex64::new(0.5, -0.5)],
        InputType::Y => [
            a0,
            Complex64::from_polar(1.0, -FRAC_PI_4) * Complex64::new(0.5, -0.5),
        ],
    }
}

/// Tensor product of the per-qubit input states.
pub fn product_state(input: &InputSpec) -> Result<PureState> {
    let n = input.len();
    check_capacity("product state", n, MAX_STATE_QUBITS)?;
    let mut amps = Vec::with_capacity(1 << n);
    amps.push(Complex64::new(1.0, 0.0));
    for (k, &kind) in input.choices.iter().enumerate() {
        let [a0, a1] = input_amplitudes(kind);
        let half = 1 << k;
        amps.extend_from_within(..half);
        for (i, amp) in amps.iter_mut().enumerate() {
            *amp *= if i < half { a0 } else { a1 };
        }
    }
    Ok(PureState::from_raw(n, amps))
}

/// `sum_{edges} z_i z_j` for basis index `bits` (bit 0 is spin +1).
pub fn zz_energy(bits: u64, edges: &[[usize; 2]]) -> i64 {
    edges
        .iter()
        .map(|&[i, j]| {
            if ((bits >> i) ^ (bits >> j)) & 1 == 0 {
                1
            } else {
                -1
            }
        })
        .sum()
}

/// Phases `exp(-i time (pi/4) s)` for every achievable energy
/// `s = -m..=m`, indexed by `s + m`.
pub(crate) fn phase_table(num_edges: usize, time: f64) -> Vec<Complex64> {
    let m = num_edges as i64;
    (-m..=m)
        .map(|s| Complex64::from_polar(1.0, -time * FRAC_PI_4 * s as f64))
        .collect()
}

/// Multiply each amplitude by the ZZ phase of its basis string. Qubits not
/// touched by `edges` (e.g. a clock) are spectators.
pub(crate) fn zz_phase_in_place(amps: &mut [Complex64], edges: &[[usize; 2]], time: f64) {
    let table = phase_table(edges.len(), time);
    let m = edges.len() as i64;
    for (z, a) in amps.iter_mut().enumerate() {
        *a *= table[(zz_energy(z as u64, edges) + m) as usize];
    }
}

/// Diagonal evolution `exp(-i time H)` with `H = (pi/4) sum Z_i Z_j`.
pub fn apply_zz_evolution(
    mut state: PureState,
    lattice: &LatticeGeometry,
    time: f64,
) -> Result<PureState> {
    if state.num_qubits != lattice.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: lattice.num_qubits(),
            actual: state.num_qubits,
        });
    }
    zz_phase_in_place(&mut state.amplitudes, &lattice.edges, time);
    Ok(state)
}

/// `(|0>|phi_in> + e^{i theta}|1> U|phi_in>)/sqrt(2)` with the clock on top.
pub fn history_state(
    lattice: &LatticeGeometry,
    input: &InputSpec,
    theta: f64,
) -> Result<PureState> {
    input.check_matches(lattice)?;
    check_capacity("history state", lattice.num_qubits() + 1, MAX_STATE_QUBITS)?;
    let phi = product_state(input)?;
    let out = apply_zz_evolution(phi.clone(), lattice, 1.0)?;
    let r = FRAC_1_SQRT_2;
    let ph = Complex64::from_polar(r, theta);
    let mut amps = phi.into_amplitudes();
    amps.iter_mut().for_each(|a| *a *= r);
    amps.extend(out.amplitudes.iter().map(|a| a * ph));
    Ok(PureState::from_raw(lattice.num_qubits() + 1, amps))
}

/// `H^{(x)n}` by the in-place butterfly, `O(n 2^n)`.
pub fn walsh_hadamard(mut state: PureState) -> PureState {
    let s = FRAC_1_SQRT_2;
    let dim = state.dim();
    let amps = &mut state.amplitudes;
    let mut half = 1;
    while half < dim {
        for block in (0..dim).step_by(2 * half) {
            for i in block..block + half {
                let (a, b) = (amps[i], amps[i + half]);
                amps[i] = (a + b) * s;
                amps[i + half] = (a - b) * s;
            }
        }
        half <<= 1;
    }
    state
}

pub(crate) fn apply_gate_in_place(amps: &mut [Complex64], qubit: usize, gate: &Gate) {
    let stride = 1 << qubit;
    for block in (0..amps.len()).step_by(2 * stride) {
        for i in block..block + stride {
            let (a, b) = (amps[i], amps[i + stride]);
            amps[i] = gate[0][0] * a + gate[0][1] * b;
            amps[i + stride] = gate[1][0] * a + gate[1][1] * b;
        }
    }
}

/// Apply a 2x2 unitary to one qubit.
pub fn apply_single_qubit(mut state: PureState, qubit: usize, gate: &Gate) -> Result<PureState> {
    if qubit >= state.num_qubits {
        return Err(Error::validation(format!(
            "qubit {qubit} out of range for {} qubits",
            state.num_qubits
        )));
    }
    let err = unitarity_error(gate);
    if err > 1e-10 {
        return Err(Error::validation(format!(
            "gate is not unitary (error {err:e})"
        )));
    }
    apply_gate_in_place(&mut state.amplitudes, qubit, gate);
    Ok(state)
}

/// Controlled-`Z^{(x) targets}`: each basis string picks up
/// `(-1)^(c * |z restricted to targets|)`.
pub fn apply_global_cz(
    mut state: PureState,
    control: usize,
    targets: &[usize],
) -> Result<PureState> {
    let n = state.num_qubits;
    if control >= n || targets.iter().any(|&t| t >= n) {
        return Err(Error::validation("control or target out of range"));
    }
    if targets.contains(&control) {
        return Err(Error::validation(format!(
            "control {control} is also a target"
        )));
    }
    let mask = targets.iter().fold(0u64, |m, &t| m | (1 << t));
    for (z, a) in state.amplitudes.iter_mut().enumerate() {
        let z = z as u64;
        if (z >> control) & 1 == 1 && (z & mask).count_ones() % 2 == 1 {
            *a = -*a;
        }
    }
    Ok(state)
}

/// `P_ideal(x) = |<x| H^{(x)n} U |phi_in>|^2` for `U = exp(-i H)`.
pub fn ideal_output_distribution(
    lattice: &LatticeGeometry,
    input: &InputSpec,
) -> Result<Distribution> {
    input.check_matches(lattice)?;
    check_capacity(
        "output distribution",
        lattice.num_qubits(),
        MAX_STATE_QUBITS,
    )?;
    let evolved = apply_zz_evolution(product_state(input)?, lattice, 1.0)?;
    Distribution::new(walsh_hadamard(evolved).probabilities())
}

/// The de facto outcome `u = prod_k (cos(pi/4) - i sin(pi/4) h_k)` for a
/// basis string given as a bitmask.
pub fn u_value_bits(bits: u64, edges: &[[usize; 2]]) -> Complex64 {
    let (c, s) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
    let aligned = Complex64::new(c, -s);
    let anti = Complex64::new(c, s);
    edges.iter().fold(Complex64::new(1.0, 0.0), |u, &[i, j]| {
        if ((bits >> i) ^ (bits >> j)) & 1 == 0 {
            u * aligned
        } else {
            u * anti
        }
    })
}

/// [`u_value_bits`] for a list of `+1/-1` Z outcomes.
pub fn u_value(z_outcomes: &[i8], lattice: &LatticeGeometry) -> Result<Complex64> {
    if z_outcomes.len() != lattice.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: lattice.num_qubits(),
            actual: z_outcomes.len(),
        });
    }
    let mut bits = 0u64;
    for (k, &z) in z_outcomes.iter().enumerate() {
        match z {
            1 => {}
            -1 => bits |= 1 << k,
            other => return Err(Error::validation(format!("outcome {other} is not +1/-1"))),
        }
    }
    Ok(u_value_bits(bits, &lattice.edges))
}
