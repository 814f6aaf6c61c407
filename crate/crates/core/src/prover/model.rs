use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{DensityMatrix, ExactParameters};
use crate::lattice::{InputSpec, LatticeGeometry};
use crate::simulator::{apply_zz_evolution, gates, product_state, PureState};
use crate::{Error, Result, MAX_DENSE_QUBITS};

/// Imperfections of a simulated prover.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Clock phase `theta` of the history state.
    #[serde(default)]
    pub theta: f64,
    /// Relative evolution-time error: the device evolves for `1 + eta`.
    #[serde(default)]
    pub eta: f64,
    /// Angle of a per-qubit `R_z` error on state preparation.
    #[serde(default)]
    pub input_tilt: f64,
    /// Probability that any reported single-qubit outcome is flipped.
    #[serde(default)]
    pub meas_flip: f64,
    /// Weight of the maximally mixed state in the output component.
    #[serde(default)]
    pub depolarizing: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta", self.theta),
            ("eta", self.eta),
            ("input_tilt", self.input_tilt),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(format!("{name} must be finite, got {v}")));
            }
        }
        for (name, v) in [
            ("meas_flip", self.meas_flip),
            ("depolarizing", self.depolarizing),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Analytic description of the states a prover hands over.
///
/// Every copy is, with probability `q_k`, the pure state
/// `sqrt(1-w)|0>|a> + e^{i theta} sqrt(w)|1>|c_k>`, and with the remaining
/// probability `d` the incoherent state
/// `(1-w)|0><0| (x) |a><a| + w |1><1| (x) I/2^n`.
/// Here `|a>` is the input component, `c_k` the output branches and `w` the
/// output weight (1/2 for an honest prover).
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryStateModel {
    lattice: LatticeGeometry,
    input: InputSpec,
    clock_phase: f64,
    output_weight: f64,
    input_component: PureState,
    branches: Vec<(f64, PureState)>,
    depolarized: f64,
    meas_flip: f64,
}

impl HistoryStateModel {
    pub fn new(
        lattice: LatticeGeometry,
        input: InputSpec,
        clock_phase: f64,
        input_component: PureState,
        branches: Vec<(f64, PureState)>,
        depolarized: f64,
    ) -> Result<Self> {
        input.check_matches(&lattice)?;
        let n = lattice.num_qubits();
        if input_component.num_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: input_component.num_qubits(),
            });
        }
        for (q, c) in &branches {
            if c.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: c.num_qubits(),
                });
            }
            if !(0.0..=1.0).contains(q) {
                return Err(Error::validation(format!(
                    "branch weight {q} outside [0, 1]"
                )));
            }
        }
        let total: f64 = branches.iter().map(|(q, _)| q).sum::<f64>() + depolarized;
        if !(0.0..=1.0).contains(&depolarized) || (total - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        if !clock_phase.is_finite() {
            return Err(Error::validation("clock phase must be finite"));
        }
        Ok(Self {
            lattice,
            input,
            clock_phase,
            output_weight: 0.5,
            input_component,
            branches,
            depolarized,
            meas_flip: 0.0,
        })
    }

    /// Replace the clock-`|1>` weight `w` (the exact `p_samp`).
    pub fn with_output_weight(mut self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::validation(format!(
                "output weight {w} outside [0, 1]"
            )));
        }
        self.output_weight = w;
        Ok(self)
    }

    /// Set the probability that each reported outcome is flipped.
    pub fn with_meas_flip(mut self, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::validation(format!("flip rate {eps} outside [0, 1]")));
        }
        self.meas_flip = eps;
        Ok(self)
    }

    pub fn meas_flip(&self) -> f64 {
        self.meas_flip
    }

    pub fn lattice(&self) -> &LatticeGeometry {
        &self.lattice
    }

    pub fn input(&self) -> &InputSpec {
        &self.input
    }

    pub fn num_qubits(&self) -> usize {
        self.lattice.num_qubits()
    }

    pub fn clock_phase(&self) -> f64 {
        self.clock_phase
    }

    pub fn output_weight(&self) -> f64 {
        self.output_weight
    }

    pub fn input_component(&self) -> &PureState {
        &self.input_component
    }

    /// Coherent output branches `(q_k, c_k)`.
    pub fn branches(&self) -> &[(f64, PureState)] {
        &self.branches
    }

    pub fn depolarized_weight(&self) -> f64 {
        self.depolarized
    }

    /// Exact protocol parameters of the modelled state, at any size.
    pub fn exact_parameters(&self) -> Result<ExactParameters> {
        let phi = product_state(&self.input)?;
        let u_phi = apply_zz_evolution(phi.clone(), &self.lattice, 1.0)?;
        let u_a = apply_zz_evolution(self.input_component.clone(), &self.lattice, 1.0)?;
        let w = self.output_weight;
        let d = self.depolarized;
        let dim = (1u64 << self.num_qubits()) as f64;

        let overlap = (w * (1.0 - w)).sqrt();
        let mut tr = Complex64::new(0.0, 0.0);
        let mut f_out = d / dim;
        for (q, c) in &self.branches {
            tr += c.inner(&u_a) * *q;
            f_out += q * c.fidelity(&u_phi);
        }
        tr *= Complex64::from_polar(overlap, -self.clock_phase);

        let mut purity = 0.0;
        for (qk, ck) in &self.branches {
            for (ql, cl) in &self.branches {
                let ip = Complex64::new(1.0 - w, 0.0) + ck.inner(cl) * w;
                purity += qk * ql * ip.norm_sqr();
            }
        }
        let dep_self = (1.0 - w).powi(2) + w * w / dim;
        purity += 2.0 * d * (1.0 - d) * dep_self + d * d * dep_self;

        Ok(ExactParameters {
            f_in: self.input_component.fidelity(&phi),
            p_samp: w,
            tr_rho_o10: tr,
            f_out: if w > 0.0 { f_out } else { 0.0 },
            purity,
        })
    }

    /// The full `(n+1)`-qubit density matrix, for `n <= 6`.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        let n = self.num_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(Error::Capacity {
                what: "model density matrix",
                requested: n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let w = self.output_weight;
        let half = 1usize << n;
        let dim = 2 * half;
        let a = DVector::from_column_slice(self.input_component.amplitudes());
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        let phase = Complex64::from_polar(w.sqrt(), self.clock_phase);
        for (q, c) in &self.branches {
            let mut v = DVector::zeros(dim);
            v.rows_mut(0, half)
                .copy_from(&(&a * Complex64::new((1.0 - w).sqrt(), 0.0)));
            v.rows_mut(half, half)
                .copy_from(&(DVector::from_column_slice(c.amplitudes()) * phase));
            m += (&v * v.adjoint()) * Complex64::new(*q, 0.0);
        }
        if self.depolarized > 0.0 {
            let d = self.depolarized;
            let aa = &a * a.adjoint() * Complex64::new(d * (1.0 - w), 0.0);
            let mut top = m.view_mut((0, 0), (half, half));
            top += aa;
            for i in half..dim {
                m[(i, i)] += Complex64::new(d * w / half as f64, 0.0);
            }
        }
        DensityMatrix::new(m)
    }
}

/// Tensor product of the input states with each qubit rotated by `R_z(tilt)`.
pub fn tilted_input(input: &InputSpec, tilt: f64) -> Result<PureState> {
    let mut state = product_state(input)?;
    if tilt != 0.0 {
        let rz = gates::rz(tilt);
        let amps = state.amplitudes_mut();
        for q in 0..input.len() {
            crate::simulator::apply_gate_in_place(amps, q, &rz);
        }
    }
    Ok(state)
}

/// Honest or noisy prover.
///
/// The input component is the tilted product state `|a>`, and the coherent
/// output component is `exp(-i(1+eta)H)|a>`, i.e. the device evolves the
/// state it actually prepared. Depolarizing noise replaces the output
/// component by `I/2^n` with probability `noise.depolarizing`.
pub fn make_honest_model(
    lattice: &LatticeGeometry,
    input: &InputSpec,
    noise: &NoiseModel,
) -> Result<HistoryStateModel> {
    noise.validate()?;
    input.check_matches(lattice)?;
    let a = tilted_input(input, noise.input_tilt)?;
    let c = apply_zz_evolution(a.clone(), lattice, 1.0 + noise.eta)?;
    let p = noise.depolarizing;
    let branches = if p < 1.0 {
        vec![(1.0 - p, c)]
    } else {
        Vec::new()
    };
    HistoryStateModel::new(lattice.clone(), input.clone(), noise.theta, a, branches, p)?
        .with_meas_flip(noise.meas_flip)
}

const SEARCH_TOL: f64 = 1e-12;

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64, target: f64) -> f64 {
    // f(lo) >= target > f(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < SEARCH_TOL {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `|<a| exp(i eta H) |a>|^2` evaluated from the energy histogram of `|a>`.
fn echo_overlap(weights: &[f64], edges: usize, eta: f64) -> f64 {
    let m = edges as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &wk) in weights.iter().enumerate() {
        if wk != 0.0 {
            let s = k as i64 - m;
            acc += Complex64::from_polar(wk, eta * std::f64::consts::FRAC_PI_4 * s as f64);
        }
    }
    acc.norm_sqr()
}

/// Build a noiseless-measurement prover whose exact parameters hit
/// `4|Tr[rho O_10]|^2 = target_o10_sq` and `F_in = target_f_in`.
///
/// `F_in` is set by the input tilt and `4|Tr[rho O_10]|^2` by the evolution
/// error `eta`; both are found by bisection against the exact values.
pub fn make_degraded_model(
    lattice: &LatticeGeometry,
    input: &InputSpec,
    target_o10_sq: f64,
    target_f_in: f64,
) -> Result<HistoryStateModel> {
    input.check_matches(lattice)?;
    for (name, t) in [("o10", target_o10_sq), ("f_in", target_f_in)] {
        if !(0.0..=1.0).contains(&t) || t.is_nan() {
            return Err(Error::SearchFailure(format!(
                "{name} target {t} outside [0, 1]"
            )));
        }
    }
    let n = lattice.num_qubits();
    let phi = product_state(input)?;

    let f_in_of = |tilt: f64| (tilt / 2.0).cos().powi(2 * n as i32);
    let tilt = if target_f_in >= 1.0 {
        0.0
    } else if target_f_in <= 0.0 {
        std::f64::consts::PI
    } else {
        bisect(0.0, std::f64::consts::PI, f_in_of, target_f_in)
    };
    let a = tilted_input(input, tilt)?;
    let f_in = a.fidelity(&phi);
    if (f_in - target_f_in).abs() > 1e-6 {
        return Err(Error::SearchFailure(format!(
            "input fidelity {f_in} misses {target_f_in}"
        )));
    }

    let m = lattice.edges.len();
    let mut weights = vec![0.0; 2 * m + 1];
    for (z, amp) in a.amplitudes().iter().enumerate() {
        let s = crate::simulator::zz_energy(z as u64, &lattice.edges);
        weights[(s + m as i64) as usize] += amp.norm_sqr();
    }
    let overlap = |eta: f64| echo_overlap(&weights, m, eta);
    let eta = if target_o10_sq >= 1.0 {
        0.0
    } else {
        let step = 1e-3;
        let mut hi = None;
        let mut e = 0.0;
        while e < 8.0 {
            e += step;
            if overlap(e) < target_o10_sq {
                hi = Some(e);
                break;
            }
        }
        let hi = hi.ok_or_else(|| {
            Error::SearchFailure(format!(
                "no evolution error reaches 4|Tr[rho O_10]|^2 = {target_o10_sq}"
            ))
        })?;
        bisect(hi - step, hi, overlap, target_o10_sq)
    };

    let noise = NoiseModel {
        eta,
        input_tilt: tilt,
        ..NoiseModel::default()
    };
    let model = make_honest_model(lattice, input, &noise)?;
    let got = model.exact_parameters()?;
    if (got.o10_sq_scaled() - target_o10_sq).abs() > 1e-6 || (got.f_in - target_f_in).abs() > 1e-6 {
        return Err(Error::SearchFailure(format!(
            "reached (o10 {}, f_in {}) for targets ({target_o10_sq}, {target_f_in})",
            got.o10_sq_scaled(),
            got.f_in
        )));
    }
    Ok(model)
}
