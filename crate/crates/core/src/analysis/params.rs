use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense;
use super::DensityMatrix;
use crate::lattice::{InputSpec, LatticeGeometry};
use crate::simulator::product_state;
use crate::{Error, Result, MAX_DENSE_QUBITS};

/// The protocol parameters of a clock-plus-system state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactParameters {
    /// Input fidelity `F_in`.
    pub f_in: f64,
    /// Probability of a `-1` clock outcome.
    pub p_samp: f64,
    /// `Tr[rho O_10]` with `O_10 = |1><0| (x) U`.
    pub tr_rho_o10: Complex64,
    /// Output fidelity.
    pub f_out: f64,
    pub purity: f64,
}

impl ExactParameters {
    /// `4 |Tr[rho O_10]|^2`, the quantity the verifier thresholds.
    pub fn o10_sq_scaled(&self) -> f64 {
        4.0 * self.tr_rho_o10.norm_sqr()
    }
}

/// Evaluate the defining sums over an ensemble `{(p_i, |psi_i>)}`.
///
/// Each `|psi_i> = alpha_i |0>|phi_i> + beta_i |1>|phi'_i>`; the clock is the
/// top qubit, so the two halves of the vector are `alpha_i |phi_i>` and
/// `beta_i |phi'_i>`. The sums are invariant under any unitary mixing of
/// vectors that share a weight.
pub fn parameters_from_ensemble(
    weights: &[f64],
    vectors: &[DVector<Complex64>],
    lattice: &LatticeGeometry,
    input: &InputSpec,
) -> Result<ExactParameters> {
    input.check_matches(lattice)?;
    let n = lattice.num_qubits();
    let half = 1usize << n;
    let phi_in = DVector::from_vec(product_state(input)?.into_amplitudes());
    let u = dense::propagator_expm(lattice, 1.0);
    let u_phi = &u * &phi_in;

    let (mut in_num, mut in_den, mut p_samp, mut out_num) = (0.0, 0.0, 0.0, 0.0);
    let mut tr = Complex64::new(0.0, 0.0);
    let mut purity = 0.0;
    for (&p, v) in weights.iter().zip(vectors) {
        if v.len() != 2 * half {
            return Err(Error::DimensionMismatch {
                expected: 2 * half,
                actual: v.len(),
            });
        }
        let top = v.rows(0, half);
        let bottom = v.rows(half, half);
        in_num += p * phi_in.dotc(&top).norm_sqr();
        in_den += p * top.norm_squared();
        p_samp += p * bottom.norm_squared();
        tr += (bottom.adjoint() * (&u * top))[(0, 0)] * p;
        out_num += p * u_phi.dotc(&bottom).norm_sqr();
        purity += p * p;
    }
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    Ok(ExactParameters {
        f_in: ratio(in_num, in_den),
        p_samp,
        tr_rho_o10: tr,
        f_out: ratio(out_num, p_samp),
        purity,
    })
}

/// Exact `F_in`, `p_samp`, `Tr[rho O_10]`, `F_out` and purity of a density
/// matrix on clock plus an `n <= 6` qubit lattice.
pub fn exact_parameters(
    rho: &DensityMatrix,
    lattice: &LatticeGeometry,
    input: &InputSpec,
) -> Result<ExactParameters> {
    let n = lattice.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "exact parameters",
            requested: n,
            limit: MAX_DENSE_QUBITS,
        });
    }
    if rho.num_qubits() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: rho.num_qubits(),
        });
    }
    let eig = rho.matrix().clone().symmetric_eigen();
    let weights: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let vectors: Vec<DVector<Complex64>> = eig
        .eigenvectors
        .column_iter()
        .map(|c| c.into_owned())
        .collect();
    parameters_from_ensemble(&weights, &vectors, lattice, input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::random::{random_density_matrix, random_unitary};
    use crate::lattice::{build_lattice, random_input, InputType};
    use crate::rng::Substreams;
    use crate::simulator::{apply_zz_evolution, PureState};
    use dense::CMatrix;

    fn history_state(lattice: &LatticeGeometry, input: &InputSpec, theta: f64) -> PureState {
        let phi = product_state(input).unwrap();
        let out = apply_zz_evolution(phi.clone(), lattice, 1.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = phi.into_amplitudes();
        amps.iter_mut().for_each(|a| *a *= r);
        let ph = Complex64::from_polar(r, theta);
        amps.extend(out.amplitudes().iter().map(|a| a * ph));
        PureState::new(lattice.num_qubits() + 1, amps).unwrap()
    }

    /// Basis-free route: projector traces on the density matrix.
    fn trace_route(
        rho: &DensityMatrix,
        lattice: &LatticeGeometry,
        input: &InputSpec,
    ) -> ExactParameters {
        let n = lattice.num_qubits();
        let half = 1 << n;
        let m = rho.matrix();
        let phi = DVector::from_vec(product_state(input).unwrap().into_amplitudes());
        let u = dense::propagator_expm(lattice, 1.0);
        let u_phi = &u * &phi;
        let block = |r: usize, c: usize| m.view((r * half, c * half), (half, half)).into_owned();
        let (b00, b11) = (block(0, 0), block(1, 1));
        let p0 = b00.trace().re;
        let p1 = b11.trace().re;
        // Tr[rho (|1><0| (x) U)] = Tr[rho_{01} U] where rho_{01} = <0|rho|1>.
        let b01 = block(0, 1);
        let tr = (b01 * &u).trace();
        ExactParameters {
            f_in: (phi.adjoint() * &b00 * &phi)[(0, 0)].re / p0,
            p_samp: p1,
            tr_rho_o10: tr,
            f_out: (u_phi.adjoint() * &b11 * &u_phi)[(0, 0)].re / p1,
            purity: (m * m).trace().re,
        }
    }

    fn assert_close(a: &ExactParameters, b: &ExactParameters, tol: f64) {
        assert!(
            (a.f_in - b.f_in).abs() < tol,
            "f_in {} vs {}",
            a.f_in,
            b.f_in
        );
        assert!((a.p_samp - b.p_samp).abs() < tol);
        assert!(
            (a.tr_rho_o10 - b.tr_rho_o10).norm() < tol,
            "{} vs {}",
            a.tr_rho_o10,
            b.tr_rho_o10
        );
        assert!((a.f_out - b.f_out).abs() < tol);
        assert!((a.purity - b.purity).abs() < tol);
    }

    #[test]
    fn perfect_history_state() {
        let lat = build_lattice(2, 2).unwrap();
        let input = random_input(4, &mut Substreams::new(5, "t").stream(0));
        for theta in [0.0, 0.7, -2.1] {
            let rho = DensityMatrix::from_pure(&history_state(&lat, &input, theta));
            let p = exact_parameters(&rho, &lat, &input).unwrap();
            assert!((p.f_in - 1.0).abs() < 1e-10);
            assert!((p.p_samp - 0.5).abs() < 1e-10);
            assert!((p.tr_rho_o10.norm_sqr() - 0.25).abs() < 1e-10);
            assert!((p.tr_rho_o10 - Complex64::from_polar(0.5, -theta)).norm() < 1e-10);
            assert!((p.f_out - 1.0).abs() < 1e-10);
            assert!((p.purity - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_state() {
        let lat = build_lattice(1, 3).unwrap();
        let input = InputSpec::uniform(3, InputType::Y);
        let p = exact_parameters(&DensityMatrix::maximally_mixed(4), &lat, &input).unwrap();
        assert!((p.p_samp - 0.5).abs() < 1e-12);
        assert!(p.tr_rho_o10.norm() < 1e-12);
        assert!((p.f_in - 1.0 / 8.0).abs() < 1e-12);
        assert!((p.purity - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_route_matches_trace_route() {
        let fam = Substreams::new(17, "params");
        for (i, (r, c)) in [(1, 2), (1, 3), (2, 2)].into_iter().enumerate() {
            let lat = build_lattice(r, c).unwrap();
            let n = lat.num_qubits();
            let mut rng = fam.stream(i as u64);
            let input = random_input(n, &mut rng);
            let rho = random_density_matrix(n + 1, 3, &mut rng);
            let a = exact_parameters(&rho, &lat, &input).unwrap();
            let b = trace_route(&rho, &lat, &input);
            assert_close(&a, &b, 1e-10);
            assert!((a.purity - rho.purity()).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_eigenspaces_are_basis_free() {
        // Rank-3 state with a doubly degenerate eigenvalue.
        let lat = build_lattice(1, 2).unwrap();
        let input = InputSpec::new(vec![InputType::X, InputType::Y]);
        let mut rng = Substreams::new(23, "degenerate").stream(0);
        let basis = random_unitary(8, &mut rng);
        let weights = [0.4, 0.3, 0.3];
        let vectors: Vec<DVector<Complex64>> =
            (0..3).map(|k| basis.column(k).into_owned()).collect();
        let a = parameters_from_ensemble(&weights, &vectors, &lat, &input).unwrap();

        // Rotate within the degenerate pair.
        let mix = random_unitary(2, &mut rng);
        let v1 = &vectors[1] * mix[(0, 0)] + &vectors[2] * mix[(1, 0)];
        let v2 = &vectors[1] * mix[(0, 1)] + &vectors[2] * mix[(1, 1)];
        let rotated = vec![vectors[0].clone(), v1, v2];
        let b = parameters_from_ensemble(&weights, &rotated, &lat, &input).unwrap();
        assert_close(&a, &b, 1e-12);

        let mut m = CMatrix::zeros(8, 8);
        for (w, v) in weights.iter().zip(&vectors) {
            m += v * v.adjoint() * Complex64::new(*w, 0.0);
        }
        let c = exact_parameters(&DensityMatrix::new(m).unwrap(), &lat, &input).unwrap();
        assert_close(&a, &c, 1e-10);
    }

    #[test]
    fn size_checks() {
        let lat = build_lattice(1, 2).unwrap();
        let input = InputSpec::uniform(2, InputType::X);
        assert!(exact_parameters(&DensityMatrix::maximally_mixed(2), &lat, &input).is_err());
    }
}
