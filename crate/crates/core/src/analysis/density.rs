use nalgebra::DVector;
use num_complex::Complex64;

use super::dense::CMatrix;
use crate::simulator::PureState;
use crate::{Error, Result, MAX_DENSE_QUBITS};

const TOL: f64 = 1e-10;

/// A validated density matrix on at most `MAX_DENSE_QUBITS + 1` qubits.
///
/// When it describes a clock plus system, the clock is the most significant
/// qubit: rows `0..2^n` are the clock-`|0>` block.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() {
            return Err(Error::validation(format!(
                "density matrix must be square with power-of-two size, got {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        if num_qubits > MAX_DENSE_QUBITS + 1 {
            return Err(Error::Capacity {
                what: "density matrix",
                requested: num_qubits,
                limit: MAX_DENSE_QUBITS + 1,
            });
        }
        let herm = (&matrix - matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > TOL {
            return Err(Error::validation(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TOL {
            return Err(Error::validation(format!("trace {trace} is not 1")));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -TOL {
            return Err(Error::validation(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = DVector::from_column_slice(state.amplitudes());
        Self {
            num_qubits: state.num_qubits(),
            matrix: &v * v.adjoint(),
        }
    }

    /// `sum_k w_k |psi_k><psi_k|` for normalized weights.
    pub fn from_ensemble(weights: &[f64], states: &[PureState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::validation("empty ensemble"))?;
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: s.dim(),
                });
            }
            let v = DVector::from_column_slice(s.amplitudes());
            m += &v * v.adjoint() * Complex64::new(*w, 0.0);
        }
        Self::new(m)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            matrix: CMatrix::identity(dim, dim) / Complex64::new(dim as f64, 0.0),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `<psi| rho |psi>`.
    pub fn expectation_pure(&self, psi: &PureState) -> f64 {
        let v = DVector::from_column_slice(psi.amplitudes());
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }

    /// `1/2 ||self - other||_1` from the eigenvalues of the difference.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.matrix - &other.matrix;
        0.5 * diff
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .sum::<f64>()
    }

    /// Mix with the maximally mixed state: `(1-p) rho + p I/d`.
    pub fn depolarize(&self, p: f64) -> Self {
        let mm = Self::maximally_mixed(self.num_qubits);
        Self {
            num_qubits: self.num_qubits,
            matrix: &self.matrix * Complex64::new(1.0 - p, 0.0)
                + mm.matrix * Complex64::new(p, 0.0),
        }
    }
}
