//! Random states for property checks.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::dense::CMatrix;
use super::DensityMatrix;
use crate::simulator::PureState;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_pure_state<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> PureState {
    let amps = (0..1 << num_qubits).map(|_| gaussian(rng)).collect();
    PureState::normalized(num_qubits, amps).expect("gaussian vector is non-zero")
}

/// `G G^dagger / Tr` for a `dim x rank` Ginibre matrix `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(
    num_qubits: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let dim = 1 << num_qubits;
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut m = m / tr;
    // Remove the rounding-level anti-Hermitian part.
    m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(m).expect("Ginibre construction is a density matrix")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    q * CMatrix::from_diagonal(&phases)
}

/// Random Hermitian matrix with unit operator norm.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let norm = h
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    h / Complex64::new(norm, 0.0)
}
