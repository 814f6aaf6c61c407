//! Dense-matrix constructions used as independent oracles.
//!
//! Everything here is built from Kronecker products and matrix functions,
//! never from the bit-level kernels in [`crate::simulator`]. Qubit `k` is
//! bit `k` of the row index, so `kron_gates(&[g0, g1])` is `g1 (x) g0`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

use crate::lattice::LatticeGeometry;
use crate::simulator::{gates, Gate};

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn gate_matrix(g: &Gate) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[g[0][0], g[0][1], g[1][0], g[1][1]])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `g[n-1] (x) ... (x) g[0]`.
pub fn kron_gates(g: &[Gate]) -> CMatrix {
    g.iter().fold(CMatrix::identity(1, 1), |acc, gi| {
        kron(&gate_matrix(gi), &acc)
    })
}

/// Product vector with `v[0]` on qubit 0.
pub fn kron_vectors(v: &[Vec<Complex64>]) -> Vec<Complex64> {
    v.iter().fold(vec![c(1.0)], |acc, vi| {
        let mut out = Vec::with_capacity(acc.len() * vi.len());
        for b in vi {
            out.extend(acc.iter().map(|a| a * b));
        }
        out
    })
}

/// Single-qubit operator `g` on qubit `q` of an `n`-qubit register.
pub fn embed(n: usize, q: usize, g: &Gate) -> CMatrix {
    let ops: Vec<Gate> = (0..n)
        .map(|k| if k == q { *g } else { gates::identity() })
        .collect();
    kron_gates(&ops)
}

pub fn zz_term(n: usize, i: usize, j: usize) -> CMatrix {
    embed(n, i, &gates::pauli_z()) * embed(n, j, &gates::pauli_z())
}

/// `H = (pi/4) sum_{edges} Z_i Z_j`.
pub fn zz_hamiltonian(lattice: &LatticeGeometry) -> CMatrix {
    let n = lattice.num_qubits();
    let dim = 1 << n;
    lattice
        .edges
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, &[i, j]| {
            acc + zz_term(n, i, j) * c(FRAC_PI_4)
        })
}

/// `exp(-i t H)` by Pade matrix exponential.
pub fn propagator_expm(lattice: &LatticeGeometry, t: f64) -> CMatrix {
    (zz_hamiltonian(lattice) * Complex64::new(0.0, -t)).exp()
}

/// `prod_k (cos(pi/4) I - i sin(pi/4) H_k)` over the edges.
pub fn propagator_product(lattice: &LatticeGeometry) -> CMatrix {
    let n = lattice.num_qubits();
    let dim = 1 << n;
    let id = CMatrix::identity(dim, dim);
    lattice.edges.iter().fold(id.clone(), |acc, &[i, j]| {
        let factor =
            &id * c(FRAC_PI_4.cos()) - zz_term(n, i, j) * Complex64::new(0.0, FRAC_PI_4.sin());
        acc * factor
    })
}

/// `|0><0|_c (x) I + |1><1|_c (x) Z_{targets}`.
pub fn controlled_z_string(n: usize, control: usize, targets: &[usize]) -> CMatrix {
    let dim = 1 << n;
    let zs = targets.iter().fold(CMatrix::identity(dim, dim), |acc, &t| {
        acc * embed(n, t, &gates::pauli_z())
    });
    let p0: Gate = [[c(1.0), c(0.0)], [c(0.0), c(0.0)]];
    let p1: Gate = [[c(0.0), c(0.0)], [c(0.0), c(1.0)]];
    embed(n, control, &p0) + embed(n, control, &p1) * zs
}

/// `exp(-i t H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_evolution(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases =
        CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -t * l)));
    v * phases * v.adjoint()
}

pub fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
