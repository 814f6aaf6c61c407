//! Single-qubit gate matrices, row major.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Gate = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Gate {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Gate {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Gate {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Gate {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn hadamard() -> Gate {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `exp(-i t Z / 2)`.
pub fn rz(t: f64) -> Gate {
    [
        [Complex64::from_polar(1.0, -t / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, t / 2.0)],
    ]
}

pub fn matmul(a: &Gate, b: &Gate) -> Gate {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn adjoint(a: &Gate) -> Gate {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Largest entry deviation of `g^dagger g` from the identity.
pub fn unitarity_error(g: &Gate) -> f64 {
    let p = matmul(&adjoint(g), g);
    let id = identity();
    p.iter()
        .flatten()
        .zip(id.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
