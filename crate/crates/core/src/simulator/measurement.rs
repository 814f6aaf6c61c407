use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use super::gates::{self, Gate};
use super::state::input_amplitudes;
use crate::lattice::InputType;

/// Single-qubit measurement bases.
///
/// `XRot`/`YRot` are the `{|x>, |x_perp>}` and `{|y>, |y_perp>}` bases of the
/// two input states; outcome `+1` means the qubit was found in the input
/// state itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    Z,
    X,
    Y,
    #[serde(rename = "XROT")]
    XRot,
    #[serde(rename = "YROT")]
    YRot,
}

impl BasisLabel {
    pub fn rotated_for(kind: InputType) -> Self {
        match kind {
            InputType::X => BasisLabel::XRot,
            InputType::Y => BasisLabel::YRot,
        }
    }
}

/// Unitary whose rows are `<e_+|` and `<e_-|` for the basis eigenstates, so
/// that applying it and measuring Z reports `+1` for `e_+` (bit 0).
pub fn basis_change(label: BasisLabel) -> Gate {
    let bra_rows = |plus: [Complex64; 2]| -> Gate {
        // Orthogonal complement of (a, b) is (-b*, a*).
        let minus = [-plus[1].conj(), plus[0].conj()];
        [
            [plus[0].conj(), plus[1].conj()],
            [minus[0].conj(), minus[1].conj()],
        ]
    };
    let r = FRAC_1_SQRT_2;
    match label {
        BasisLabel::Z => gates::identity(),
        BasisLabel::X => gates::hadamard(),
        BasisLabel::Y => bra_rows([Complex64::new(r, 0.0), Complex64::new(0.0, r)]),
        BasisLabel::XRot => bra_rows(input_amplitudes(InputType::X)),
        BasisLabel::YRot => bra_rows(input_amplitudes(InputType::Y)),
    }
}

/// Outcomes of one copy: the clock first, then the system register.
///
/// `outcomes` is empty when the protocol branch leaves the system
/// unmeasured (clock outcome on the wrong side).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub clock_basis: BasisLabel,
    pub clock_outcome: i8,
    pub basis_labels: Vec<BasisLabel>,
    pub outcomes: Vec<i8>,
}

impl MeasurementRecord {
    /// System outcomes as a bitmask (`-1` is bit 1).
    pub fn outcome_bits(&self) -> u64 {
        self.outcomes
            .iter()
            .enumerate()
            .fold(0, |m, (k, &o)| if o == -1 { m | (1 << k) } else { m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::gates::unitarity_error;

    fn apply(g: &Gate, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            g[0][0] * v[0] + g[0][1] * v[1],
            g[1][0] * v[0] + g[1][1] * v[1],
        ]
    }

    #[test]
    fn basis_changes_are_unitary() {
        for l in [
            BasisLabel::Z,
            BasisLabel::X,
            BasisLabel::Y,
            BasisLabel::XRot,
            BasisLabel::YRot,
        ] {
            assert!(unitarity_error(&basis_change(l)) < 1e-15, "{l:?}");
        }
    }

    #[test]
    fn rotated_bases_map_input_to_plus() {
        for kind in [InputType::X, InputType::Y] {
            let out = apply(
                &basis_change(BasisLabel::rotated_for(kind)),
                input_amplitudes(kind),
            );
            assert!((out[0].norm_sqr() - 1.0).abs() < 1e-15);
            assert!(out[1].norm() < 1e-15);
        }
    }

    #[test]
    fn y_basis_plus_i() {
        let r = FRAC_1_SQRT_2;
        let plus_i = [Complex64::new(r, 0.0), Complex64::new(0.0, r)];
        let out = apply(&basis_change(BasisLabel::Y), plus_i);
        assert!((out[0].norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn outcome_bits() {
        let rec = MeasurementRecord {
            clock_basis: BasisLabel::Z,
            clock_outcome: -1,
            basis_labels: vec![BasisLabel::X; 3],
            outcomes: vec![1, -1, -1],
        };
        assert_eq!(rec.outcome_bits(), 0b110);
    }
}
