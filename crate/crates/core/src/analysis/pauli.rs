//! Pauli strings, the `PHP = -H` check and the generalized echo.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::dense::{self, CMatrix};
use crate::lattice::LatticeGeometry;
use crate::simulator::{gates, Gate, PureState};
use crate::{Error, Result, MAX_DENSE_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn gate(self) -> Gate {
        match self {
            Pauli::I => gates::identity(),
            Pauli::X => gates::pauli_x(),
            Pauli::Y => gates::pauli_y(),
            Pauli::Z => gates::pauli_z(),
        }
    }

    /// True when the two single-qubit factors anticommute.
    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis, written qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self(vec![Pauli::I; n])
    }

    /// `ops` on the listed qubits, identity elsewhere.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in sites {
            s.0[q] = p;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn anticommutes(&self, other: &PauliString) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::MalformedTerm(format!(
                "Pauli strings of lengths {} and {} do not act on the same register",
                self.len(),
                other.len()
            )));
        }
        let flips = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a.anticommutes(**b))
            .count();
        Ok(flips % 2 == 1)
    }

    pub fn matrix(&self) -> CMatrix {
        let g: Vec<Gate> = self.0.iter().map(|p| p.gate()).collect();
        dense::kron_gates(&g)
    }

    /// Apply to a vector without forming the matrix.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut flip = 0usize;
        let mut out = DVector::zeros(v.len());
        for (q, p) in self.0.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip |= 1 << q;
            }
        }
        for (idx, amp) in v.iter().enumerate() {
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, p) in self.0.iter().enumerate() {
                let bit = (idx >> q) & 1 == 1;
                phase *= match (p, bit) {
                    (Pauli::Z, true) => Complex64::new(-1.0, 0.0),
                    (Pauli::Y, false) => Complex64::new(0.0, 1.0),
                    (Pauli::Y, true) => Complex64::new(0.0, -1.0),
                    _ => Complex64::new(1.0, 0.0),
                };
            }
            out[idx ^ flip] = amp * phase;
        }
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.symbol()))
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::MalformedTerm(format!(
                    "unknown Pauli symbol {other:?} in {s:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

/// `coefficient * string`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, string: PauliString) -> Self {
        Self {
            coefficient,
            string,
        }
    }

    pub fn parse(coefficient: f64, s: &str) -> Result<Self> {
        Ok(Self::new(coefficient, s.parse()?))
    }
}

fn check_terms(terms: &[PauliTerm], p: &PauliString) -> Result<()> {
    for t in terms {
        if !t.coefficient.is_finite() {
            return Err(Error::MalformedTerm(format!(
                "non-finite coefficient on {}",
                t.string
            )));
        }
        if t.string.len() != p.len() {
            return Err(Error::MalformedTerm(format!(
                "term {} has {} sites, P has {}",
                t.string,
                t.string.len(),
                p.len()
            )));
        }
    }
    Ok(())
}

/// True iff `P` anticommutes with every term, i.e. `P H P = -H`.
pub fn php_negation_check(terms: &[PauliTerm], p: &PauliString) -> Result<bool> {
    check_terms(terms, p)?;
    for t in terms {
        if t.coefficient != 0.0 && !t.string.anticommutes(p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn hamiltonian_matrix(terms: &[PauliTerm], n: usize) -> CMatrix {
    let dim = 1 << n;
    terms.iter().fold(CMatrix::zeros(dim, dim), |acc, t| {
        acc + t.string.matrix() * Complex64::new(t.coefficient, 0.0)
    })
}

/// `(pi/4) Z_i Z_j` on every edge.
pub fn zz_terms(lattice: &LatticeGeometry) -> Vec<PauliTerm> {
    let n = lattice.num_qubits();
    lattice
        .edges
        .iter()
        .map(|&[i, j]| {
            PauliTerm::new(
                std::f64::consts::FRAC_PI_4,
                PauliString::from_sites(n, &[(i, Pauli::Z), (j, Pauli::Z)]),
            )
        })
        .collect()
}

/// `sum_edges (XX + YY) + sum_sites Z` with the given couplings.
pub fn xy_z_terms(lattice: &LatticeGeometry, hopping: f64, field: f64) -> Vec<PauliTerm> {
    let n = lattice.num_qubits();
    let mut terms = Vec::new();
    for &[i, j] in &lattice.edges {
        for p in [Pauli::X, Pauli::Y] {
            terms.push(PauliTerm::new(
                hopping,
                PauliString::from_sites(n, &[(i, p), (j, p)]),
            ));
        }
    }
    for q in 0..n {
        terms.push(PauliTerm::new(
            field,
            PauliString::from_sites(n, &[(q, Pauli::Z)]),
        ));
    }
    terms
}

/// `on_a` on partition A and `on_b` on partition B.
pub fn bipartite_string(lattice: &LatticeGeometry, on_a: Pauli, on_b: Pauli) -> PauliString {
    PauliString(
        (0..lattice.num_qubits())
            .map(|q| {
                if lattice.in_partition_b(q) {
                    on_b
                } else {
                    on_a
                }
            })
            .collect(),
    )
}

/// Prepare `(|0>|phi> + |1> e^{-iHT}|phi>)/sqrt(2)` with the sequence
/// `e^{-iHT/2} X_c CP e^{-iHT/2} CP` on `|+>|phi>`, where `CP` applies `P`
/// when the clock is `|1>`. The clock is the top qubit of the result.
pub fn generalized_echo_prepare(
    terms: &[PauliTerm],
    p: &PauliString,
    input: &PureState,
    time: f64,
) -> Result<PureState> {
    let n = p.len();
    if input.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: input.num_qubits(),
        });
    }
    if n + 1 > MAX_DENSE_QUBITS + 1 {
        return Err(Error::Capacity {
            what: "generalized echo",
            requested: n + 1,
            limit: MAX_DENSE_QUBITS + 1,
        });
    }
    if !php_negation_check(terms, p)? {
        return Err(Error::NotInvertible(format!(
            "{p} does not anticommute with every Hamiltonian term"
        )));
    }
    let half_step = dense::hermitian_evolution(&hamiltonian_matrix(terms, n), time / 2.0);
    let phi = DVector::from_column_slice(input.amplitudes())
        * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (mut c0, mut c1) = (phi.clone(), phi);
    c1 = p.apply(&c1);
    c0 = &half_step * c0;
    c1 = &half_step * c1;
    c1 = p.apply(&c1);
    std::mem::swap(&mut c0, &mut c1);
    c0 = &half_step * c0;
    c1 = &half_step * c1;
    let mut amps: Vec<Complex64> = c0.iter().copied().collect();
    amps.extend(c1.iter());
    PureState::normalized(n + 1, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::random::random_pure_state;
    use crate::lattice::{build_lattice, random_input};
    use crate::rng::Substreams;
    use crate::simulator::product_state;

    fn dense_history(terms: &[PauliTerm], phi: &PureState, time: f64) -> PureState {
        let n = phi.num_qubits();
        let u = (hamiltonian_matrix(terms, n) * Complex64::new(0.0, -time)).exp();
        let v = DVector::from_column_slice(phi.amplitudes());
        let out = &u * &v;
        let mut amps: Vec<Complex64> = v.iter().copied().collect();
        amps.extend(out.iter());
        PureState::normalized(n + 1, amps).unwrap()
    }

    fn term(c: f64, s: &str) -> PauliTerm {
        PauliTerm::parse(c, s).unwrap()
    }

    #[test]
    fn negation_examples() {
        let zz = [term(1.0, "ZZ")];
        assert!(php_negation_check(&zz, &"XI".parse().unwrap()).unwrap());
        assert!(!php_negation_check(&zz, &"ZZ".parse().unwrap()).unwrap());
        let lat = build_lattice(1, 2).unwrap();
        let h = xy_z_terms(&lat, 1.0, 1.0);
        assert!(php_negation_check(&h, &"XY".parse().unwrap()).unwrap());
        assert_eq!(bipartite_string(&lat, Pauli::X, Pauli::Y).to_string(), "XY");
    }

    #[test]
    fn negation_matches_dense_conjugation() {
        let lat = build_lattice(2, 2).unwrap();
        let h = xy_z_terms(&lat, 0.7, -0.3);
        let hm = hamiltonian_matrix(&h, 4);
        for s in ["XYYX", "XXXX", "ZIII", "YXXY", "IIII"] {
            let p: PauliString = s.parse().unwrap();
            let pm = p.matrix();
            let negated = dense::max_entry_diff(&(&pm * &hm * &pm), &(-hm.clone())) < 1e-12;
            assert_eq!(php_negation_check(&h, &p).unwrap(), negated, "{s}");
        }
    }

    #[test]
    fn malformed_terms() {
        assert!(matches!(
            "XQ".parse::<PauliString>(),
            Err(Error::MalformedTerm(_))
        ));
        let p: PauliString = "XI".parse().unwrap();
        assert!(matches!(
            php_negation_check(&[term(1.0, "ZZZ")], &p),
            Err(Error::MalformedTerm(_))
        ));
        assert!(matches!(
            php_negation_check(&[term(f64::NAN, "ZZ")], &p),
            Err(Error::MalformedTerm(_))
        ));
    }

    #[test]
    fn apply_matches_matrix() {
        let mut rng = Substreams::new(4, "pauli").stream(0);
        let psi = random_pure_state(3, &mut rng);
        let v = DVector::from_column_slice(psi.amplitudes());
        for s in ["XYZ", "YYI", "IZX", "III"] {
            let p: PauliString = s.parse().unwrap();
            let diff = (p.apply(&v) - p.matrix() * &v).norm();
            assert!(diff < 1e-14, "{s}");
        }
    }

    #[test]
    fn echo_zz_partition_b() {
        let streams = Substreams::new(5, "gecho");
        for (k, (r, c)) in [(1, 2), (2, 2), (2, 3)].into_iter().enumerate() {
            let lat = build_lattice(r, c).unwrap();
            let terms = zz_terms(&lat);
            let p = bipartite_string(&lat, Pauli::I, Pauli::X);
            let phi = product_state(&random_input(
                lat.num_qubits(),
                &mut streams.stream(k as u64),
            ))
            .unwrap();
            let got = generalized_echo_prepare(&terms, &p, &phi, 1.0).unwrap();
            let fid = got.fidelity(&dense_history(&terms, &phi, 1.0));
            assert!(fid >= 1.0 - 1e-10, "{r}x{c}: {fid}");
        }
    }

    #[test]
    fn echo_xy_z() {
        let lat = build_lattice(1, 2).unwrap();
        let terms = xy_z_terms(&lat, 1.0, 1.0);
        let p = bipartite_string(&lat, Pauli::X, Pauli::Y);
        let mut rng = Substreams::new(6, "gecho").stream(0);
        for t in [0.3, 1.0, 2.5] {
            let phi = random_pure_state(2, &mut rng);
            let got = generalized_echo_prepare(&terms, &p, &phi, t).unwrap();
            assert!(got.fidelity(&dense_history(&terms, &phi, t)) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn echo_zero_time() {
        let lat = build_lattice(1, 2).unwrap();
        let terms = xy_z_terms(&lat, 1.0, 1.0);
        let p = bipartite_string(&lat, Pauli::X, Pauli::Y);
        let phi = product_state(&crate::lattice::InputSpec::uniform(
            2,
            crate::lattice::InputType::Y,
        ))
        .unwrap();
        let got = generalized_echo_prepare(&terms, &p, &phi, 0.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = phi.with_clock(Complex64::new(r, 0.0), Complex64::new(r, 0.0));
        assert!(got.fidelity(&expect) >= 1.0 - 1e-12);
    }

    #[test]
    fn echo_rejects_commuting_p() {
        let lat = build_lattice(1, 2).unwrap();
        let phi = PureState::basis(2, 0);
        let r = generalized_echo_prepare(&zz_terms(&lat), &"ZZ".parse().unwrap(), &phi, 1.0);
        assert!(matches!(r, Err(Error::NotInvertible(_))));
    }
}
