use crate::lattice::{InputSpec, LatticeGeometry};
use crate::simulator::{apply_gate_in_place, gates, product_state, zz_phase_in_place, PureState};
use crate::{Error, Result, MAX_ECHO_QUBITS};

/// Gate-level echo preparation of the history state with the clock as the
/// top qubit.
///
/// Starting from `|+>|phi_in>`, the circuit conjugates a half-time evolution
/// by a clock-controlled `X` on partition B (a global CZ dressed with
/// Hadamards on B), swaps the clock branches with `X` and evolves for the
/// remaining half time. The controlled `Z` it also applies to partition A
/// commutes with the evolution and cancels.
pub fn echo_prepare(lattice: &LatticeGeometry, input: &InputSpec) -> Result<PureState> {
    input.check_matches(lattice)?;
    let n = lattice.num_qubits();
    if n > MAX_ECHO_QUBITS {
        return Err(Error::Capacity {
            what: "echo circuit",
            requested: n,
            limit: MAX_ECHO_QUBITS,
        });
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let plus = num_complex::Complex64::new(r, 0.0);
    let mut state = product_state(input)?.with_clock(plus, plus);
    let clock = n;
    let h = gates::hadamard();
    let b = &lattice.partition_b;
    let system: Vec<usize> = (0..n).collect();

    let hadamard_b = |s: &mut PureState| {
        for &q in b {
            apply_gate_in_place(s.amplitudes_mut(), q, &h);
        }
    };
    let controlled_x_b = |s: PureState| -> Result<PureState> {
        let mut s = s;
        hadamard_b(&mut s);
        let mut s = crate::simulator::apply_global_cz(s, clock, &system)?;
        hadamard_b(&mut s);
        Ok(s)
    };

    state = controlled_x_b(state)?;
    zz_phase_in_place(state.amplitudes_mut(), &lattice.edges, 0.5);
    state = controlled_x_b(state)?;
    apply_gate_in_place(state.amplitudes_mut(), clock, &gates::pauli_x());
    zz_phase_in_place(state.amplitudes_mut(), &lattice.edges, 0.5);
    Ok(state)
}
