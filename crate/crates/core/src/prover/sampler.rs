use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{HistoryStateModel, NoiseModel};
use crate::lattice::InputSpec;
use crate::simulator::{
    apply_gate_in_place, basis_change, flip_channel, walsh_hadamard, BasisLabel, Distribution,
    MeasurementRecord, PureState,
};
use crate::{Error, Result, MAX_STATE_QUBITS};

/// The four kinds of copy the verifier asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementMode {
    /// Clock in Z, system in X.
    #[serde(rename = "SAMPLE")]
    Sample,
    /// Clock in Z, every system qubit in the basis of its input state.
    #[serde(rename = "INPUT_TEST")]
    InputTest,
    /// Clock in X, system in Z.
    #[serde(rename = "PROP_TEST_X")]
    PropTestX,
    /// Clock in Y, system in Z.
    #[serde(rename = "PROP_TEST_Y")]
    PropTestY,
}

impl MeasurementMode {
    pub const ALL: [MeasurementMode; 4] = [
        MeasurementMode::Sample,
        MeasurementMode::InputTest,
        MeasurementMode::PropTestX,
        MeasurementMode::PropTestY,
    ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn clock_basis(self) -> BasisLabel {
        match self {
            MeasurementMode::Sample | MeasurementMode::InputTest => BasisLabel::Z,
            MeasurementMode::PropTestX => BasisLabel::X,
            MeasurementMode::PropTestY => BasisLabel::Y,
        }
    }
}

/// A mode together with the per-qubit bases it implies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementInstruction {
    pub mode: MeasurementMode,
    pub clock_basis: BasisLabel,
    pub system_bases: Vec<BasisLabel>,
}

impl MeasurementInstruction {
    pub fn new(mode: MeasurementMode, input: &InputSpec) -> Self {
        let system_bases = match mode {
            MeasurementMode::Sample => vec![BasisLabel::X; input.len()],
            MeasurementMode::InputTest => input
                .choices
                .iter()
                .map(|&k| BasisLabel::rotated_for(k))
                .collect(),
            MeasurementMode::PropTestX | MeasurementMode::PropTestY => {
                vec![BasisLabel::Z; input.len()]
            }
        };
        Self {
            mode,
            clock_basis: mode.clock_basis(),
            system_bases,
        }
    }
}

/// Exact joint outcome distributions of one model, one per mode.
///
/// An outcome is an `(n+1)`-bit index with the clock as the top bit; bit
/// value 1 is the `-1` outcome. Measurement flips are already folded in, so
/// every draw is a single alias-table lookup.
#[derive(Debug, Clone)]
pub struct CopySampler {
    num_qubits: usize,
    tables: [Distribution; 4],
}

fn in_basis(state: &PureState, bases: &[BasisLabel]) -> Vec<Complex64> {
    if bases.iter().all(|&b| b == BasisLabel::X) {
        return walsh_hadamard(state.clone()).into_amplitudes();
    }
    let mut amps = state.amplitudes().to_vec();
    for (q, &b) in bases.iter().enumerate() {
        if b != BasisLabel::Z {
            apply_gate_in_place(&mut amps, q, &basis_change(b));
        }
    }
    amps
}

impl CopySampler {
    /// Tables for the model with its own measurement flip rate.
    pub fn new(model: &HistoryStateModel) -> Result<Self> {
        Self::with_flip_rate(model, model.meas_flip())
    }

    pub fn with_flip_rate(model: &HistoryStateModel, meas_flip: f64) -> Result<Self> {
        let n = model.num_qubits();
        if n + 1 > MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                what: "copy sampler",
                requested: n + 1,
                limit: MAX_STATE_QUBITS,
            });
        }
        if !(0.0..=1.0).contains(&meas_flip) {
            return Err(Error::validation(format!(
                "flip rate {meas_flip} outside [0, 1]"
            )));
        }
        let tables = MeasurementMode::ALL.map(|mode| {
            let instr = MeasurementInstruction::new(mode, model.input());
            let p = joint_distribution(model, &instr);
            Distribution::new(p).and_then(|d| {
                if meas_flip > 0.0 {
                    flip_channel(&d, meas_flip)
                } else {
                    Ok(d)
                }
            })
        });
        let [a, b, c, d] = tables;
        Ok(Self {
            num_qubits: n,
            tables: [a?, b?, c?, d?],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn distribution(&self, mode: MeasurementMode) -> &Distribution {
        &self.tables[mode.index()]
    }

    /// Joint outcome index for one copy.
    #[inline]
    pub fn sample_index<R: Rng + ?Sized>(&self, mode: MeasurementMode, rng: &mut R) -> u64 {
        self.tables[mode.index()].sample(rng)
    }

    pub fn measure<R: Rng + ?Sized>(
        &self,
        instruction: &MeasurementInstruction,
        rng: &mut R,
    ) -> MeasurementRecord {
        let idx = self.sample_index(instruction.mode, rng);
        record_from_index(instruction, idx, self.num_qubits)
    }
}

fn spin(bit: u64) -> i8 {
    if bit & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Split a joint index into a record. The system outcomes are dropped for
/// a `+1` clock in the sampling branch, as that branch discards them.
pub fn record_from_index(
    instruction: &MeasurementInstruction,
    idx: u64,
    n: usize,
) -> MeasurementRecord {
    let clock_outcome = spin(idx >> n);
    let keep = !(instruction.mode == MeasurementMode::Sample && clock_outcome == 1);
    MeasurementRecord {
        clock_basis: instruction.clock_basis,
        clock_outcome,
        basis_labels: instruction.system_bases.clone(),
        outcomes: if keep {
            (0..n).map(|k| spin(idx >> k)).collect()
        } else {
            Vec::new()
        },
    }
}

fn joint_distribution(model: &HistoryStateModel, instr: &MeasurementInstruction) -> Vec<f64> {
    let n = model.num_qubits();
    let half = 1usize << n;
    let w = model.output_weight();
    let d = model.depolarized_weight();
    let uniform = 1.0 / half as f64;
    let a = in_basis(model.input_component(), &instr.system_bases);
    let branches: Vec<(f64, Vec<Complex64>)> = model
        .branches()
        .iter()
        .map(|(q, c)| (*q, in_basis(c, &instr.system_bases)))
        .collect();
    let mut p = vec![0.0; 2 * half];
    match instr.clock_basis {
        BasisLabel::Z => {
            for z in 0..half {
                p[z] = (1.0 - w) * a[z].norm_sqr();
                let coherent: f64 = branches.iter().map(|(q, c)| q * c[z].norm_sqr()).sum();
                p[half + z] = w * (coherent + d * uniform);
            }
        }
        clock => {
            // <+-| = (1, +-1)/sqrt2 for X and (1, -+i)/sqrt2 for Y.
            let m = match clock {
                BasisLabel::X => [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
                _ => [Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0)],
            };
            let s0 = (1.0 - w).sqrt();
            let s1 = Complex64::from_polar(w.sqrt(), model.clock_phase());
            for z in 0..half {
                let incoherent = d * 0.5 * ((1.0 - w) * a[z].norm_sqr() + w * uniform);
                for (bit, mb) in m.iter().enumerate() {
                    let coherent: f64 = branches
                        .iter()
                        .map(|(q, c)| q * 0.5 * (a[z] * s0 + mb * s1 * c[z]).norm_sqr())
                        .sum();
                    p[bit * half + z] = coherent + incoherent;
                }
            }
        }
    }
    p
}

/// Measure one copy of the model. The flip rate is taken from `noise`; the
/// other noise fields are already part of the model.
///
/// This builds the joint distributions on every call; loops should build a
/// [`CopySampler`] once instead.
pub fn measure_copy<R: Rng + ?Sized>(
    model: &HistoryStateModel,
    instruction: &MeasurementInstruction,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if instruction.system_bases.len() != model.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: model.num_qubits(),
            actual: instruction.system_bases.len(),
        });
    }
    Ok(CopySampler::with_flip_rate(model, noise.meas_flip)?.measure(instruction, rng))
}
