use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};

use super::{merge_counters, Counters, BLOCK_SIZE};
use crate::prover::MeasurementMode;
use crate::simulator::format_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisChoice {
    X,
    Y,
}

/// One copy of the protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub copy_index: u64,
    pub b_sampling: u8,
    pub b_testtype: u8,
    /// Clock basis of a propagation test.
    pub basis_choice: Option<BasisChoice>,
    pub clock_outcome: i8,
    /// Bit string, qubit 0 first; empty when the branch discards it.
    pub system_outcomes: String,
    /// `[re, im]` of the de facto outcome, propagation tests only.
    pub u: Option<[f64; 2]>,
}

impl TranscriptRecord {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        copy_index: u64,
        b_sampling: bool,
        b_testtype: bool,
        mode: MeasurementMode,
        clock_minus: bool,
        system: u64,
        n: usize,
        u: Option<Complex64>,
    ) -> Self {
        let discarded = mode == MeasurementMode::Sample && !clock_minus;
        Self {
            copy_index,
            b_sampling: u8::from(b_sampling),
            b_testtype: u8::from(b_testtype),
            basis_choice: match mode {
                MeasurementMode::PropTestX => Some(BasisChoice::X),
                MeasurementMode::PropTestY => Some(BasisChoice::Y),
                _ => None,
            },
            clock_outcome: if clock_minus { -1 } else { 1 },
            system_outcomes: if discarded {
                String::new()
            } else {
                format_bits(system, n)
            },
            u: u.map(|z| [z.re, z.im]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProtocolTranscript {
    pub records: Vec<TranscriptRecord>,
}

impl ProtocolTranscript {
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line).map_err(io::Error::other)?);
        }
        Ok(Self { records })
    }

    /// Propagation-test counters rebuilt from the records with the same
    /// block structure as the live run.
    pub fn propagation_counters(&self) -> Counters {
        let mut blocks: Vec<Counters> = Vec::new();
        for r in &self.records {
            let b = (r.copy_index / BLOCK_SIZE as u64) as usize;
            if blocks.len() <= b {
                blocks.resize(b + 1, Counters::default());
            }
            let (Some(choice), Some([re, im])) = (r.basis_choice, r.u) else {
                continue;
            };
            let u = Complex64::new(re, im);
            let bu = if r.clock_outcome == -1 { -u } else { u };
            let c = &mut blocks[b];
            match choice {
                BasisChoice::X => {
                    c.n_x += 1;
                    c.s_xu += bu;
                }
                BasisChoice::Y => {
                    c.n_y += 1;
                    c.s_yu += bu;
                }
            }
        }
        merge_counters(&blocks)
    }

    /// `4 |o10_m|^2` recomputed from the records.
    pub fn o10_sq_scaled(&self) -> Option<f64> {
        self.propagation_counters()
            .o10()
            .map(|z| 4.0 * z.norm_sqr())
    }
}
