//! The verification protocol: per-copy branch selection, counters,
//! estimators and the accept/reject decision.

mod transcript;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::{pairwise_reduce, Execution};
use crate::prover::{CopySampler, HistoryStateModel, MeasurementMode};
use crate::rng::{tags, Substreams};
use crate::simulator::{format_bits, zz_energy};
use crate::{Error, Result};

pub use transcript::{BasisChoice, ProtocolTranscript, TranscriptRecord};

/// Copies per work unit. Counters are summed sequentially inside a block and
/// blocks are combined with a fixed pairwise tree.
pub const BLOCK_SIZE: usize = 4096;

fn default_num_copies() -> u64 {
    3_500_000
}

fn default_threshold() -> f64 {
    0.994
}

fn default_window() -> [f64; 2] {
    [0.494, 0.506]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "default_num_copies")]
    pub num_copies: u64,
    /// Floor on `4 |<O_10>_M|^2`.
    #[serde(default = "default_threshold")]
    pub threshold_o10: f64,
    #[serde(default = "default_threshold")]
    pub threshold_fin: f64,
    #[serde(default = "default_window")]
    pub psamp_window: [f64; 2],
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            num_copies: default_num_copies(),
            threshold_o10: default_threshold(),
            threshold_fin: default_threshold(),
            psamp_window: default_window(),
            master_seed: 0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("threshold_o10", self.threshold_o10),
            ("threshold_fin", self.threshold_fin),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        let [lo, hi] = self.psamp_window;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::validation(format!(
                "p_samp window [{lo}, {hi}] is not inside [0, 1]"
            )));
        }
        Ok(())
    }
}

/// Protocol counters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub s_xu: Complex64,
    pub s_yu: Complex64,
    pub n_x: u64,
    pub n_y: u64,
    /// Input-test copies with clock `+1`.
    pub n_in_plus: u64,
    /// ... of which every system outcome was `+1`.
    pub n_in_plus_0: u64,
    pub n_input_test: u64,
    /// Input-test copies with clock `-1`.
    pub n_input_clock_minus: u64,
    pub n_total_sampling: u64,
    /// Sampling copies with clock `-1`, i.e. stored samples.
    pub n_clock_minus: u64,
}

impl Counters {
    fn add_counts(&self, other: &Counters) -> Counters {
        Counters {
            s_xu: self.s_xu + other.s_xu,
            s_yu: self.s_yu + other.s_yu,
            n_x: self.n_x + other.n_x,
            n_y: self.n_y + other.n_y,
            n_in_plus: self.n_in_plus + other.n_in_plus,
            n_in_plus_0: self.n_in_plus_0 + other.n_in_plus_0,
            n_input_test: self.n_input_test + other.n_input_test,
            n_input_clock_minus: self.n_input_clock_minus + other.n_input_clock_minus,
            n_total_sampling: self.n_total_sampling + other.n_total_sampling,
            n_clock_minus: self.n_clock_minus + other.n_clock_minus,
        }
    }

    /// `(1/2)(h_XU - i h_YU)`, an unbiased estimate of `Tr[rho O_10]`.
    pub fn o10(&self) -> Option<Complex64> {
        if self.n_x == 0 || self.n_y == 0 {
            return None;
        }
        let h_x = self.s_xu / self.n_x as f64;
        let h_y = self.s_yu / self.n_y as f64;
        Some((h_x - Complex64::i() * h_y) * 0.5)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub num_qubits: usize,
    pub f_in_m: f64,
    pub p_samp_m: f64,
    pub o10_re: f64,
    pub o10_im: f64,
    /// `4 |o10_m|^2`.
    pub o10_sq_scaled: f64,
    pub accepted: bool,
    pub counters: Counters,
    /// Set when a zero denominator left an estimator undefined; the run is
    /// then rejected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undefined: Option<String>,
    /// Stored sampling outcomes as bitmasks.
    #[serde(skip)]
    pub samples: Vec<u64>,
}

impl EstimatorReport {
    pub fn o10_m(&self) -> Complex64 {
        Complex64::new(self.o10_re, self.o10_im)
    }

    pub fn estimator_error(&self) -> Option<Error> {
        self.undefined.clone().map(Error::EstimatorUndefined)
    }

    /// Samples as bit strings, qubit 0 first, one per line.
    pub fn samples_text(&self) -> String {
        let mut s = String::with_capacity(self.samples.len() * (self.num_qubits + 1));
        for &x in &self.samples {
            s.push_str(&format_bits(x, self.num_qubits));
            s.push('\n');
        }
        s
    }
}

/// The acceptance rule on the three estimators.
pub fn decide(o10_sq_scaled: f64, f_in_m: f64, p_samp_m: f64, config: &ProtocolConfig) -> bool {
    let [lo, hi] = config.psamp_window;
    o10_sq_scaled >= config.threshold_o10
        && f_in_m >= config.threshold_fin
        && (lo..=hi).contains(&p_samp_m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub execution: Execution,
    pub record_transcript: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub report: EstimatorReport,
    pub transcript: Option<ProtocolTranscript>,
}

struct Block {
    counters: Counters,
    samples: Vec<u64>,
    records: Vec<TranscriptRecord>,
}

/// `u` for each ZZ energy `s = -m..=m`, indexed by `s + m`.
fn u_by_energy(num_edges: usize) -> Vec<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let aligned = Complex64::new(r, -r);
    let anti = Complex64::new(r, r);
    let m = num_edges as i64;
    (-m..=m)
        .map(|s| {
            if (s + m) % 2 != 0 {
                return Complex64::new(0.0, 0.0);
            }
            let n_aligned = ((m + s) / 2) as i32;
            aligned.powi(n_aligned) * anti.powi(m as i32 - n_aligned)
        })
        .collect()
}

struct CopyContext<'a> {
    sampler: &'a CopySampler,
    edges: &'a [[usize; 2]],
    u_table: Vec<Complex64>,
    streams: Substreams,
    n: usize,
    record: bool,
}

impl CopyContext<'_> {
    fn run_block(&self, start: u64, end: u64) -> Block {
        let n = self.n;
        let mask = (1u64 << n) - 1;
        let m = self.edges.len() as i64;
        let mut c = Counters::default();
        let mut samples = Vec::new();
        let mut records = Vec::new();
        for copy in start..end {
            let mut rng = self.streams.stream(copy);
            let b_sampling: bool = rng.random();
            let b_testtype: bool = rng.random();
            let mode = if b_sampling {
                MeasurementMode::Sample
            } else if !b_testtype {
                MeasurementMode::InputTest
            } else if rng.random::<bool>() {
                MeasurementMode::PropTestY
            } else {
                MeasurementMode::PropTestX
            };
            let idx = self.sampler.sample_index(mode, &mut rng);
            let clock_minus = (idx >> n) & 1 == 1;
            let system = idx & mask;
            let mut u_rec = None;
            match mode {
                MeasurementMode::Sample => {
                    c.n_total_sampling += 1;
                    if clock_minus {
                        c.n_clock_minus += 1;
                        samples.push(system);
                    }
                }
                MeasurementMode::InputTest => {
                    c.n_input_test += 1;
                    if clock_minus {
                        c.n_input_clock_minus += 1;
                    } else {
                        c.n_in_plus += 1;
                        if system == 0 {
                            c.n_in_plus_0 += 1;
                        }
                    }
                }
                MeasurementMode::PropTestX | MeasurementMode::PropTestY => {
                    let u = self.u_table[(zz_energy(system, self.edges) + m) as usize];
                    let bu = if clock_minus { -u } else { u };
                    if mode == MeasurementMode::PropTestX {
                        c.n_x += 1;
                        c.s_xu += bu;
                    } else {
                        c.n_y += 1;
                        c.s_yu += bu;
                    }
                    u_rec = Some(u);
                }
            }
            if self.record {
                records.push(TranscriptRecord::new(
                    copy,
                    b_sampling,
                    b_testtype,
                    mode,
                    clock_minus,
                    system,
                    n,
                    u_rec,
                ));
            }
        }
        Block {
            counters: c,
            samples,
            records,
        }
    }
}

/// Combine block counters: integer counts in any order, complex sums with
/// the fixed pairwise tree over block order.
pub(crate) fn merge_counters(blocks: &[Counters]) -> Counters {
    let mut total = blocks
        .iter()
        .fold(Counters::default(), |acc, b| acc.add_counts(b));
    let zero = Complex64::new(0.0, 0.0);
    let xs: Vec<Complex64> = blocks.iter().map(|b| b.s_xu).collect();
    let ys: Vec<Complex64> = blocks.iter().map(|b| b.s_yu).collect();
    total.s_xu = pairwise_reduce(&xs, zero, |a, b| a + b);
    total.s_yu = pairwise_reduce(&ys, zero, |a, b| a + b);
    total
}

/// Run the protocol on `config.num_copies` copies of the model.
pub fn run_protocol(
    model: &HistoryStateModel,
    config: &ProtocolConfig,
    options: RunOptions,
) -> Result<ProtocolRun> {
    config.validate()?;
    let sampler = CopySampler::new(model)?;
    let n = model.num_qubits();
    let edges = &model.lattice().edges;
    let ctx = CopyContext {
        sampler: &sampler,
        edges,
        u_table: u_by_energy(edges.len()),
        streams: Substreams::new(config.master_seed, tags::COPY),
        n,
        record: options.record_transcript,
    };
    let total = config.num_copies;
    let num_blocks = total.div_ceil(BLOCK_SIZE as u64) as usize;
    let blocks = options.execution.map_indexed(num_blocks, |b| {
        let start = b as u64 * BLOCK_SIZE as u64;
        ctx.run_block(start, (start + BLOCK_SIZE as u64).min(total))
    });

    let block_counters: Vec<Counters> = blocks.iter().map(|b| b.counters).collect();
    let counters = merge_counters(&block_counters);
    let mut samples = Vec::with_capacity(counters.n_clock_minus as usize);
    let mut records = Vec::new();
    for b in blocks {
        samples.extend(b.samples);
        records.extend(b.records);
    }
    let report = build_report(n, counters, samples, config);
    let transcript = options.record_transcript.then_some(ProtocolTranscript { records });
    Ok(ProtocolRun { report, transcript })
}

fn build_report(
    num_qubits: usize,
    counters: Counters,
    samples: Vec<u64>,
    config: &ProtocolConfig,
) -> EstimatorReport {
    let mut missing = Vec::new();
    if counters.n_x == 0 {
        missing.push("N_X");
    }
    if counters.n_y == 0 {
        missing.push("N_Y");
    }
    if counters.n_in_plus == 0 {
        missing.push("N_in+");
    }
    let o10 = counters.o10().unwrap_or_default();
    let f_in_m = if counters.n_in_plus > 0 {
        counters.n_in_plus_0 as f64 / counters.n_in_plus as f64
    } else {
        0.0
    };
    let p_samp_m = if counters.n_input_test > 0 {
        counters.n_input_clock_minus as f64 / counters.n_input_test as f64
    } else {
        0.0
    };
    let o10_sq_scaled = 4.0 * o10.norm_sqr();
    let undefined =
        (!missing.is_empty()).then(|| format!("zero denominator: {}", missing.join(", ")));
    let accepted = undefined.is_none() && decide(o10_sq_scaled, f_in_m, p_samp_m, config);
    EstimatorReport {
        num_qubits,
        f_in_m,
        p_samp_m,
        o10_re: o10.re,
        o10_im: o10.im,
        o10_sq_scaled,
        accepted,
        counters,
        undefined,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, random_input};
    use crate::prover::{make_honest_model, NoiseModel};
    use crate::simulator::u_value_bits;

    fn perfect(rows: usize, cols: usize, seed: u64) -> HistoryStateModel {
        let lat = build_lattice(rows, cols).unwrap();
        let input = random_input(
            lat.num_qubits(),
            &mut Substreams::new(seed, tags::INPUT).stream(0),
        );
        make_honest_model(&lat, &input, &NoiseModel::default()).unwrap()
    }

    #[test]
    fn u_table_matches_direct_product() {
        let lat = build_lattice(3, 3).unwrap();
        let table = u_by_energy(lat.edges.len());
        let m = lat.edges.len() as i64;
        for z in 0..512u64 {
            let direct = u_value_bits(z, &lat.edges);
            let via = table[(zz_energy(z, &lat.edges) + m) as usize];
            assert!((direct - via).norm() < 1e-12);
        }
    }

    #[test]
    fn decide_examples() {
        let cfg = ProtocolConfig::default();
        assert!(decide(1.0, 1.0, 0.5, &cfg));
        assert!(!decide(0.9939, 1.0, 0.5, &cfg));
        assert!(!decide(1.0, 1.0, 0.52, &cfg));
        assert!(!decide(1.0, 0.99, 0.5, &cfg));
        assert!(decide(0.994, 0.994, 0.494, &cfg));
    }

    #[test]
    fn perfect_prover_accepted_small_lattice() {
        let model = perfect(2, 2, 1);
        let cfg = ProtocolConfig {
            master_seed: 3,
            ..Default::default()
        };
        let run = run_protocol(&model, &cfg, RunOptions::default()).unwrap();
        let r = &run.report;
        assert!(r.accepted, "{r:?}");
        assert!(r.f_in_m >= 0.994 && r.o10_sq_scaled >= 0.994);
        assert!((0.494..=0.506).contains(&r.p_samp_m));
        assert_eq!(r.f_in_m, 1.0);
        assert_eq!(r.samples.len() as u64, r.counters.n_clock_minus);
    }

    #[test]
    fn branch_allocation_concentrates() {
        let model = perfect(2, 2, 2);
        let cfg = ProtocolConfig {
            master_seed: 4,
            ..Default::default()
        };
        let c = run_protocol(&model, &cfg, RunOptions::default())
            .unwrap()
            .report
            .counters;
        let nm = cfg.num_copies as f64;
        let within = |got: u64, expect: f64| ((got as f64 - expect) / expect).abs() < 0.01;
        assert!(within(c.n_total_sampling, nm / 2.0));
        assert!(within(c.n_input_test, nm / 4.0));
        assert!(within(c.n_x, nm / 8.0));
        assert!(within(c.n_y, nm / 8.0));
        assert_eq!(
            c.n_total_sampling + c.n_input_test + c.n_x + c.n_y,
            cfg.num_copies
        );
        assert!(c.n_in_plus_0 <= c.n_in_plus);
    }

    #[test]
    fn zero_copies_is_undefined_and_rejected() {
        let model = perfect(1, 2, 3);
        let cfg = ProtocolConfig {
            num_copies: 0,
            ..Default::default()
        };
        let r = run_protocol(&model, &cfg, RunOptions::default())
            .unwrap()
            .report;
        assert!(!r.accepted);
        assert!(matches!(
            r.estimator_error(),
            Some(Error::EstimatorUndefined(_))
        ));
    }

    #[test]
    fn execution_modes_agree() {
        let model = perfect(2, 3, 5);
        let cfg = ProtocolConfig {
            num_copies: 50_000,
            master_seed: 9,
            ..Default::default()
        };
        let seq = run_protocol(
            &model,
            &cfg,
            RunOptions {
                execution: Execution::Sequential,
                record_transcript: true,
            },
        )
        .unwrap();
        let par = run_protocol(
            &model,
            &cfg,
            RunOptions {
                execution: Execution::Parallel,
                record_transcript: true,
            },
        )
        .unwrap();
        assert_eq!(seq, par);
        assert_eq!(
            serde_json::to_string(&seq.report).unwrap(),
            serde_json::to_string(&par.report).unwrap()
        );
    }

    #[test]
    fn report_json_shape() {
        let model = perfect(1, 2, 6);
        let cfg = ProtocolConfig {
            num_copies: 1000,
            ..Default::default()
        };
        let r = run_protocol(&model, &cfg, RunOptions::default())
            .unwrap()
            .report;
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in [
            "f_in_m",
            "p_samp_m",
            "o10_re",
            "o10_im",
            "o10_sq_scaled",
            "accepted",
            "counters",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("samples").is_none());
        assert_eq!(r.o10_sq_scaled, 4.0 * r.o10_m().norm_sqr());
    }

    #[test]
    fn config_validation() {
        let bad = ProtocolConfig {
            psamp_window: [0.6, 0.4],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let cfg: ProtocolConfig =
            serde_json::from_str(r#"{"num_copies": 10, "master_seed": 1}"#).unwrap();
        assert_eq!(cfg.threshold_o10, 0.994);
        assert!(serde_json::from_str::<ProtocolConfig>(r#"{"num_copy": 10}"#).is_err());
    }
}
