//! Command implementations for the `fklab` binary.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use fklab::analysis::suites::{run_suite, Suite, SuiteResult};
use fklab::rng::{derive_seed, tags, Substreams};
use fklab::simulator::history_state;
use fklab::verifier::RunOptions;
use fklab::{
    build_lattice, echo_prepare, make_degraded_model, make_honest_model, random_input,
    run_protocol, Error, EstimatorReport, Execution, InputSpec, InputType, NoiseModel,
    ProtocolConfig, MAX_ECHO_QUBITS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "fklab",
    version,
    about = "History-state verification experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification protocol as described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed of the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a JSONL transcript per repetition.
        #[arg(long)]
        transcript: bool,
        /// Override the repetition count of the config.
        #[arg(long)]
        reps: Option<u32>,
    },
    /// Simulate the echo circuit and compare with the ideal history state.
    EchoCheck {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run one randomized bound suite.
    VerifyBounds {
        /// cauchy_schwarz, lower_bound, tvd_chain, stochastic, martingale,
        /// php_echo or noisy_meas.
        suite: String,
        #[arg(long, default_value_t = 1000)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for `<suite>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pretty-print a report written by `run`.
    Report { path: PathBuf },
}

/// Explicit prover targets, built with the degraded-model search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub o10_sq: f64,
    pub f_in: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    /// Seed for the random input choice; ignored when `input` is given.
    #[serde(default)]
    pub input_seed: u64,
    #[serde(default)]
    pub input: Option<Vec<InputType>>,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub target: Option<TargetSpec>,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default = "one")]
    pub repetitions: u32,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
}

fn one() -> u32 {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("fklab-out")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub rows: usize,
    pub cols: usize,
    pub input: Vec<InputType>,
    pub num_copies: u64,
    pub master_seed: u64,
    pub accepted: u32,
    pub repetitions: Vec<RepetitionReport>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RepetitionReport {
    pub repetition: u32,
    pub seed: u64,
    #[serde(flatten)]
    pub report: EstimatorReport,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    repetition: u32,
    seed: u64,
    f_in_m: f64,
    p_samp_m: f64,
    o10_re: f64,
    o10_im: f64,
    o10_sq_scaled: f64,
    accepted: bool,
}

/// An error tagged with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn new(code: i32, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

fn classify(e: Error) -> Failure {
    let code = match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::InvalidDimension { .. }
        | Error::DimensionMismatch { .. }
        | Error::Validation(_)
        | Error::SearchFailure(_)
        | Error::MalformedTerm(_) => EXIT_MALFORMED,
        _ => EXIT_FAILURE,
    };
    Failure::new(code, e)
}

fn io_failure(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(EXIT_FAILURE, e)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| Failure::new(EXIT_MALFORMED, e))?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(|e| Failure::new(EXIT_MALFORMED, e))
}

pub fn cmd_run(
    mut config: ExperimentConfig,
    seed: Option<u64>,
    out: Option<PathBuf>,
    transcript: bool,
    reps: Option<u32>,
) -> Result<RunReport, Failure> {
    if let Some(s) = seed {
        config.protocol.master_seed = s;
    }
    if let Some(o) = out {
        config.output_dir = o;
    }
    if let Some(r) = reps {
        config.repetitions = r;
    }
    config.protocol.validate().map_err(classify)?;
    let lattice = build_lattice(config.rows, config.cols).map_err(classify)?;
    let n = lattice.num_qubits();
    if n + 1 > fklab::MAX_STATE_QUBITS {
        return Err(classify(Error::Capacity {
            what: "protocol run",
            requested: n + 1,
            limit: fklab::MAX_STATE_QUBITS,
        }));
    }
    let input = match &config.input {
        Some(choices) => InputSpec::new(choices.clone()),
        None => random_input(
            n,
            &mut Substreams::new(config.input_seed, tags::INPUT).stream(0),
        ),
    };
    input.check_matches(&lattice).map_err(classify)?;
    let model = match config.target {
        Some(t) => {
            if config.noise != NoiseModel::default() {
                return Err(Failure::new(
                    EXIT_MALFORMED,
                    anyhow::anyhow!("`noise` and `target` cannot be combined"),
                ));
            }
            make_degraded_model(&lattice, &input, t.o10_sq, t.f_in)
        }
        None => make_honest_model(&lattice, &input, &config.noise),
    }
    .map_err(classify)?;

    let dir = &config.output_dir;
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(io_failure)?;
    let mut summary = csv::Writer::from_path(dir.join("summary.csv")).map_err(io_failure)?;
    let mut repetitions = Vec::new();
    for r in 0..config.repetitions {
        let rep_seed = derive_seed(config.protocol.master_seed, tags::REPETITION, u64::from(r));
        let protocol = ProtocolConfig {
            master_seed: rep_seed,
            ..config.protocol.clone()
        };
        let run = run_protocol(
            &model,
            &protocol,
            RunOptions {
                execution: Execution::Parallel,
                record_transcript: transcript,
            },
        )
        .map_err(classify)?;
        fs::write(
            dir.join(format!("samples_{r:03}.txt")),
            run.report.samples_text(),
        )
        .map_err(io_failure)?;
        if let Some(t) = &run.transcript {
            let f = fs::File::create(dir.join(format!("transcript_{r:03}.jsonl")))
                .map_err(io_failure)?;
            let mut w = BufWriter::new(f);
            t.write_jsonl(&mut w).map_err(io_failure)?;
            w.flush().map_err(io_failure)?;
        }
        let rep = &run.report;
        summary
            .serialize(SummaryRow {
                repetition: r,
                seed: rep_seed,
                f_in_m: rep.f_in_m,
                p_samp_m: rep.p_samp_m,
                o10_re: rep.o10_re,
                o10_im: rep.o10_im,
                o10_sq_scaled: rep.o10_sq_scaled,
                accepted: rep.accepted,
            })
            .map_err(io_failure)?;
        repetitions.push(RepetitionReport {
            repetition: r,
            seed: rep_seed,
            report: run.report,
        });
    }
    summary.flush().map_err(io_failure)?;
    let report = RunReport {
        rows: config.rows,
        cols: config.cols,
        input: input.choices.clone(),
        num_copies: config.protocol.num_copies,
        master_seed: config.protocol.master_seed,
        accepted: repetitions.iter().filter(|r| r.report.accepted).count() as u32,
        repetitions,
    };
    let json = serde_json::to_string_pretty(&report).map_err(io_failure)?;
    fs::write(dir.join("report.json"), json + "\n").map_err(io_failure)?;
    Ok(report)
}

/// Returns the fidelity of the echo output with the ideal history state.
pub fn cmd_echo_check(rows: usize, cols: usize, seed: u64) -> Result<f64, Failure> {
    let lattice = build_lattice(rows, cols).map_err(classify)?;
    let n = lattice.num_qubits();
    if n > MAX_ECHO_QUBITS {
        return Err(classify(Error::Capacity {
            what: "echo circuit",
            requested: n,
            limit: MAX_ECHO_QUBITS,
        }));
    }
    let input = random_input(n, &mut Substreams::new(seed, tags::INPUT).stream(0));
    let got = echo_prepare(&lattice, &input).map_err(classify)?;
    let ideal = history_state(&lattice, &input, 0.0).map_err(classify)?;
    Ok(got.fidelity(&ideal))
}

pub fn cmd_verify_bounds(
    suite: &str,
    instances: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<SuiteResult, Failure> {
    let suite: Suite = suite.parse().map_err(classify)?;
    let result = run_suite(suite, instances, seed, Execution::Parallel).map_err(classify)?;
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.serialize(&result).map_err(io_failure)?;
        w.flush().map_err(io_failure)?;
    }
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io_failure)?;
            fs::write(dir.join(format!("{}.csv", suite.name())), &buf).map_err(io_failure)?;
        }
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }
    Ok(result)
}

pub fn format_report(report: &RunReport) -> String {
    let mut s = format!(
        "{}x{} lattice, {} copies per repetition, master seed {}\n",
        report.rows, report.cols, report.num_copies, report.master_seed
    );
    s.push_str(&format!(
        "{:>4} {:>10} {:>10} {:>12} {:>8}\n",
        "rep", "f_in_m", "p_samp_m", "4|o10_m|^2", "verdict"
    ));
    for r in &report.repetitions {
        let e = &r.report;
        let verdict = match (&e.undefined, e.accepted) {
            (Some(_), _) => "undef",
            (None, true) => "accept",
            (None, false) => "reject",
        };
        s.push_str(&format!(
            "{:>4} {:>10.6} {:>10.6} {:>12.6} {:>8}\n",
            r.repetition, e.f_in_m, e.p_samp_m, e.o10_sq_scaled, verdict
        ));
    }
    s.push_str(&format!(
        "accepted {}/{}\n",
        report.accepted,
        report.repetitions.len()
    ));
    s
}

pub fn cmd_report(path: &Path) -> Result<String, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| Failure::new(EXIT_MALFORMED, e))?;
    let report: RunReport = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(|e| Failure::new(EXIT_MALFORMED, e))?;
    Ok(format_report(&report))
}

/// Cap the global rayon pool from `FKLAB_THREADS`.
pub fn configure_threads() {
    if let Some(n) = std::env::var("FKLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

/// Execute a parsed command line and return the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Run {
            config,
            seed,
            out,
            transcript,
            reps,
        } => load_config(&config)
            .and_then(|cfg| cmd_run(cfg, seed, out, transcript, reps))
            .map(|report| {
                println!("accepted {}/{}", report.accepted, report.repetitions.len());
                EXIT_OK
            }),
        Command::EchoCheck { rows, cols, seed } => cmd_echo_check(rows, cols, seed).map(|f| {
            println!("fidelity {f:.15}");
            if f >= 1.0 - 1e-10 {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }),
        Command::VerifyBounds {
            suite,
            instances,
            seed,
            out,
        } => cmd_verify_bounds(&suite, instances, seed, out.as_deref()).map(|r| {
            eprintln!(
                "{}: {} violations in {} instances",
                r.test_name, r.violations, r.instances
            );
            if r.passed() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }),
        Command::Report { path } => cmd_report(&path).map(|s| {
            print!("{s}");
            EXIT_OK
        }),
    };
    outcome.unwrap_or_else(|f| {
        eprintln!("error: {:#}", f.error);
        f.code
    })
}
