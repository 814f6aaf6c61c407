use num_complex::Complex64;

use fklab::analysis::{exact_parameters, hoeffding_bound};
use fklab::prover::{CopySampler, MeasurementMode};
use fklab::rng::{derive_seed, tags, Substreams};
use fklab::simulator::u_value_bits;
use fklab::verifier::RunOptions;
use fklab::{
    build_lattice, make_degraded_model, make_honest_model, random_input, run_protocol, NoiseModel,
    ProtocolConfig,
};

fn config(num_copies: u64, seed: u64, r: u64) -> ProtocolConfig {
    ProtocolConfig {
        num_copies,
        master_seed: derive_seed(seed, tags::REPETITION, r),
        ..Default::default()
    }
}

#[test]
fn o10_estimator_is_unbiased() {
    let lattice = build_lattice(2, 2).unwrap();
    let input = random_input(4, &mut Substreams::new(31, tags::INPUT).stream(0));
    let noise = NoiseModel {
        theta: 0.8,
        eta: 0.05,
        ..Default::default()
    };
    let model = make_honest_model(&lattice, &input, &noise).unwrap();
    let exact = exact_parameters(&model.density_matrix().unwrap(), &lattice, &input)
        .unwrap()
        .tr_rho_o10;

    let runs = 200;
    let values: Vec<Complex64> = (0..runs)
        .map(|r| {
            run_protocol(&model, &config(100_000, 1, r), RunOptions::default())
                .unwrap()
                .report
                .o10_m()
        })
        .collect();
    let mean = values.iter().sum::<Complex64>() / runs as f64;
    let var_re = values.iter().map(|v| (v.re - mean.re).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let var_im = values.iter().map(|v| (v.im - mean.im).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let se = |v: f64| (v / runs as f64).sqrt();
    assert!(
        (mean.re - exact.re).abs() <= 3.0 * se(var_re),
        "{mean} vs {exact}"
    );
    assert!(
        (mean.im - exact.im).abs() <= 3.0 * se(var_im),
        "{mean} vs {exact}"
    );
}

#[test]
fn perfect_prover_f_in_is_exact() {
    let lattice = build_lattice(2, 2).unwrap();
    let input = random_input(4, &mut Substreams::new(32, tags::INPUT).stream(0));
    let model = make_honest_model(&lattice, &input, &NoiseModel::default()).unwrap();
    for r in 0..20 {
        let rep = run_protocol(&model, &config(50_000, 2, r), RunOptions::default())
            .unwrap()
            .report;
        assert_eq!(rep.f_in_m, 1.0);
    }
}

#[test]
fn f_in_deviation_respects_hoeffding() {
    let lattice = build_lattice(2, 2).unwrap();
    let input = random_input(4, &mut Substreams::new(33, tags::INPUT).stream(0));
    let model = make_degraded_model(&lattice, &input, 1.0, 0.98).unwrap();
    let n_m = 400_000;
    let runs = 100;
    let exceed = (0..runs)
        .filter(|&r| {
            let rep = run_protocol(&model, &config(n_m, 3, r), RunOptions::default())
                .unwrap()
                .report;
            (rep.f_in_m - 0.98).abs() > 0.006
        })
        .count();
    let bound = hoeffding_bound(0.006, n_m / 8, 2);
    assert!(
        exceed as f64 / runs as f64 <= bound,
        "{exceed} exceedances, bound {bound}"
    );
}

#[test]
fn p_samp_tracks_output_weight() {
    let lattice = build_lattice(1, 3).unwrap();
    let input = random_input(3, &mut Substreams::new(34, tags::INPUT).stream(0));
    let model = make_honest_model(&lattice, &input, &NoiseModel::default())
        .unwrap()
        .with_output_weight(0.52)
        .unwrap();
    let rep = run_protocol(&model, &config(3_500_000, 4, 0), RunOptions::default())
        .unwrap()
        .report;
    assert!((rep.p_samp_m - 0.52).abs() < 0.003);
    assert!(!rep.accepted);
}

#[test]
fn flip_noise_shift_matches_flipped_tables() {
    let lattice = build_lattice(2, 2).unwrap();
    let n = lattice.num_qubits();
    let input = random_input(n, &mut Substreams::new(35, tags::INPUT).stream(0));
    let eps = 0.02;
    let noise = NoiseModel {
        meas_flip: eps,
        ..Default::default()
    };
    let model = make_honest_model(&lattice, &input, &noise).unwrap();
    let clean = exact_parameters(
        &make_honest_model(&lattice, &input, &NoiseModel::default())
            .unwrap()
            .density_matrix()
            .unwrap(),
        &lattice,
        &input,
    )
    .unwrap()
    .tr_rho_o10;

    let sampler = CopySampler::new(&model).unwrap();
    let expect = |mode| {
        let mask = (1u64 << n) - 1;
        sampler
            .distribution(mode)
            .probabilities()
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                let b = if (idx as u64 >> n) & 1 == 0 { 1.0 } else { -1.0 };
                u_value_bits(idx as u64 & mask, &lattice.edges) * (p * b)
            })
            .sum::<Complex64>()
    };
    let flipped = (expect(MeasurementMode::PropTestX)
        - Complex64::i() * expect(MeasurementMode::PropTestY))
        * 0.5;

    let runs = 100;
    let values: Vec<Complex64> = (0..runs)
        .map(|r| {
            run_protocol(&model, &config(100_000, 5, r), RunOptions::default())
                .unwrap()
                .report
                .o10_m()
        })
        .collect();
    let mean = values.iter().sum::<Complex64>() / runs as f64;
    let se = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>()
        / ((runs - 1) * runs) as f64;
    let se = se.sqrt();
    let shift = mean - clean;
    println!("flip {eps}: empirical shift {shift:.5}, predicted {:.5}", flipped - clean);
    assert!((mean - flipped).norm() <= 4.0 * se, "{mean} vs {flipped}");
    assert!(shift.norm() > 10.0 * se, "shift {shift} not resolved");
}
