use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fklab"))
        .args(args)
        .env("FKLAB_THREADS", "4")
        .output()
        .expect("binary runs")
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn perfect_prover_accepted() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = configs().join("perfect_4x4.json");
    let o = fklab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report["accepted"].as_u64().unwrap() >= 19);
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 21);
    assert!(
        summary.starts_with("repetition,seed,f_in_m,p_samp_m,o10_re,o10_im,o10_sq_scaled,accepted")
    );
    let samples = fs::read_to_string(out.join("samples_000.txt")).unwrap();
    let first = samples.lines().next().unwrap();
    assert_eq!(first.len(), 16);
    assert!(first.chars().all(|c| c == '0' || c == '1'));
}

#[test]
fn robustness_config_accepts_at_least_two_thirds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = configs().join("robustness_4x4.json");
    let o = fklab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(3 * report["accepted"].as_u64().unwrap() >= 40);
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"rows": 2, "cols": 3, "input_seed": 4, "noise": {"eta": 0.02, "meas_flip": 0.001},
            "protocol": {"num_copies": 100000, "master_seed": 5}, "repetitions": 3}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = fklab(&[
            "run",
            "--config",
            &cfg,
            "--out",
            dir.to_str().unwrap(),
            "--transcript",
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    for f in [
        "report.json",
        "summary.csv",
        "samples_002.txt",
        "transcript_001.jsonl",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let single = Command::new(env!("CARGO_BIN_EXE_fklab"))
        .args([
            "run",
            "--config",
            &cfg,
            "--out",
            tmp.path().join("c").to_str().unwrap(),
        ])
        .env("FKLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(
        fs::read(a.join("report.json")).unwrap(),
        fs::read(tmp.path().join("c/report.json")).unwrap()
    );
    let seeded = tmp.path().join("d");
    fklab(&[
        "run",
        "--config",
        &cfg,
        "--out",
        seeded.to_str().unwrap(),
        "--seed",
        "6",
        "--reps",
        "1",
    ]);
    let summary = fs::read_to_string(seeded.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn transcript_lines_match_copies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"rows": 1, "cols": 2, "protocol": {"num_copies": 5000}, "repetitions": 1}"#,
    );
    let out = tmp.path().join("o");
    let o = fklab(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--transcript",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let t = fs::read_to_string(out.join("transcript_000.jsonl")).unwrap();
    assert_eq!(t.lines().count(), 5000);
    let rec: serde_json::Value = serde_json::from_str(t.lines().next().unwrap()).unwrap();
    for key in [
        "copy_index",
        "b_sampling",
        "b_testtype",
        "basis_choice",
        "clock_outcome",
        "system_outcomes",
        "u",
    ] {
        assert!(rec.get(key).is_some(), "{key}");
    }
}

#[test]
fn malformed_configs_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = write_config(tmp.path(), r#"{"cols": 2}"#);
    assert_eq!(fklab(&["run", "--config", &missing]).status.code(), Some(2));
    let bad_json = write_config(tmp.path(), "{ not json");
    assert_eq!(
        fklab(&["run", "--config", &bad_json]).status.code(),
        Some(2)
    );
    let bad_rate = write_config(
        tmp.path(),
        r#"{"rows": 1, "cols": 2, "noise": {"meas_flip": 2.0}}"#,
    );
    assert_eq!(
        fklab(&["run", "--config", &bad_rate]).status.code(),
        Some(2)
    );
    let unknown = write_config(tmp.path(), r#"{"rows": 1, "cols": 2, "colour": 1}"#);
    assert_eq!(fklab(&["run", "--config", &unknown]).status.code(), Some(2));
    assert_eq!(
        fklab(&["run", "--config", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn capacity_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let big = write_config(
        tmp.path(),
        r#"{"rows": 6, "cols": 6, "protocol": {"num_copies": 10}}"#,
    );
    assert_eq!(fklab(&["run", "--config", &big]).status.code(), Some(3));
    assert_eq!(
        fklab(&["echo-check", "--rows", "10", "--cols", "10"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn echo_check() {
    for (r, c) in [("2", "2"), ("1", "2"), ("3", "3")] {
        let o = fklab(&["echo-check", "--rows", r, "--cols", c, "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0));
        let text = String::from_utf8(o.stdout).unwrap();
        let f: f64 = text
            .trim()
            .strip_prefix("fidelity ")
            .unwrap()
            .parse()
            .unwrap();
        assert!(f >= 1.0 - 1e-10);
    }
    assert_eq!(
        fklab(&["echo-check", "--rows", "0", "--cols", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    for (suite, n) in [
        ("cauchy_schwarz", "1000"),
        ("lower_bound", "1000"),
        ("php_echo", "12"),
    ] {
        let o = fklab(&[
            "verify-bounds",
            suite,
            "--instances",
            n,
            "--seed",
            "2",
            "--out",
            tmp.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
        let csv = fs::read_to_string(tmp.path().join(format!("{suite}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("test_name,instances,violations,max_margin")
        );
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], suite);
        assert_eq!(row[1], n);
        assert_eq!(row[2], "0");
    }
    assert_eq!(fklab(&["verify-bounds", "nope"]).status.code(), Some(2));
}

#[test]
fn report_pretty_print() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"rows": 2, "cols": 2, "protocol": {"num_copies": 20000}, "repetitions": 2}"#,
    );
    let out = tmp.path().join("o");
    assert_eq!(
        fklab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    let o = fklab(&["report", out.join("report.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("2x2 lattice"));
    assert!(text.contains("accepted"));
    assert_eq!(fklab(&["report", cfg.as_str()]).status.code(), Some(2));
}
