use std::fs;

use accperc::cli::run;
use accperc::experiments::{read_results, Format, SweepRow};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("accperc").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn single_vertex_chain_always_succeeds() {
    let (code, out, _) = call(&["simulate", "--n", "1", "--height", "1", "--trials", "5", "--seed", "0"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "p_hat"), "1");
    assert_eq!(value(&out, "successes"), "5");
}

#[test]
fn branching_is_given_exactly_once() {
    let (code, _, err) = call(&["simulate", "--n", "2", "--alpha", "1", "--height", "3", "--trials", "1", "--seed", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot be used with"));
    let (code, _, _) = call(&["simulate", "--height", "3", "--trials", "1", "--seed", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("simulate") && out.contains("verify"));
}

#[test]
fn oversized_enumeration_is_a_guard_error() {
    let (code, _, err) = call(&["enumerate", "--n", "3", "--height", "20", "--trials", "1", "--seed", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("enumeration limit"));
}

#[test]
fn enumerate_agrees_with_simulate() {
    let args = ["--n", "3", "--height", "5", "--trials", "400", "--seed", "9"];
    let (_, sim, _) = call(&[&["simulate"], &args[..]].concat());
    let (code, en, _) = call(&[&["enumerate"], &args[..]].concat());
    assert_eq!(code, 0);
    assert_eq!(value(&sim, "successes"), value(&en, "successes"));
}

#[test]
fn moments_reports_markov_bound() {
    let (code, out, _) = call(&["moments", "--alpha", "0.25", "--height", "24"]);
    assert_eq!(code, 0);
    let m: f64 = value(&out, "markov_bound").parse().unwrap();
    assert!((m - 7.637e-6).abs() < 1e-9);
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "alpha_grid = 0.5\nh_grid = 6\nbogus = 1\n").unwrap();
    let (code, _, err) = call(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains(":3"), "{err}");
}

#[test]
fn sweep_files_round_trip_and_ignore_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(&cfg, "# small map\nalpha_grid = 0.25, 0.5, 1.0\nh_grid = 6, 10\ntrials = 800\nseed = 4\n").unwrap();
    let mut bytes = Vec::new();
    for (workers, format) in [("1", "csv"), ("3", "csv"), ("2", "json")] {
        let out = dir.path().join(format!("out-{workers}.{format}"));
        let (code, _, err) = call(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--workers",
            workers,
            "--format",
            format,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        bytes.push(fs::read(&out).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let csv: Vec<SweepRow> = read_results(&dir.path().join("out-1.csv"), Format::Csv).unwrap();
    let json: Vec<SweepRow> = read_results(&dir.path().join("out-2.json"), Format::Json).unwrap();
    assert_eq!(csv.len(), 6);
    assert_eq!(csv, json);
    assert!(csv.iter().all(|r| r.trials == 800 && r.successes <= 800));
}

#[test]
fn missing_trials_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    fs::write(&cfg, "alpha_grid = 0.5\nh_grid = 4\n").unwrap();
    let (code, explicit, _) = call(&["sweep", "--config", cfg.to_str().unwrap(), "--trials", "50"]);
    assert_eq!(code, 0);
    assert!(!explicit.contains("default"));
    let (code, defaulted, _) = call(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(defaulted.contains("# trials not set; default 10000 applied"), "{defaulted}");
}

#[test]
fn regime_flags_a_supercritical_offset() {
    let (code, out, _) = call(&[
        "regime", "--beta", "(log h)^2/h", "--h-min", "10", "--h-max", "14", "--h-step", "4", "--trials", "200", "--seed", "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("tends_to_one"), "{out}");
}
