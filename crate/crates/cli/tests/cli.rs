use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn stirap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stirap"))
        .args(args)
        .env("STIRAP_WORKERS", "2")
        .output()
        .expect("spawn stirap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn last_row(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect()
}

#[test]
fn lossless_simulation_transfers_population() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = stirap(&[
        "simulate", "--model", "effective", "--sequence", "counterintuitive", "--alphaT", "10", "--deltaT", "1",
        "--gammaT", "0", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let header = fs::read_to_string(&out).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "t_over_T,p1,p2,p3,norm");
    let row = last_row(&out);
    assert_eq!(row[0], 10.0);
    assert!(row[3] > 0.9, "p3 = {}", row[3]);
    assert!(stdout(&o).contains("p3_final="));
}

#[test]
fn zeno_prediction_is_printed() {
    let o = stirap(&["zeno", "--model", "phenomenological", "--sequence", "intuitive"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "RemainsInState1\n");
    let o = stirap(&["zeno", "--model", "effective", "--sequence", "counterintuitive", "--explain"]);
    assert!(stdout(&o).starts_with("CompleteTransfer\n"));
}

#[test]
fn strong_damping_trace_figure() {
    let dir = tempfile::tempdir().unwrap();
    let o = stirap(&["figure", "fig4", "--variant", "effective-intuitive", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = dir.path().join("fig4-effective-intuitive.csv");
    let svg = dir.path().join("fig4-effective-intuitive.svg");
    assert!(svg.exists());
    let row = last_row(&csv);
    assert!(row[4] < 0.05, "norm = {}", row[4]);
    assert!(fs::read_to_string(&svg).unwrap().contains("t / T"));
}

#[test]
fn variant_rejected_for_sweep_figures() {
    let dir = tempfile::tempdir().unwrap();
    let o = stirap(&["figure", "fig2", "--variant", "effective-intuitive", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_two_with_one_line() {
    for args in [
        &["simulate", "--alphaT", "ten"][..],
        &["simulate", "--sequence", "sideways"],
        &["simulate", "--bogus"],
        &["unknown-command"],
        &["figure", "fig9"],
    ] {
        let o = stirap(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error:"), "{err}");
    }
}

#[test]
fn runtime_errors_exit_one_and_echo_parameters() {
    let o = stirap(&["simulate", "--alphaT=-3"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("alphaT=-3") && err.contains("model=effective"), "{err}");

    let o = stirap(&["simulate", "--gammaT", "1", "--atol", "1e-300", "--samples", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step size underflow"), "{}", stderr(&o));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"alphaT": 5, "gammaT": 0.3, "sequence": "intuitive", "samples": 11}"#).unwrap();
    let from_file = stirap(&["simulate", "--config", cfg.to_str().unwrap()]);
    let explicit = stirap(&["simulate", "--alphaT", "5", "--gammaT", "0.3", "--sequence", "intuitive", "--samples", "11"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&explicit));

    let mixed = stirap(&["simulate", "--config", cfg.to_str().unwrap(), "--alphaT", "20"]);
    let want = stirap(&["simulate", "--alphaT", "20", "--gammaT", "0.3", "--sequence", "intuitive", "--samples", "11"]);
    assert_eq!(stdout(&mixed), stdout(&want));
    assert_ne!(stdout(&mixed), stdout(&from_file));
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"alphaT": 5, "colour": "blue"}"#).unwrap();
    let o = stirap(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = stirap(&["simulate", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = stirap(&[
            "sweep", "--gammas", "0,0.5,1,2", "--analytic", "--sequence", "intuitive", "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("gammaT,model,p3_final,p1_final,norm_final,p3_analytic\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn sweep_rejects_unordered_grid() {
    let o = stirap(&["sweep", "--gammas", "1,0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("increasing"));
}

#[test]
fn master_and_analytic_write_tables() {
    let o = stirap(&["master", "--gammaT", "1", "--samples", "5", "--nplus", "0.2", "--nminus", "0.2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("t_over_T,p1,p2,p3,p4,trace\n"));
    assert_eq!(text.lines().count(), 6);

    let o = stirap(&["analytic", "--gammaT", "0", "--model", "phenomenological"]);
    assert_eq!(stdout(&o), "gammaT,model,sequence,p3_analytic\n0,phenomenological,counterintuitive,1\n");
}

#[test]
fn help_documents_units() {
    let o = stirap(&["simulate", "--help"]);
    assert!(o.status.success());
    let help = stdout(&o);
    for flag in ["--alphaT", "--deltaT", "--gammaT", "--tmaxT", "--sequence", "--model", "--basis", "--rtol", "--atol",
        "--samples", "--out", "--config"]
    {
        assert!(help.contains(flag), "{flag}");
    }
    assert!(help.contains("dimensionless"));
    let o = stirap(&["master", "--help"]);
    let help = stdout(&o);
    assert!(help.contains("--nplus") && help.contains("--nminus") && help.contains("--omega4T"));
    let o = stirap(&["--help"]);
    assert!(stdout(&o).contains("STIRAP_WORKERS"));
}
