//! End-to-end tests of the command line binary: output shapes, exit
//! codes, determinism, and artifact files.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freemask"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn tmp_path(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).expect("tmp dir");
    dir.join(name)
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let path = tmp_path(name);
    fs::write(&path, text).expect("write config");
    path
}

const TINY_MOMENT_CONFIG: &str = r#"{
  "scenario": "moment-sweep",
  "seed": 9,
  "trials": 8,
  "sizes": [24],
  "labels": [{"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}}],
  "words": ["1,1*"]
}"#;

#[test]
fn partitions_lists_noncrossing_pairings_exactly() {
    let out = run(&["partitions", "--k", "2", "--noncrossing", "--stats"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "pairs,orbits,noncrossing\n\"(1,2)(3,4)\",3,true\n\"(1,4)(2,3)\",3,true\n"
    );
}

#[test]
fn partitions_full_count_matches_double_factorial() {
    let out = run(&["partitions", "--k", "3"]);
    assert!(out.status.success());
    // 15 pairings plus the header
    assert_eq!(stdout(&out).lines().count(), 16);
}

#[test]
fn limit_moments_prints_closed_form_value() {
    let out = run(&["limit-moments", "--kind", "mp", "--k", "3", "--y", "0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "kind,k,rho,y,value\nmp,3,,0.5,2.75\n");

    let out = run(&["limit-moments", "--word", "1,2,1*,2*"]);
    assert!(out.status.success());
    assert!(stdout(&out).ends_with("word,4,0,,0\n"), "{}", stdout(&out));
}

#[test]
fn limit_moments_rejects_misused_flags() {
    let out = run(&["limit-moments", "--kind", "circular", "--k", "2", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["limit-moments", "--kind", "elliptic", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mask_report_emits_density_and_weight() {
    let out = run(&["mask-report", "--gen", "checkerboard", "--n", "64", "--pi", "(1,2)"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "generator,rows,cols,density,epsilon,row_set_size,col_set_size,pi,weight\n\
         checkerboard,64,64,0.5,0.05,0,0,\"(1,2)\",0.5\n"
    );
}

#[test]
fn mask_report_rejects_unknown_parameter() {
    let out = run(&["mask-report", "--gen", "checkerboard", "--n", "8", "--param", "q=0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_2_with_line_reference() {
    let path = write_tmp(
        "bad_key.json",
        r#"{
  "scenario": "moment-sweep",
  "seed": 1,
  "trials": 5,
  "sizes": [10],
  "surprise": true,
  "labels": [{"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}}],
  "words": ["1,1*"]
}"#,
    );
    let out = run(&["simulate-moment", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("surprise"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn enumeration_budget_exits_4() {
    let out = run(&["partitions", "--k", "12"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn failed_comparison_exits_3() {
    let path = write_tmp(
        "strict.json",
        r#"{
  "scenario": "moment-sweep",
  "seed": 7,
  "trials": 8,
  "sizes": [20],
  "labels": [{"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}}],
  "words": ["1,1*"],
  "tolerance": {"se_multiplier": 0.0, "bias_constant": 0.0}
}"#,
    );
    let out = run(&["simulate-moment", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().ends_with("false"), "{text}");
}

#[test]
fn reruns_are_byte_identical_and_write_artifacts() {
    let path = write_tmp("tiny.json", TINY_MOMENT_CONFIG);
    let dir = tmp_path("tiny_artifacts");
    let a = run(&["simulate-moment", "--config", path.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    let b = run(&["simulate-moment", "--config", path.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("word,n,trials,estimate,std_error,limit,gap,pass\n"));
    let csv = fs::read_to_string(dir.join("moments.csv")).expect("artifact written");
    assert_eq!(csv, stdout(&a));
    let report = fs::read_to_string(dir.join("report.json")).expect("report written");
    assert!(report.contains("\"scenario\": \"moment-sweep\""));
}

#[test]
fn thread_count_does_not_change_results() {
    let path = write_tmp("tiny_threads.json", TINY_MOMENT_CONFIG);
    let one = run(&["--threads", "1", "simulate-moment", "--config", path.to_str().unwrap()]);
    let two = run(&["--threads", "2", "simulate-moment", "--config", path.to_str().unwrap()]);
    let env = bin()
        .env("FREEMASK_THREADS", "3")
        .args(["simulate-moment", "--config", path.to_str().unwrap()])
        .output()
        .expect("binary should run");
    assert!(one.status.success() && two.status.success() && env.status.success());
    assert_eq!(stdout(&one), stdout(&two));
    assert_eq!(stdout(&one), stdout(&env));
}

#[test]
fn seed_flag_overrides_config_seed() {
    let path = write_tmp("tiny_seed.json", TINY_MOMENT_CONFIG);
    let base = run(&["simulate-moment", "--config", path.to_str().unwrap()]);
    let same = run(&["--seed", "9", "simulate-moment", "--config", path.to_str().unwrap()]);
    let other = run(&["--seed", "10", "simulate-moment", "--config", path.to_str().unwrap()]);
    assert_eq!(stdout(&base), stdout(&same));
    assert_ne!(stdout(&base), stdout(&other));
}

#[test]
fn esd_writes_eigenvalues_histogram_and_summary() {
    let path = write_tmp(
        "esd_tiny.json",
        r#"{
  "scenario": "esd",
  "seed": 5,
  "trials": 2,
  "size": {"p": 30, "n": 30},
  "label": {"label": 1, "ensemble": {"kind": "iid", "dist": "gaussian"}},
  "bins": 12,
  "tolerance": {"ks_tol": 0.9}
}"#,
    );
    let dir = tmp_path("esd_artifacts");
    let out = run(&["esd", "--config", path.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["esd_summary.csv", "eigenvalues.csv", "histogram.csv", "report.json"] {
        assert!(dir.join(name).exists(), "{name} missing");
    }
    let eig = fs::read_to_string(dir.join("eigenvalues.csv")).unwrap();
    // header plus p eigenvalues per trial
    assert_eq!(eig.lines().count(), 1 + 2 * 30);
    let hist = fs::read_to_string(dir.join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 1 + 12);
}

#[test]
fn dump_matrix_writes_full_precision_grid() {
    let path = write_tmp("dump_cfg.json", TINY_MOMENT_CONFIG);
    let dump = tmp_path("dump.csv");
    let out = run(&[
        "simulate-moment",
        "--config",
        path.to_str().unwrap(),
        "--dump-matrix",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&dump).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r.split(',').count() == 24));
    // round-trips at full precision
    let first: f64 = rows[0].split(',').next().unwrap().parse().unwrap();
    assert_eq!(format!("{first}").parse::<f64>().unwrap(), first);
}

#[test]
fn verify_subset_reports_each_criterion() {
    let out = run(&["verify", "--criteria", "1,3,10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("criterion,name,pass,details\n"));
    assert_eq!(text.lines().count(), 4);
    assert!(text.contains("pairing-counts"));
    assert!(text.contains("mask-weight-dichotomy"));
}

#[test]
fn verify_json_format_is_structured() {
    let out = run(&["verify", "--criteria", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["scenario"], "verify");
    assert_eq!(v["rows"]["verify"][0]["criterion"], 2);
    assert_eq!(v["rows"]["verify"][0]["pass"], true);
}

#[test]
fn freeness_rejects_other_scenarios() {
    let path = write_tmp("not_freeness.json", TINY_MOMENT_CONFIG);
    let out = run(&["freeness", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("freeness"));
}
