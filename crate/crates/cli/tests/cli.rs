use std::process::{Command, Output};

use serde_json::Value;

fn dycklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dycklab")).args(args).env_clear().output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_timestamp(report: &str) -> String {
    report.lines().filter(|l| !l.contains("generated_unix_seconds")).collect::<Vec<_>>().join("\n")
}

#[test]
fn measure_prints_exact_rational() {
    let o = dycklab(&["measure", "--measure", "mu-tilde", "--word", "a1b1", "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/8");
}

#[test]
fn measure_json_carries_rational_string() {
    let o = dycklab(&["measure", "--measure", "mu-tilde", "--word", "a1b1", "--m", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "mu-tilde");
    assert_eq!(v["word"], "a1b1");
    assert_eq!(v["m"], 2);
    assert_eq!(v["value"], "1/8");
}

#[test]
fn balanced_count_for_one_type() {
    let o = dycklab(&["count", "--balanced", "--m", "1", "--n", "6", "--brute"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn profile_table_exports_csv() {
    let o = dycklab(&["count", "--table", "--m", "2", "--n", "4", "--format", "csv", "--brute"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,s,b,count"));
    let total: u64 = lines.map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 160);
}

#[test]
fn environment_fallback_and_flag_precedence() {
    let run = |env_m: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_dycklab")).args(args).env_clear().env("DYCKLAB_M", env_m).output().unwrap()
    };
    assert_eq!(stdout(&run("1", &["count", "--balanced", "--n", "6"])).trim(), "5");
    assert_eq!(stdout(&run("3", &["count", "--balanced", "--n", "6", "--m", "1"])).trim(), "5");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(dycklab(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(dycklab(&["measure", "--measure", "mu-tilde", "--word", "a3", "--m", "2"]).status.code(), Some(2));
    assert_eq!(dycklab(&["measure", "--measure", "mu-tilde", "--word", "a1", "--m", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(dycklab(&["witness", "--word", "a1b1", "--m", "1"]).status.code(), Some(2));
    assert_eq!(dycklab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_counting_passes_and_is_sorted() {
    let o = dycklab(&["verify", "--suite", "counting", "--m", "2", "--max-n", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["schema"], "dycklab-report/1");
    let records = report["records"].as_array().unwrap();
    assert!(!records.is_empty());
    let ids: Vec<&str> = records.iter().map(|r| r["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for r in records {
        assert_eq!(r["pass"], true);
        assert_eq!(r["inputs"]["m"], 2);
        assert!(["published", "trivial", "derived"].contains(&r["provenance"].as_str().unwrap()));
    }
    assert_eq!(report["summary"]["failed"], 0);
}

#[test]
fn reports_are_identical_across_runs_and_job_counts() {
    let a = dycklab(&["verify", "--suite", "series", "--jobs", "1"]);
    let b = dycklab(&["verify", "--suite", "series", "--jobs", "3"]);
    assert_eq!(without_timestamp(&stdout(&a)), without_timestamp(&stdout(&b)));
}

#[test]
fn failing_fixture_exits_1_and_prints_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = include_str!("../fixtures/series.json").replace("\"closed_form\": \"1/2\"", "\"closed_form\": \"1/3\"");
    std::fs::write(dir.path().join("series.json"), fixtures).unwrap();
    let out = dir.path().join("report.json");
    let o = dycklab(&[
        "verify",
        "--suite",
        "series",
        "--fixtures",
        dir.path().to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("FAILED") && stderr.contains("series.bound.m2"), "{stderr}");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["summary"]["failed"], 1);
}

#[test]
fn sampling_seeds_are_registered() {
    let o = dycklab(&["verify", "--suite", "sampling", "--m", "1", "--samples", "20000", "--seed", "7"]);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["seeds"]["sampling.chi-square.mu-tilde.m1"], 7);
    assert_eq!(report["records"][0]["inputs"]["samples"], 20000);
}

#[test]
fn sample_json_is_reproducible() {
    let args = ["sample", "--m", "2", "--measure", "mu-plus", "--window", "6", "--count", "4", "--seed", "11", "--format", "json"];
    let a = dycklab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&dycklab(&args)));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let samples = v.as_array().unwrap();
    assert_eq!(samples.len(), 4);
    for s in samples {
        assert_eq!(s["word"].as_str().unwrap().matches(['a', 'b']).count(), 13);
        assert!(s["seed"].is_u64() && s["extension_depth"].is_u64());
    }
}

#[test]
fn holonomy_suite_emits_pair_records() {
    let o = dycklab(&["holonomy", "suite", "--measure", "mu-tilde", "--m", "2", "--max-block", "3", "--max-context", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let records = v.as_array().unwrap();
    assert!(!records.is_empty());
    for r in records {
        assert_eq!(r["equal"], true);
        assert_eq!(r["lhs"], r["rhs"]);
        assert!(r["pair"].is_array() && r["context"].is_array());
    }
}

#[test]
fn swap_of_inequivalent_blocks_fails() {
    let o = dycklab(&["holonomy", "swap", "--m", "2", "--w", "a1b1", "--w-prime", "a1a1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = dycklab(&["holonomy", "swap", "--m", "2", "--u", "a1", "--w", "a1b1", "--w-prime", "a2b2", "--v", "b1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn entropy_curve_csv() {
    let o = dycklab(&["entropy", "block", "--measure", "mu-plus", "--m", "2", "--max-n", "5", "--format", "csv"]);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("n,H_n,H_n_over_n"));
    assert_eq!(text.lines().count(), 6);
}
