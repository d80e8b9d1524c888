use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigma-series"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn series_digits() {
    let out = run(&["series", "--k", "3", "--precision", "30"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["digits"], "14.693532847269282233123551364982");
    assert_eq!(v["version"], "sigma-series 0.1.0");
    assert_eq!(v["config"]["params"]["k"], 3);
}

#[test]
fn series_writes_partial_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "series",
        "--k",
        "1",
        "--precision",
        "5",
        "--terms",
        "3",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = read(dir.path(), "series.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# sigma-series 0.1.0 config="));
    assert_eq!(lines[1], "n,partial_num,partial_den,scaled");
    assert_eq!(lines[4], "3,19,6,19");
    assert!(out.stderr.starts_with(b"writing"));
}

#[test]
fn sieve_lemma_matches_library() {
    let out = run(&["sieve", "lemma", "--hi", "1000000", "--exponent", "1/9"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["count"], 13015);
    assert_eq!(v["range"]["hi"], 1_000_000);
    assert!(v["density_ratio"].as_f64().unwrap() > 34.0);
}

#[test]
fn sieve_schinzel_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sieve",
        "schinzel",
        "--k",
        "2",
        "--hi",
        "10000",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = read(dir.path(), "sieve-schinzel.csv");
    let mut lines = csv.lines().skip(1);
    assert_eq!(lines.next(), Some("q,cofactors,modulus_class"));
    assert_eq!(lines.next(), Some("13,7;5,1"));
    let v: Value = serde_json::from_str(&read(dir.path(), "sieve-schinzel.json")).unwrap();
    assert_eq!(v["modulus"], 12);
}

#[test]
fn sieve_primes_and_composite() {
    let out = run(&["sieve", "primes", "--hi", "100"]);
    assert_eq!(stdout_json(&out)["count"], 25);
    let out = run(&["sieve", "composite", "--k", "1", "--p", "3", "--hi", "1000"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["count"].as_u64().unwrap() > 0);
}

#[test]
fn poly_derive_record() {
    let out = run(&["poly", "derive", "--k", "3", "--i", "3"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let d = &v["decompositions"][0];
    assert_eq!(d["quotient"], serde_json::json!(["1/1"]));
    assert_eq!(d["remainder"], serde_json::json!(["8/1", "10/1", "3/1"]));
    let all = stdout_json(&run(&["poly", "derive", "--k", "4"]));
    assert_eq!(all["decompositions"].as_array().unwrap().len(), 4);
}

#[test]
fn criteria_sigma3_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "criteria",
        "sigma3",
        "--hi",
        "1000",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let csv = read(dir.path(), "criteria-sigma3.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[1],
        "label,q_or_n,value_num,value_den,distance_num,distance_den,comparator,satisfied"
    );
    assert!(lines[2].starts_with("sigma3-window,7,"));
    let v: Value = serde_json::from_str(&read(dir.path(), "criteria-sigma3.json")).unwrap();
    assert_eq!(v["count"].as_u64().unwrap() as usize, lines.len() - 2);
    assert!(v["criteria"][0]["median_distance"]
        .as_str()
        .unwrap()
        .contains('/'));
}

#[test]
fn criteria_subcommands() {
    let eq1 = stdout_json(&run(&["criteria", "eq1", "--k", "2", "--hi", "200"]));
    assert_eq!(eq1["criteria"][0]["min_distance"], "1/4");
    let eq2 = run(&["criteria", "eq2", "--k", "1", "--p", "3", "--hi", "100"]);
    assert_eq!(code(&eq2), 0);
    let end = run(&[
        "criteria", "endgame", "--k", "3", "--p", "5", "--q1", "26", "27", "101",
    ]);
    assert_eq!(code(&end), 0);
    assert_eq!(stdout_json(&end)["count"], 3);
    let cond = run(&[
        "criteria",
        "condition-i",
        "--lo",
        "2",
        "--hi",
        "50",
        "--shift",
        "auto",
    ]);
    assert_eq!(stdout_json(&cond)["count"], 49);
    let subset = stdout_json(&run(&["criteria", "subset", "--n", "15"]));
    assert_eq!(subset["total"], "882/25");
    assert_eq!(subset["total"], subset["scaled_sigma3"]);
    let small = stdout_json(&run(&[
        "criteria", "small-k", "--kind", "k1", "--lo", "1000", "--hi", "2000",
    ]));
    assert_eq!(small["scanned"], 135);
    assert_eq!(small["constant"], "35/216");
}

#[test]
fn equidist_run_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "equidist",
        "run",
        "--alpha",
        "35/4",
        "--y",
        "100",
        "--h",
        "10",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["alpha"], "35/4");
    assert_eq!(v["H"], 10);
    assert_eq!(v["violations"], serde_json::json!([]));
    assert!(v["et_bound"].as_f64().unwrap() >= v["true_discrepancy"].as_f64().unwrap());
    let csv = read(dir.path(), "equidist.csv");
    assert_eq!(csv.lines().nth(1), Some("h,abs_exp_sum,vdc_bound"));
    assert_eq!(csv.lines().count(), 12);
    let omit = run(&[
        "equidist",
        "run",
        "--alpha",
        "35/4",
        "--y",
        "100",
        "--alpha-factor",
        "omit",
        "--ell",
        "9",
    ]);
    assert_eq!(code(&omit), 1);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"command": "constellations", "range": {"lo": 2, "hi": 10000}, "k": 2, "seed": 5}"#,
    )
    .unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "sieve", "schinzel"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["k"], 2);
    assert_eq!(v["range"]["hi"], 10000);
    assert_eq!(v["config"]["seed"], 5);
    let flagged = stdout_json(&run(&[
        "--config",
        cfg.to_str().unwrap(),
        "sieve",
        "schinzel",
        "--hi",
        "100",
    ]));
    assert_eq!(flagged["range"]["hi"], 100);
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"k": 2, "unknown": true}"#).unwrap();
    assert_eq!(
        code(&run(&["--config", bad.to_str().unwrap(), "series"])),
        1
    );
    let mismatch = dir.path().join("mismatch.json");
    fs::write(&mismatch, r#"{"command": "equidist"}"#).unwrap();
    assert_eq!(
        code(&run(&["--config", mismatch.to_str().unwrap(), "series"])),
        1
    );
    assert_eq!(
        code(&run(&["--config", "/nonexistent/cfg.json", "series"])),
        1
    );
    let file = dir.path().join("plain");
    fs::write(&file, "x").unwrap();
    assert_eq!(
        code(&run(&["series", "--output-dir", file.to_str().unwrap()])),
        1
    );
    assert_eq!(code(&run(&["series", "--k", "11"])), 1);
    assert_eq!(code(&run(&["sieve", "lemma", "--exponent", "1/2"])), 1);
    assert_eq!(
        code(&run(&["sieve", "primes", "--lo", "10", "--hi", "5"])),
        1
    );
    assert_eq!(code(&run(&["criteria", "eq1", "--epsilon", "abc"])), 1);
    assert_eq!(code(&run(&["--workers", "0", "series"])), 1);
    assert_eq!(code(&run(&["nonsense"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn failed_criteria_exit_2_with_serialized_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify-all",
        "--quick",
        "--tolerance-scale",
        "1/2",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("[PASS]") || l.starts_with("[FAIL]"))
            .count(),
        14
    );
    assert!(text.lines().any(|l| l.starts_with("[FAIL]  4 ")));
    let v: Value = serde_json::from_str(&read(dir.path(), "violations.json")).unwrap();
    assert!(v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s.as_str().unwrap().contains("criterion 4")));
    let report: Value = serde_json::from_str(&read(dir.path(), "verify-all.json")).unwrap();
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 14);
    assert_eq!(report["tolerance_scale"], "1/2");
}

#[test]
fn identical_config_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let jobs: [&[&str]; 3] = [
        &["verify-all", "--quick", "--seed", "9"],
        &["equidist", "sweep", "--samples", "4", "--seed", "9"],
        &["criteria", "sigma3", "--hi", "5000"],
    ];
    for (dir, workers) in [(&a, "1"), (&b, "4")] {
        for job in jobs {
            let mut args = job.to_vec();
            args.extend([
                "--workers",
                workers,
                "--output-dir",
                dir.path().to_str().unwrap(),
            ]);
            run(&args);
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.contains(&"verify-all.json".to_string()));
    assert!(names.contains(&"equidist-sweep.csv".to_string()));
    for name in &names {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}
