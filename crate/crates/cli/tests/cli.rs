// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pauliprop"));
    c.env_remove("PAULIPROP_WORKERS");
    c
}

fn circuits() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../circuits")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn ghz() -> String {
    circuits().join("ghz3.json").display().to_string()
}

#[test]
fn estimate_clifford_demo_has_unit_bound() {
    let out = run(&["estimate", &ghz(), "--n-samples", "2000", "--seed", "1"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["cost"]["total_bound"], 1.0);
    assert_eq!(r["mean"], 1.0);
    assert_eq!(r["sample_std"], 0.0);
}

#[test]
fn both_directions_report_discrepancy() {
    let chain = circuits().join("depolarized_t_chain.json");
    let out = run(&["estimate", chain.to_str().unwrap(), "--n-samples", "20000", "--seed", "4", "--direction", "both"]);
    assert!(out.status.success());
    let r = json(&out);
    let s = r["schrodinger"]["mean"].as_f64().unwrap();
    let h = r["heisenberg"]["mean"].as_f64().unwrap();
    assert!((r["discrepancy"].as_f64().unwrap() - (s - h).abs()).abs() < 1e-15);
    assert!((s - h).abs() <= r["combined_epsilon"].as_f64().unwrap());
}

#[test]
fn epsilon_plans_the_sample_count() {
    let out = run(&["estimate", &ghz(), "--epsilon", "0.05", "--delta", "0.05", "--seed", "1"]);
    let r = json(&out);
    // N = ceil(ln(2/δ) (2B)² / (2ε²)) with B = 1
    let expect = ((2.0f64 / 0.05).ln() * 4.0 / (2.0 * 0.05 * 0.05)).ceil() as u64;
    assert_eq!(r["n_samples"].as_u64().unwrap(), expect);
    assert!(r["epsilon"].as_f64().unwrap() <= 0.05);
}

#[test]
fn verify_clifford_is_exact() {
    let out = run(&["verify", &ghz(), "--n-samples", "500", "--seed", "2"]);
    let r = json(&out);
    assert!(r[0]["diff"].as_f64().unwrap() <= 1e-9);
    assert_eq!(r[0]["pass"], true);
}

#[test]
fn verify_depolarized_t_chain() {
    let chain = circuits().join("depolarized_t_chain.json");
    let out = run(&["verify", chain.to_str().unwrap(), "--epsilon", "0.05", "--seed", "3", "--direction", "both"]);
    let r = json(&out);
    for rec in r.as_array().unwrap() {
        assert_eq!(rec["pass"], true, "{rec}");
    }
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn exit_codes_and_error_json() {
    let dir = tempfile::tempdir().unwrap();

    let bad = write_temp(&dir, "syntax.json", "{\"n\": 1,");
    let out = run(&["estimate", &bad, "--n-samples", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "parse");

    let invalid = write_temp(&dir, "invalid.json", r#"{"n": 2, "input": "zero", "observable": "Z"}"#);
    let out = run(&["estimate", &invalid, "--n-samples", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(json(&out)["message"].as_str().unwrap().contains("observable"));

    // (√2)^2000 = 2^1000 > 1e300
    let t = r#"{"type": "gate", "name": "t", "qubits": [0]}"#;
    let chain = vec![t; 2000].join(",");
    let huge = write_temp(
        &dir,
        "huge.json",
        &format!(r#"{{"n": 1, "input": "plus", "channels": [{chain}], "observable": "X"}}"#),
    );
    let out = run(&["estimate", &huge, "--n-samples", "10", "--seed", "1", "--direction", "schrodinger"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"], "bound_overflow");

    let wide = write_temp(&dir, "wide.json", r#"{"n": 9, "input": "zero", "observable": "ZIIIIIIII"}"#);
    let out = run(&["verify", &wide, "--n-samples", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(5));

    let out = run(&["estimate", &ghz(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

fn csv_lines(out: &Output) -> Vec<String> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn figure_csv_is_deterministic_with_metadata() {
    let args = ["figures", "fig2", "--seed", "9", "--samples", "300"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let lines = csv_lines(&a);
    assert!(lines[0].starts_with("# pauliprop ") && lines[0].contains("seed=9"));
    assert_eq!(lines[1], "category,count,fraction");
    let total: u64 = lines[2..].iter().map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 300);
}

#[test]
fn fig3_thresholds_at_quarter_turn() {
    let lines = csv_lines(&run(&["figures", "fig3", "--seed", "0", "--points", "21"]));
    assert_eq!(lines[1], "f,theta,d_forward,d_adjoint,robustness,category,diamond_f");
    for l in &lines[2..] {
        let cols: Vec<&str> = l.split(',').collect();
        let (f, theta): (f64, f64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        if (theta - std::f64::consts::FRAC_PI_4).abs() > 1e-12 {
            continue;
        }
        let cat = cols[5];
        if f <= std::f64::consts::FRAC_1_SQRT_2 {
            assert!(cat.contains("SH"), "f = {f}: {cat}");
        } else {
            assert_eq!(cat, "M");
        }
        if f <= 0.5 {
            assert_eq!(cat, "CSH");
        }
        if (0.6..=0.7).contains(&f) {
            assert_eq!(cat, "SH");
        }
    }
}

#[test]
fn fig1_has_all_state_categories() {
    let lines = csv_lines(&run(&["figures", "fig1", "--seed", "0", "--points", "25"]));
    for cat in ["stabilizer_mixture", "hyper_octahedral", "magic"] {
        assert!(lines.iter().any(|l| l.ends_with(cat)), "{cat} missing");
    }
}

#[test]
fn census_records_and_worker_env() {
    let out = bin()
        .args(["census", "channels", "--samples", "40", "--seed", "1"])
        .env("PAULIPROP_WORKERS", "2")
        .output()
        .unwrap();
    let lines = csv_lines(&out);
    assert!(lines[0].contains("workers=2"));
    assert_eq!(lines[1], "seed_index,d_forward,d_adjoint,robustness,category,mode");
    assert_eq!(lines.len(), 42);
    let single = csv_lines(&run(&["census", "channels", "--samples", "40", "--seed", "1"]));
    // census samples use per-index streams: rows agree across worker counts
    assert_eq!(lines[1..], single[1..]);
}

#[test]
fn qaoa_instance_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json").display().to_string();
    let args = [
        "qaoa", "--n", "10", "--m", "8", "--max-degree", "3", "--gamma", "0.3", "--n-samples", "20000",
        "--seed", "6", "--no-timing", "--save-instance", &inst,
    ];
    let first = csv_lines(&run(&args));
    assert_eq!(first[1], "gamma,m,N,C_heis,C_vdn,eps_heis,eps_nest,abs_err,eps_heis_formula");
    let cols: Vec<f64> = first[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert!(cols[7] <= cols[5] + cols[6]);
    let again = csv_lines(&run(&[
        "qaoa", "--instance", &inst, "--gamma", "0.3", "--n-samples", "20000", "--seed", "6", "--no-timing",
    ]));
    assert_eq!(first[2], again[2]);

    let bad = write_temp(&dir, "bad.json", r#"{"n": 4, "m": 1, "equations": [[0, 1, 1, 0]]}"#);
    let out = run(&["qaoa", "--instance", &bad, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn channel_commands() {
    let out = run(&["classify-channel", r#"{"type": "gate", "name": "h"}"#]);
    assert_eq!(json(&out)["category"], "CSH");
    let out = run(&["norms", r#"{"type": "depolarized_rotation", "f": 0.9, "theta": 0.7853981633974483}"#]);
    let r = json(&out);
    assert!((r["d_forward"].as_f64().unwrap() - 0.9 * std::f64::consts::SQRT_2).abs() < 1e-12);
    let out = run(&["norms", "{not json"]);
    assert_eq!(out.status.code(), Some(2));
}
