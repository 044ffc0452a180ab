//! End-to-end runs of the `hurstqv` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hurstqv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurstqv"))
        .args(args)
        .env_remove("HURSTQV_LOG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn variance_prints_constants() {
    let o = hurstqv(&["variance", "--H", "0.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["sigma2", "sigma1_2", "sigma2_2", "sigma_star2", "sigma_H2", "truncation_L", "tail_bound"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let s2 = v["sigma2"].as_f64().unwrap();
    let star = v["sigma_star2"].as_f64().unwrap();
    let sh = v["sigma_H2"].as_f64().unwrap();
    assert!((sh - (1.5 * s2 - 2.0 * star)).abs() < 1e-12);
}

#[test]
fn usage_and_domain_errors() {
    let o = hurstqv(&["variance"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hurstqv(&["variance", "--H", "0.7", "--nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hurstqv(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hurstqv(&["variance", "--H", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stderr(&o);
    assert!(line.starts_with("error: domain: "), "{line}");
    assert_eq!(line.lines().count(), 1);
}

#[test]
fn affine_csv_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("affine.csv");
    let mut text = String::from("j,t,x\n");
    for j in 0..=100 {
        text.push_str(&format!("{j},{},{}\n", j as f64 / 100.0, 1.0 + 0.5 * j as f64));
    }
    fs::write(&file, text).unwrap();
    let o = hurstqv(&["estimate", "--in", file.to_str().unwrap(), "--method", "h3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: degenerate-path: "), "{}", stderr(&o));
}

#[test]
fn nonuniform_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.csv");
    fs::write(&file, "j,t,x\n0,0,0\n1,0.3,1\n2,1,0\n").unwrap();
    let o = hurstqv(&["estimate", "--in", file.to_str().unwrap(), "--method", "known_g", "--g", "one"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: input: "), "{}", stderr(&o));
}

#[test]
fn generate_simulate_estimate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let fbm = dir.path().join("fbm.csv");
    let o = hurstqv(&["gen-fbm", "--m", "2500", "--H", "0.7", "--seed", "3", "--out", fbm.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let again = hurstqv(&["gen-fbm", "--m", "2500", "--H", "0.7", "--seed", "3"]);
    assert_eq!(stdout(&again), fs::read_to_string(&fbm).unwrap());

    let o = hurstqv(&["estimate", "--in", fbm.to_str().unwrap(), "--method", "h3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let est: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(est["estimator_id"], "hn_3");
    assert_eq!(est["effective_n"], 50);
    let h = est["h_hat"].as_f64().unwrap();
    assert!((h - 0.7).abs() < 0.2, "{h}");

    let sim = dir.path().join("sim.csv");
    let o = hurstqv(&[
        "simulate", "--process", "II", "--m", "2500", "--H", "0.75", "--seed", "8", "--out",
        sim.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&sim).unwrap().starts_with("j,t,x,b\n"));
    let o = hurstqv(&["estimate", "--in", sim.to_str().unwrap(), "--method", "known_g", "--g", "II"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let est: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (est["ci"][0].as_f64().unwrap(), est["ci"][1].as_f64().unwrap());
    let h = est["h_hat"].as_f64().unwrap();
    assert!(lo < h && h < hi);
    assert!((h - 0.75).abs() < 0.05, "{h}");

    let o = hurstqv(&["estimate", "--in", sim.to_str().unwrap(), "--method", "known_g"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn affine_simulation_with_negative_coefficients() {
    let o = hurstqv(&[
        "simulate", "--process", "affine", "--drift", "-1,0.5", "--diffusion", "1,-0.2", "--x0", "-2",
        "--m", "64", "--H", "0.6", "--seed", "1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let first = out.lines().nth(1).unwrap();
    assert!(first.starts_with("0,0.0000000000000000e0,-2e0,"), "{first}");
}

#[test]
fn help_texts_match_golden_files() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for sub in ["gen-fbm", "simulate", "estimate", "variance", "experiment"] {
        let o = hurstqv(&[sub, "--help"]);
        assert!(o.status.success());
        let text = stdout(&o);
        let file = golden.join(format!("help_{sub}.txt"));
        if std::env::var_os("HURSTQV_BLESS").is_some() {
            fs::write(&file, &text).unwrap();
        }
        let expected = fs::read_to_string(&file).unwrap();
        assert_eq!(text, expected, "help for {sub} drifted; rerun with HURSTQV_BLESS=1");
    }
}
