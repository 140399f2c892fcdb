use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_intrinsic-cap"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

const CONCRETE: &str = r#"{"m":3,"n":3,"rows":[[0.3,0.3,0.4],[0.2,0.5,0.3],[0.4,0.1,0.5]]}"#;
const UNIFORM_BSC: &str = r#"{"rows":[[0.5,0.5],[0.5,0.5]]}"#;

#[test]
fn analyze_concrete() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "w.json", CONCRETE);
    let o = run(&["analyze", f.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let lo = v["ic11_exact"]["lower"].as_f64().unwrap();
    let hi = v["ic11_exact"]["upper"].as_f64().unwrap();
    assert!((lo - 0.4).abs() < 1e-6);
    assert!((hi - 1.4680).abs() < 1e-4);
    assert_eq!(v["ic11_bounds"]["lower"]["status"], "bracket");
    assert!(v["ic11_exact"]["lower_witness"]["atoms"].is_array());
    assert!(v["ic10"].is_null() && v["ic01"].is_null());
}

#[test]
fn analyze_uniform_bsc() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "u.json", UNIFORM_BSC);
    let o = run(&["analyze", f.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ic11_exact"]["lower"].as_f64().unwrap().abs(), 0.0);
    assert!((v["ic11_exact"]["upper"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["ic10"]["lower"]["status"], "exact");
    assert!((v["ic01"]["upper"]["lo"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_row_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", r#"{"rows":[[0.6,0.5],[0.5,0.5]]}"#);
    let o = run(&["analyze", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not stochastic"));
    let missing = run(&["analyze", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "w.json", CONCRETE);
    // Column sums lie outside [1, 1], which makes the decomposition infeasible.
    let o = run(&["decompose", f.to_str().unwrap(), "--birkhoff", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decompose_z_channel() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "z.json", r#"{"rows":[[1,0],[0.3,0.7]]}"#);
    let o = run(&["decompose", f.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let atoms = v["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    let mut w: Vec<f64> = atoms.iter().map(|a| a["weight"].as_f64().unwrap()).collect();
    w.sort_by(f64::total_cmp);
    assert!((w[0] - 0.3).abs() < 1e-12 && (w[1] - 0.7).abs() < 1e-12);
}

#[test]
fn decompose_uniform_bsc_lexicographic_gives_constants() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "u.json", UNIFORM_BSC);
    let o = run(&["decompose", f.to_str().unwrap(), "--ordering-seed", "0", "--format", "csv"]);
    assert_eq!(stdout(&o), "image,weight\n1 1,0.5\n2 2,0.5\n");
}

#[test]
fn decompose_doubly_stochastic_into_permutations() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", r#"{"rows":[[0.2,0.3,0.5],[0.5,0.2,0.3],[0.3,0.5,0.2]]}"#);
    let o = run(&["decompose", f.to_str().unwrap(), "--birkhoff", "1,1"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for a in v["atoms"].as_array().unwrap() {
        let mut im: Vec<u64> = a["image"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        im.sort_unstable();
        assert_eq!(im, vec![1, 2, 3]);
    }
}

#[test]
fn sweep_bsc_and_z() {
    let o = run(&["sweep", "--family", "bsc", "--param-grid", "0:1:0.5"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,lower11,lower10,lower01,upper11,upper10,upper01");
    let lower11: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(lower11, ["1", "0", "1"]);

    let z = stdout(&run(&["sweep", "--family", "z", "--param-grid", "0:1:1"]));
    assert_eq!(z.lines().nth(1), Some("0,1,1,1,1,1,1"));
    assert_eq!(z.lines().nth(2), Some("1,0,0,0,0,0,0"));
}

#[test]
fn sweep_rejects_bad_grids() {
    for grid in ["0:1:0", "1:0:0.1", "0:1", "a:b:c"] {
        let o = run(&["sweep", "--family", "bsc", "--param-grid", grid]);
        assert_eq!(o.status.code(), Some(2), "{grid}");
    }
}

#[test]
fn si_sweep_preset_peaks_at_q() {
    let o = run(&["si-sweep", "--preset", "paper-fig5", "--q", "0.25", "--p-grid", "0:0.5:0.01"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,capacity_bits"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (p, c) = l.split_once(',').unwrap();
            (p.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 51);
    let best = rows.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert!((best.0 - 0.25).abs() < 1e-12);
    // p = 1/2 leaves the encoder with an independent observation.
    let last = rows.last().unwrap();
    assert!((last.1 - 0.2054347799).abs() < 1e-9);
}

#[test]
fn csv_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let o = bin()
            .env("INTRINSIC_CAP_THREADS", threads)
            .args(["si-sweep", "--p-grid", "0:0.5:0.05", "--output", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let s1 = run(&["sweep", "--family", "binary", "--eps2", "0.2", "--param-grid", "0:1:0.05"]);
    let s2 = run(&["sweep", "--family", "binary", "--eps2", "0.2", "--param-grid", "0:1:0.05"]);
    assert_eq!(s1.stdout, s2.stdout);
    assert_eq!(stdout(&s1).lines().count(), 22);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = bin().env("INTRINSIC_CAP_THREADS", "zero").args(["verify-paper"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_paper_passes() {
    let o = run(&["verify-paper"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("FAIL"));
    let loose = run(&["verify-paper", "--tol", "0.1", "--format", "json"]);
    assert_eq!(loose.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&loose.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn unknown_preset_is_an_input_error() {
    let o = run(&["si-sweep", "--preset", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
