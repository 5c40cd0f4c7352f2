use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statexfer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn build_pst_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pst51.json");
    let report = json(&[
        "build",
        "--model",
        "pst",
        "--n",
        "51",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(report["format_version"], 1);
    let chain: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(chain["format_version"], 1);
    let couplings = chain["couplings"].as_array().unwrap();
    assert_eq!(couplings.len(), 50);
    let center = couplings[24].as_f64().unwrap();
    assert!((center - 1.0).abs() < 1e-3);
}

#[test]
fn quadratic_rescale_reports_bound() {
    let report = json(&["build", "--model", "quadratic", "--n", "16", "--rescale"]);
    let bound = report["time_bound"].as_f64().unwrap();
    assert!((bound - 18.0 * std::f64::consts::PI).abs() < 1e-9);
    assert!(report["alpha"].as_f64().unwrap() > 0.0);
}

#[test]
fn apollaro_build_uses_given_ends() {
    let report = json(&[
        "build", "--model", "apollaro", "--n", "51", "--x", "0.4322", "--y", "0.7338",
    ]);
    let c = report["chain"]["couplings"].as_array().unwrap();
    assert_eq!(c[0], 0.4322);
    assert_eq!(c[1], 0.7338);
    assert_eq!(c[49], 0.4322);
    assert_eq!(c[25], 1.0);
}

#[test]
fn fidelity_reports() {
    let pst = json(&["fidelity", "--model", "pst", "--n", "12"]);
    assert!((pst["fidelity_single"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let one = json(&["fidelity", "--model", "uniform", "--n", "51"]);
    let five = json(&[
        "fidelity",
        "--model",
        "uniform",
        "--n",
        "51",
        "--window-in",
        "5",
        "--window-out",
        "5",
    ]);
    assert!(five["fidelity_single"].as_f64().unwrap() > one["fidelity_single"].as_f64().unwrap());
    assert_eq!(five["singular_values"].as_array().unwrap().len(), 5);

    let still = json(&["fidelity", "--model", "uniform", "--n", "10", "--time", "0"]);
    assert!((still["fidelity_single"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn fidelity_from_chain_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    json(&[
        "build",
        "--model",
        "pst",
        "--n",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    let report = json(&[
        "fidelity",
        "--model",
        "file",
        "--chain",
        path.to_str().unwrap(),
    ]);
    assert!((report["fidelity_single"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let missing = run(&[
        "fidelity",
        "--model",
        "file",
        "--chain",
        "/nonexistent/c.json",
    ]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["build", "--model", "nonsense"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["build", "--model", "apollaro", "--n", "51"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["fidelity", "--n", "5", "--window-in", "9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "--n", "9", "--sigma-j", "0.2:0.1:0.05"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn degenerate_sweep_is_deterministic_row() {
    let csv = stdout(&[
        "sweep",
        "--n",
        "21",
        "--sigma-j",
        "0",
        "--sigma-b",
        "0",
        "--samples",
        "50",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "# format=1");
    assert!(lines[1].starts_with("# "));
    assert_eq!(lines[2], "sigma_J,sigma_B,mean,min,quantile,samples,seed");
    assert_eq!(lines.len(), 4);
    let fields: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(fields[2], fields[3]);
    assert_eq!(fields[3], fields[4]);
    assert_eq!(fields[5], "50");
}

#[test]
fn sweep_output_independent_of_threads() {
    let base = [
        "sweep",
        "--n",
        "25",
        "--window",
        "3",
        "--sigma-j",
        "0:0.1:0.05",
        "--sigma-b",
        "0:0.1:0.1",
        "--samples",
        "120",
        "--seed",
        "9",
    ];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let eight = stdout(&[&base[..], &["--threads", "8"]].concat());
    assert_eq!(one, eight);
    let other_seed = stdout(&[&base[..9], &["--samples", "120", "--seed", "10"]].concat());
    assert_ne!(one, other_seed);
}

#[test]
fn optimize_landscape_single_cell() {
    let csv = stdout(&[
        "optimize",
        "--n",
        "21",
        "--window",
        "1",
        "--landscape-x",
        "0.5",
        "--landscape-y",
        "0.8",
    ]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[..2], ["# format=1", "x,y,value"]);
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("0.5,0.8,"));
}

#[test]
fn optimize_reports_trace() {
    let report = json(&["optimize", "--n", "21", "--window", "1"]);
    assert_eq!(report["format_version"], 1);
    let result = &report["result"];
    let trace = report["trace"].as_array().unwrap();
    assert_eq!(trace.len() as u64, result["evaluations"].as_u64().unwrap());
    let best = result["objective_value"].as_f64().unwrap();
    assert!(trace.iter().all(|p| p[2].as_f64().unwrap() <= best));
}

#[test]
fn oracle_reports_and_guards() {
    let two = json(&["oracle", "--n", "8", "--k", "2", "--t", "3.7"]);
    assert!(two["max_deviation"].as_f64().unwrap() <= 1e-8);
    assert_eq!(two["passed"], true);
    let one = json(&["oracle", "--n", "8", "--k", "1", "--t", "3.7"]);
    assert!(one["max_deviation"].as_f64().unwrap() <= 1e-12);
    let out = run(&["oracle", "--n", "20", "--k", "2"]);
    assert!(!out.status.success());
}
