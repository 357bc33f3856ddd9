//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn evotab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evotab"))
        .args(args)
        .env_remove("EVOTAB_OUT")
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, extra: &[&str]) -> Output {
    let input = data("stores.csv");
    let schema = data("stores.schema");
    let mut args = vec![
        "run",
        "--input",
        input.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out_dir = dir.to_str().unwrap().to_string();
    args.push("--out");
    args.push(&out_dir);
    evotab(&args)
}

#[test]
fn run_dombal_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["--strategy", "dombal"]);
    assert!(output.status.success(), "{output:?}");

    for file in [
        "restpoint.json",
        "trajectory.csv",
        "persistence.csv",
        "report.json",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }

    let restpoint: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("restpoint.json")).unwrap())
            .unwrap();
    assert_eq!(restpoint["converged"], serde_json::json!(true));
    let gamma: Vec<f64> = restpoint["gamma"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let expected = [0.15, 0.15, 0.14, 0.14, 0.13, 0.14, 0.17];
    for (got, want) in gamma.iter().zip(&expected) {
        assert!((got - want).abs() < 0.01, "{got} vs {want}");
    }
}

#[test]
fn missing_schema_file_exits_one_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let output = evotab(&[
        "run",
        "--input",
        data("stores.csv").to_str().unwrap(),
        "--schema",
        "/nonexistent/stores.schema",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("/nonexistent/stores.schema"), "{stderr}");
}

#[test]
fn truncated_iteration_budget_exits_two_with_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(dir.path(), &["--strategy", "altsel", "--max-iter", "3"]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");

    let trajectory = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    // header + (3 steps + initial point) * 7 genes
    assert_eq!(trajectory.lines().count(), 1 + 4 * 7);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["rest_point"]["converged"], serde_json::json!(false));
}

#[test]
fn rank_organisms_altsel_puts_store_j_first() {
    let dir = tempfile::tempdir().unwrap();
    let output = evotab(&[
        "rank",
        "--axis",
        "organisms",
        "--input",
        data("stores.csv").to_str().unwrap(),
        "--schema",
        data("stores.schema").to_str().unwrap(),
        "--strategy",
        "altsel",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.path().join("rank_organisms.csv")).unwrap();
    let first_row = csv.lines().nth(1).unwrap();
    assert!(first_row.starts_with("J,"), "{first_row}");
}

#[test]
fn rank_genes_dombal_puts_flagship_first() {
    let dir = tempfile::tempdir().unwrap();
    let output = evotab(&[
        "rank",
        "--axis",
        "genes",
        "--input",
        data("stores.csv").to_str().unwrap(),
        "--schema",
        data("stores.schema").to_str().unwrap(),
        "--strategy",
        "dombal",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.path().join("rank_genes.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8); // header + 7 genes
    let first_row = csv.lines().nth(1).unwrap();
    assert!(first_row.starts_with("flagship,"), "{first_row}");
}

#[test]
fn distribute_writes_shares_that_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let output = evotab(&[
        "distribute",
        "--input",
        data("stores.csv").to_str().unwrap(),
        "--schema",
        data("stores.schema").to_str().unwrap(),
        "--strategy",
        "dombal",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
    let mut share_sum = 0.0;
    let mut dev_sum = 0.0;
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        share_sum += fields[1].parse::<f64>().unwrap();
        dev_sum += fields[2].parse::<f64>().unwrap();
    }
    assert!((share_sum - 1.0).abs() < 1e-4);
    assert!(dev_sum.abs() < 1e-4);
}

#[test]
fn payoff_altsel_matches_published_transfer_entry() {
    let dir = tempfile::tempdir().unwrap();
    let output = evotab(&[
        "payoff",
        "--input",
        data("stores.csv").to_str().unwrap(),
        "--schema",
        data("stores.schema").to_str().unwrap(),
        "--strategy",
        "altsel",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.path().join("payoff_altsel_dw.csv")).unwrap();
    let first_row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = first_row.split(',').collect();
    assert_eq!(fields[0], "distance");
    let dw_12: f64 = fields[2].parse().unwrap();
    assert!((dw_12 - 1.46).abs() <= 0.02, "{dw_12}");
}

#[test]
fn payoff_dombal_matches_flagship_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let output = evotab(&[
        "payoff",
        "--input",
        data("stores.csv").to_str().unwrap(),
        "--schema",
        data("stores.schema").to_str().unwrap(),
        "--strategy",
        "dombal",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.path().join("payoff_dombal_a.csv")).unwrap();
    let last_row = csv.lines().last().unwrap();
    let fields: Vec<&str> = last_row.split(',').collect();
    assert_eq!(fields[0], "flagship");
    let a_77: f64 = fields[7].parse().unwrap();
    assert!((a_77 - (-0.785714)).abs() < 1e-4, "{a_77}");
}

#[test]
fn degenerate_dispersion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // columns are permutations of each other and rows all average the same:
    // both dispersions vanish, so altsel payoffs are undefined
    let input = dir.path().join("degenerate.csv");
    fs::write(&input, "id,a,b\nr1,1,0\nr2,0,1\n").unwrap();
    let schema = dir.path().join("degenerate.schema");
    fs::write(&schema, "id = label\na = direct\nb = direct\n").unwrap();
    let output = evotab(&[
        "payoff",
        "--input",
        input.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--strategy",
        "altsel",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("dispersion"), "{stderr}");
}

#[test]
fn all_constant_input_exits_one_as_unusable() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    fs::write(&input, "id,a,b\nr1,0.5,0.5\nr2,0.5,0.5\n").unwrap();
    let schema = dir.path().join("flat.schema");
    fs::write(&schema, "id = label\na = direct\nb = direct\n").unwrap();
    let output = evotab(&[
        "run",
        "--input",
        input.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
        "--strategy",
        "altsel",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unusable"), "{stderr}");
}

#[test]
fn mixed_strategy_runs_with_explicit_weights() {
    let dir = tempfile::tempdir().unwrap();
    let output = run_in(
        dir.path(),
        &["--strategy", "mixed", "--mix", "g:dom=0.5,w:bal=0.5"],
    );
    assert!(output.status.success(), "{output:?}");
    assert!(dir.path().join("restpoint.json").exists());
}

#[test]
fn identical_inputs_produce_byte_identical_outputs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let output = run_in(dir.path(), &["--strategy", "altsel", "--starts", "3"]);
        assert!(output.status.success(), "{output:?}");
    }
    for file in [
        "restpoint.json",
        "trajectory.csv",
        "persistence.csv",
        "report.json",
    ] {
        let a = fs::read(dir_a.path().join(file)).unwrap();
        let b = fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn init_file_sets_the_starting_point() {
    let dir = tempfile::tempdir().unwrap();
    let init = dir.path().join("init.txt");
    fs::write(&init, "0.4\n0.1\n0.1\n0.1\n0.1\n0.1\n0.1\n").unwrap();
    let output = run_in(
        dir.path(),
        &["--strategy", "dombal", "--init", init.to_str().unwrap()],
    );
    assert!(output.status.success(), "{output:?}");
    let trajectory = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let first_data_row = trajectory.lines().nth(1).unwrap();
    assert_eq!(first_data_row, "0,distance,0.400000");
}

#[test]
fn env_var_provides_default_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-env");
    let output = Command::new(env!("CARGO_BIN_EXE_evotab"))
        .args([
            "run",
            "--input",
            data("stores.csv").to_str().unwrap(),
            "--schema",
            data("stores.schema").to_str().unwrap(),
        ])
        .env("EVOTAB_OUT", &out)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    assert!(out.join("restpoint.json").exists());
}
