use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn run_with_config(command: &str, config: &str, extra: &[&str]) -> (TempDir, Output) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", config);
    let out = dir.path().join("out");
    let mut args = vec![
        command,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = bosim(&args);
    (dir, o)
}

fn read_out(dir: &TempDir, name: &str) -> String {
    std::fs::read_to_string(dir.path().join("out").join(name)).unwrap()
}

/// Parses a CSV body into records of fields.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

const HOM: &str = r#"{
  "n": 2, "m": 2,
  "circuit": [{"kind": "bs", "i": 0, "j": 1, "theta": 0.7853981633974483, "phi": 0.0}]
}"#;

#[test]
fn permanent_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "id.json",
        "[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]",
    );
    let o = bosim(&["permanent", m.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "[1, 0]");
}

#[test]
fn permanent_of_ones_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let row = ["[1,0]"; 4].join(",");
    let text = format!("[{}]", vec![format!("[{row}]"); 4].join(","));
    let m = write(dir.path(), "ones.json", &text);
    let o = bosim(&["permanent", m.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "[24, 0]");
}

#[test]
fn malformed_matrix_exits_2_naming_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.json", "[[[1,0],[0,0]],\n[[0,0],[1,0]\n");
    let o = bosim(&["permanent", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn oversized_matrix_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let k = 31;
    let text = format!(
        "[{}]",
        vec![format!("[{}]", vec!["[0.1,0]"; k].join(",")); k].join(",")
    );
    let m = write(dir.path(), "big.json", &text);
    let o = bosim(&["permanent", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_file_exits_4() {
    let o = bosim(&["permanent", "/nonexistent/matrix.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn hong_ou_mandel_distribution() {
    let (dir, o) = run_with_config("distribution", HOM, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&read_out(&dir, "distribution.csv"));
    let coincidence = rows.iter().find(|r| r[0] == "1,1").expect("(1,1) row");
    assert!(coincidence[1].parse::<f64>().unwrap() <= 1e-12);
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-9);
}

#[test]
fn identity_circuit_gives_a_single_certain_row() {
    let config = r#"{"n": 2, "m": 3, "input": [1, 0, 1], "circuit": []}"#;
    let (dir, o) = run_with_config("distribution", config, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows: Vec<_> = csv_rows(&read_out(&dir, "distribution.csv"))
        .into_iter()
        .filter(|r| r[1].parse::<f64>().unwrap() > 0.0)
        .collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1,0,1");
    assert_eq!(rows[0][1], "1");
}

#[test]
fn haar_distribution_sums_to_one() {
    let config = r#"{"n": 3, "m": 6, "haar_seed": 11}"#;
    let (dir, o) = run_with_config("distribution", config, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&read_out(&dir, "distribution.csv"));
    assert_eq!(rows.len(), 56);
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-9);
}

#[test]
fn invalid_configs_exit_2_naming_the_field() {
    let (_d, o) = run_with_config("distribution", r#"{"n": 2, "m": 2}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("circuit"), "{}", stderr(&o));

    let (_d, o) = run_with_config("distribution", "{\n  \"n\": 2,\n  \"m\": }", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let (_d, o) = run_with_config(
        "sample",
        r#"{"n": 2, "m": 4, "haar_seed": 1, "noise": {"p": 1.5}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains('p'), "{}", stderr(&o));
}

#[test]
fn oversized_config_exits_3_without_computing() {
    let (_d, o) = run_with_config("distribution", r#"{"n": 10, "m": 40, "haar_seed": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn sampling_is_byte_reproducible() {
    let config = r#"{"n": 2, "m": 4, "haar_seed": 3,
                     "noise": {"p": 0.8, "p0": 0.5, "p2": 0.5, "eta": 0.9},
                     "trials": 2000}"#;
    let (a, oa) = run_with_config("sample", config, &["--seed", "5", "--threads", "2"]);
    let (b, ob) = run_with_config("sample", config, &["--seed", "5", "--threads", "2"]);
    assert!(
        oa.status.success() && ob.status.success(),
        "{}",
        stderr(&oa)
    );
    let csv_a = read_out(&a, "samples.csv");
    assert_eq!(csv_a, read_out(&b, "samples.csv"));
    assert_eq!(
        read_out(&a, "sample_summary.json"),
        read_out(&b, "sample_summary.json")
    );
    assert_eq!(csv_rows(&csv_a).len(), 2000);

    let (c, _) = run_with_config("sample", config, &["--seed", "6", "--threads", "2"]);
    assert_ne!(csv_a, read_out(&c, "samples.csv"));
}

#[test]
fn perfect_sources_give_zero_distances() {
    let config = r#"{"scaling": {"noise": {"p": 1.0}, "n_values": [1, 2, 3], "trials": 1000}}"#;
    let (dir, o) = run_with_config("scaling", config, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for row in csv_rows(&read_out(&dir, "scaling.csv")) {
        assert_eq!(row[5], "0", "{row:?}");
        assert_eq!(row[6], "0", "{row:?}");
        assert_eq!(row[7], "1", "{row:?}");
    }
}

#[test]
fn default_scaling_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let args = ["scaling", "--seed", "2024", "--out", out.to_str().unwrap()];
    let o = bosim(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = std::fs::read_to_string(out.join("scaling.csv")).unwrap();
    let analytic: Vec<f64> = csv_rows(&first)
        .iter()
        .map(|r| r[3].parse().unwrap())
        .collect();
    let expected = [0.9, 0.81, 0.729, 0.6561];
    for (got, want) in analytic.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-15);
    }
    assert_eq!(analytic.len(), 4);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("scaling_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["metadata"]["seed"], 2024);
    assert_eq!(summary["metadata"]["mode_rule"], "m = n^2");

    let o = bosim(&args);
    assert!(o.status.success());
    assert_eq!(
        first,
        std::fs::read_to_string(out.join("scaling.csv")).unwrap()
    );
}

#[test]
fn filter_run() {
    let config = r#"{"filter": {"eta": 0.5, "n_values": [1, 2, 3], "trials": 20000, "seed": 4}}"#;
    let (dir, o) = run_with_config("filter", config, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&read_out(&dir, "filter.csv"));
    assert_eq!(rows.len(), 3);
    for (k, row) in rows.iter().enumerate() {
        let analytic: f64 = row[2].parse().unwrap();
        let empirical: f64 = row[3].parse().unwrap();
        let se: f64 = row[4].parse().unwrap();
        assert_eq!(analytic, 0.5f64.powi(k as i32 + 1));
        assert!((empirical - analytic).abs() <= 3.0 * se);
    }
    assert!(dir.path().join("out/filter_summary.json").exists());
}
