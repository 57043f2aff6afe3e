use std::path::PathBuf;
use std::process::{Command, Output};

fn rilat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rilat"))
        .args(args)
        .env_remove("RILAT_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rilat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn xu_on_lp_is_the_lp_norm() {
    let o = rilat(&["xu", "--spec", r#"{"kind":"lp","p":2}"#, "--vector", "[3,4]"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["value"], 5.0);
    assert_eq!(v["bound_kind"], "exact");
}

#[test]
fn xl_on_c0_is_the_max_norm() {
    let o = rilat(&["xl", "--spec", r#"{"kind":"c0"}"#, "--vector", "[1,-7,2]"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["value"], 7.0);
}

#[test]
fn spec_from_file() {
    let p = scratch("spec.json");
    std::fs::write(&p, r#"{"kind":"lorentz","p":2,"q":3}"#).unwrap();
    let arg = format!("@{}", p.display());
    let o = rilat(&["xu", "--spec", &arg, "--vector", "[1,1,1,1]"]);
    assert!(o.status.success());
    assert!((json(&o)["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn verify_is_byte_identical() {
    let args = ["verify", "--seed", "3", "--check", "optimal.", "--check", "interp.subadditivity"];
    let a = rilat(&args);
    let b = rilat(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["checks"].as_array().unwrap().len(), 9);
}

#[test]
fn config_from_environment() {
    let p = scratch("config.json");
    std::fs::write(&p, r#"{"seed": 11, "caps": {"samples": 4}}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rilat"))
        .args(["verify", "--check", "rearrangement."])
        .env("RILAT_CONFIG", &p)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(json(&o)["seed"], 11);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rilat(&["nonsense"]).status.code(), Some(2));
    assert_eq!(rilat(&["xu", "--spec", "{", "--vector", "[1]"]).status.code(), Some(2));
    assert_eq!(rilat(&["xu", "--spec", r#"{"kind":"lp","p":0.5}"#, "--vector", "[1]"]).status.code(), Some(2));
    assert_eq!(rilat(&["verify", "--check", "no.such"]).status.code(), Some(2));
}

#[test]
fn failed_majorization_exits_one() {
    let o = rilat(&["orbit", "--x", "[1,1]", "--y", "[2,0]"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["failing_partial_sum"], 1);
}

#[test]
fn orbit_matrix_for_the_two_point_example() {
    let o = rilat(&["orbit", "--x", "[1,0]", "--y", "[0.5,0.5]"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["matrix"], serde_json::json!([[0.5, 0.0], [0.5, 0.0]]));
}

#[test]
fn kfun_csv_of_the_unit_indicator() {
    let o = rilat(&["kfun", "--element", r#"{"step":{"atoms":[[1,1]]}}"#, "--points", "9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,K"));
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - v[0].min(1.0)).abs() <= 1e-11);
    }
}

#[test]
fn ds_growth_csv_and_report_round_trip() {
    let base = ["ds", "--x", r#"{"kind":"c0"}"#, "--y", r#"{"kind":"lp","p":1}"#, "--s", "2", "--n-max", "16"];
    let csv = rilat(&[&base[..], &["--format", "csv"]].concat());
    let text = stdout(&csv);
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    assert!(((last[3] - first[3]) / (last[2] - first[2]) - 0.5).abs() < 0.05);

    let p = scratch("ds.json");
    let js = rilat(&base);
    std::fs::write(&p, &js.stdout).unwrap();
    let arg = format!("@{}", p.display());
    let rendered = rilat(&["report", "--input", &arg]);
    assert_eq!(stdout(&rendered), text);
    let svg = rilat(&["report", "--input", &arg, "--format", "svg"]);
    assert!(stdout(&svg).contains("<polyline"));
}

#[test]
fn report_of_unknown_result_is_an_empty_table() {
    let o = rilat(&["report", "--input", r#"{"value": 1}"#]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "\n");
}

#[test]
fn output_file() {
    let p = scratch("indices.json");
    let o = rilat(&["indices", "--spec", r#"{"kind":"lp","p":3}"#, "--out", p.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["delta"], 3.0);
}
