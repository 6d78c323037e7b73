use std::path::PathBuf;
use std::process::{Command, Output};

fn subrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subrank"))
        .args(args)
        .env_remove("SUBRANK_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn q_reports() {
    let o = subrank(&["q", "--dims", "6,6,6"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Q = 4"), "{}", stdout(&o));
    assert!(stdout(&o).contains("24 rows, 24 columns"));

    let o = subrank(&["q", "--dims", "2,2,2", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q"], 2);
    assert_eq!(v["binding"], "dimension-bound");

    let o = subrank(&["q", "--dims", "3,3,3,3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q"], 2);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(6), Some(8)));
}

#[test]
fn malformed_dims_are_usage_errors() {
    for args in [
        &["q", "--dims", "6,6"][..],
        &["q", "--dims", "6,x,6"],
        &["q", "--dims", "0,6,6"],
        &["q"],
        &["certificate", "--dims", "6,6,6"],
    ] {
        let o = subrank(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn certificate_written_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = subrank(&[
        "certificate",
        "--dims",
        "6,6,6",
        "--r",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("degree: 24"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["r"], 4);
    assert_eq!(v["dims"], serde_json::json!([6, 6, 6]));
    let degree: u64 = v["monomial"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["power"].as_u64().unwrap())
        .sum();
    assert_eq!(degree, 24);
}

#[test]
fn certificate_regime_errors() {
    let o = subrank(&["certificate", "--dims", "6,6,6", "--r", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("15 columns < 60 rows"),
        "{}",
        stderr(&o)
    );
    let o = subrank(&["certificate", "--dims", "6,6,6", "--r", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_certificate() {
    let o = subrank(&["certificate", "--dims", "3,3,3", "--r", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["steps"], serde_json::json!([]));
}

#[test]
fn verify_outcomes() {
    let o = subrank(&["verify", "--dims", "6,6,6", "--r", "4", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("seed 0: rank 24"), "{}", stdout(&o));

    let o = subrank(&["verify", "--dims", "4,4,4", "--r", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank 6"));

    let o = subrank(&["verify", "--dims", "6,6,6", "--r", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not ok"));
    assert!(stdout(&o).contains("max rank 15"), "{}", stdout(&o));

    let o = subrank(&["verify", "--dims", "6,6,6", "--r", "4", "--prime", "91"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("91"));
}

#[test]
fn seed_falls_back_to_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_subrank"));
        cmd.args(["verify", "--dims", "5,5,5", "--r", "3"])
            .args(extra)
            .env_remove("SUBRANK_SEED");
        if let Some(seed) = env {
            cmd.env("SUBRANK_SEED", seed);
        }
        String::from_utf8(cmd.output().unwrap().stdout).unwrap()
    };
    assert!(run(Some("41"), &[]).contains("seed 41:"));
    assert!(run(Some("41"), &["--seed", "7"]).contains("seed 7:"));
    assert!(run(None, &[]).contains("seed 0:"));
}

#[test]
fn dimension_reports() {
    let o = subrank(&["dim", "--dims", "3,3,3", "--r", "3", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dim: 21"));
    assert!(stdout(&o).contains("oracle: 21 (agrees)"));

    let o = subrank(&["dim", "--dims", "4,3,3", "--r", "3", "--oracle"]);
    assert!(stdout(&o).contains("dim: 33") && stdout(&o).contains("agrees"));

    let o = subrank(&["dim", "--dims", "6,6,6", "--r", "4"]);
    assert!(stdout(&o).contains("regime: full") && stdout(&o).contains("dim: 216"));

    let o = subrank(&["dim", "--dims", "6,6,6", "--r", "7"]);
    assert!(stdout(&o).contains("empty-or-invalid"));
    assert_eq!(
        subrank(&["dim", "--dims", "6,6,6", "--r", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn table_rows() {
    let o = subrank(&["table", "--max", "100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0], "n,q,rows,cols");
    assert!(lines[100].starts_with("100,17,4080,4233"), "{}", lines[100]);

    let o = subrank(&["table", "--max", "1"]);
    assert_eq!(stdout(&o), "n,q,rows,cols\n1,1,0,0\n");
    assert_eq!(subrank(&["table", "--max", "0"]).status.code(), Some(2));
}

#[test]
fn table_verify() {
    let o = subrank(&["table", "--max", "6", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("n,q,rows,cols,certificate_valid,rank_verified\n"));
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",true,true"), "{line}");
    }
}

#[test]
fn table_verify_to_forty_is_quick() {
    let start = std::time::Instant::now();
    let o = subrank(&["table", "--max", "40", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o)
            .lines()
            .filter(|l| l.ends_with(",true,true"))
            .count(),
        40
    );
    assert!(start.elapsed().as_secs() < 600);
}

fn out_path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let json = out_path(&dir, "p.json");
    let o = subrank(&[
        "export",
        "--dims",
        "6,6,6",
        "--r",
        "4",
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 144);

    let o = subrank(&["export", "--dims", "3,3,3", "--r", "2"]);
    let text = stdout(&o);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('%')).collect();
    assert_eq!(data, ["0 6 0"]);

    let o = subrank(&[
        "export",
        "--dims",
        "6,6,6",
        "--r",
        "4",
        "--format",
        "instantiated",
        "--seed",
        "3",
    ]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("24 24 144"));
    assert!(lines.all(|l| l.split(' ').nth(2).unwrap().parse::<u64>().unwrap() > 0));

    let missing = dir.path().join("no/such/dir/p.json");
    let o = subrank(&[
        "export",
        "--dims",
        "6,6,6",
        "--r",
        "4",
        "--out",
        missing.to_str().unwrap(),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn export_round_trips() {
    let o = subrank(&[
        "export",
        "--dims",
        "5,4,6",
        "--r",
        "3",
        "--format",
        "coordinate-list",
    ]);
    let back = subrank_core::parse_coordinate_list(&stdout(&o)).unwrap();
    let original =
        subrank_core::build_pattern(3, &subrank_core::TensorShape::new(vec![5, 4, 6]).unwrap())
            .unwrap();
    assert_eq!(back, original);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    for args in [
        &["q", "--dims", "7,8,9", "--json"][..],
        &["certificate", "--dims", "9,9,9", "--r", "5"],
        &["verify", "--dims", "6,6,6", "--r", "4", "--seed", "11"],
        &["table", "--max", "12", "--verify"],
        &[
            "export",
            "--dims",
            "6,6,6",
            "--r",
            "4",
            "--format",
            "instantiated",
        ],
    ] {
        let a = subrank(args);
        let b = subrank(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status, b.status);
    }
}
