use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn blockset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockset"))
        .args(args)
        .env_remove("BLOCKSET_THREADS")
        .output()
        .expect("run blockset")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(o)))
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

/// Checks `doc` against the schema named by its `schema` field.
fn assert_valid(doc: &Value) {
    let tag = doc["schema"].as_str().expect("schema field");
    let kind = tag.strip_prefix("blockset/").and_then(|t| t.strip_suffix("/v1")).expect("versioned tag");
    let text = std::fs::read_to_string(schema_dir().join(format!("{kind}.json"))).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{kind}: {errors:?}\n{doc:#}");
}

fn tmp_path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn tetrahedron_file_is_strong_blocking() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmp_path(&dir, "tetra_3_3.pts");
    let o = blockset(&["construct", "tetrahedron", "--q", "3", "--k", "3", "--out", &file]);
    assert_eq!(o.status.code(), Some(0));
    let o = blockset(&["verify", "strong-blocking", "--file", &file, "--s", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = blockset(&["--json", "verify", "strong-blocking", "--file", &file, "--s", "1"]);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["holds"], true);
    assert_eq!(v["size"], 9);
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmp_path(&dir, "small.pts");
    // Three points on one line cannot be strong blocking in the plane.
    std::fs::write(&file, "3 3 3 projective\n1 0 0\n0 1 0\n1 1 0\n").unwrap();
    let o = blockset(&["--json", "verify", "strong-blocking", "--file", &file, "--s", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["outcome"], "fails");
    assert!(v["witness"].is_object());
}

#[test]
fn sampled_check_without_violation_is_not_a_proof() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmp_path(&dir, "rand.pts");
    let o = blockset(&["construct", "random", "--q", "3", "--k", "4", "--s", "2", "--seed", "5", "--out", &file]);
    assert_eq!(o.status.code(), Some(0));
    let args = ["--json", "verify", "affine-blocking", "--file", &file, "--s", "2", "--sample", "50", "--seed", "1"];
    let o = blockset(&args);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["outcome"], "no_violation_found");
    assert_eq!(v["holds"], false);
}

#[test]
fn exact_bprime_three() {
    let o = blockset(&["exact", "bprime", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["optimum"], 9);
    assert_eq!(v["verified"], true);
    assert_eq!(v["chosen"].as_array().unwrap().len(), 9);
}

#[test]
fn exact_rejects_large_k() {
    let o = blockset(&["--json", "exact", "bprime", "--k", "7"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_valid(&v);
    assert_eq!(v["error"], "k_too_large");
}

#[test]
fn cq_three() {
    let o = blockset(&["cq", "--q", "3", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1.1378"), "{}", stdout(&o));
    let o = blockset(&["--json", "cq", "--q", "3"]);
    let v = json(&o);
    assert_valid(&v);
    assert!(v["c_q"].as_f64().unwrap() > 1.1375);
    let b = v["bracket"].as_array().unwrap();
    assert!(b[0].as_f64().unwrap() <= b[1].as_f64().unwrap());
}

#[test]
fn errors_exit_two() {
    let o = blockset(&["--json", "cq", "--q", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_valid(&v);
    assert_eq!(v["error"], "not_a_prime_power");

    let o = blockset(&["verify", "code", "--file", "/nonexistent/code.mat", "--check", "minimal"]);
    assert_eq!(o.status.code(), Some(2));

    let o = blockset(&["--threads", "0", "cq", "--q", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_blockset"))
        .args(["exact", "bprime", "--k", "3"])
        .env("BLOCKSET_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["optimum"], 9);
}

#[test]
fn code_checks() {
    let dir = tempfile::tempdir().unwrap();
    let file = tmp_path(&dir, "c.mat");
    // A [4, 2] ternary code meeting the tetracode parameters.
    std::fs::write(&file, "3 2 4\n1 0 1 1\n0 1 1 2\n").unwrap();
    for check in ["minimal", "trifferent"] {
        let o = blockset(&["--json", "verify", "code", "--file", &file, "--check", check]);
        assert_eq!(o.status.code(), Some(0), "{check}");
        let v = json(&o);
        assert_valid(&v);
        assert_eq!(v["verdict"]["holds"], true);
    }
    let o = blockset(&["--json", "verify", "code", "--file", &file, "--check", "distance"]);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["distance"], 3);

    std::fs::write(&file, "3 2 3\n1 0 1\n0 1 0\n").unwrap();
    let o = blockset(&["--json", "verify", "code", "--file", &file, "--check", "minimal"]);
    assert_eq!(o.status.code(), Some(1));
    assert_valid(&json(&o));
}

#[test]
fn count_with_oracle() {
    let o = blockset(&["--json", "count", "--q", "3", "--k", "4", "--s", "2", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["qbin"], "130");
    assert_eq!(v["n_q"], "37");
    assert_eq!(v["oracle_matches"], true);
}

#[test]
fn bounds_documents() {
    let o = blockset(&["--json", "bounds", "--q", "3", "--k", "5", "--s", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_valid(&v);
    assert!(v["violations"].as_array().unwrap().is_empty());
    let o = blockset(&["--json", "bounds", "--trifferent", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_valid(&json(&o));
    let o = blockset(&["bounds", "--q", "3", "--k", "5", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("name,"), "{}", stdout(&o));
}

#[test]
fn tl_table_steps() {
    let o = blockset(&["table", "tl", "--n-max", "18", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k_min,k_max,t_l_min,t_l_max"));
    let rows: Vec<Vec<u64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 18);
    for r in &rows {
        let expected = match r[0] {
            1..=3 => 3,
            4..=8 => 9,
            9..=13 => 27,
            _ => 81,
        };
        assert_eq!((r[3], r[4]), (expected, expected), "n = {}", r[0]);
    }
    let o = blockset(&["--json", "table", "tl", "--n-max", "23"]);
    assert_eq!(o.status.code(), Some(0));
    assert_valid(&json(&o));
    let o = blockset(&["table", "tl", "--n-max", "24"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn random_construction_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = tmp_path(&dir, "a.pts");
    let b = tmp_path(&dir, "b.pts");
    for f in [&a, &b] {
        let o = blockset(&["construct", "random", "--q", "3", "--k", "5", "--s", "2", "--seed", "11", "--out", f]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let set = blockset::io::parse_points(&text).unwrap();
    assert_eq!(blockset::io::write_points(&set), text);
    let o = blockset(&["verify", "affine-blocking", "--file", &a, "--s", "2"]);
    assert_eq!(o.status.code(), Some(0));

    let o = blockset(&["--json", "construct", "random", "--q", "3", "--k", "5", "--s", "2", "--seed", "11"]);
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["verified"], true);
}

#[test]
fn graph_construction_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pts = tmp_path(&dir, "p.pts");
    let graph = tmp_path(&dir, "g.txt");
    let out = tmp_path(&dir, "out.pts");
    std::fs::write(&pts, "3 3 4 projective\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n").unwrap();
    std::fs::write(&graph, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let o = blockset(&["--json", "construct", "graph", "--points", &pts, "--graph", &graph, "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_valid(&v);
    assert_eq!(v["condition"], true);
    assert_eq!(v["verified"], true);
    let o = blockset(&["verify", "strong-blocking", "--file", &out, "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn repro_matches_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = blockset(&["--json", "repro", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&o);
    assert_valid(&v);
    for f in ["bprime.csv", "tl.csv", "bounds_grid.csv", "cq.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_to_string(dir.path().join("bprime.csv")).unwrap(), "k,bprime\n2,4\n3,9\n4,14\n");
}

#[test]
fn every_schema_is_a_valid_schema() {
    let mut n = 0;
    for entry in std::fs::read_dir(schema_dir()).unwrap() {
        let path = entry.unwrap().path();
        let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(jsonschema::validator_for(&schema).is_ok(), "{}", path.display());
        n += 1;
    }
    assert_eq!(n, 10);
}
