use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hyptw::io;
use hyptw::solvers::{brute_force, Problem};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn hyptw(dir: &Path, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_hyptw")).current_dir(dir).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(dir: &Path, args: &[&str]) -> Value {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    serde_json::from_slice(&hyptw(dir, &a).stdout).unwrap()
}

#[test]
fn solve_fixture_independent_set() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("petersen.graph");
    let g = io::read_graph(&io::read_file(&f).unwrap()).unwrap().0;
    assert_eq!(brute_force(Problem::Is, &g).unwrap().value, Some(4));
    let v = json(dir.path(), &["solve", "--graph", f.to_str().unwrap(), "--problem", "is"]);
    assert_eq!(v["value"], 4);
    let w: Vec<usize> = serde_json::from_value(v["witness"].clone()).unwrap();
    assert!(w.iter().all(|&a| w.iter().all(|&b| !g.has_edge(a - 1, b - 1))));
    let v = json(dir.path(), &["solve", "--graph", f.to_str().unwrap(), "--problem", "vc"]);
    assert_eq!(v["value"], 6);
    let v = json(dir.path(), &["solve", "--graph", f.to_str().unwrap(), "--problem", "col", "--q", "3"]);
    assert_eq!(v["colorable"], true);
    let v = json(dir.path(), &["solve", "--graph", f.to_str().unwrap(), "--problem", "hc"]);
    assert_eq!(v["hamiltonian"], false);
}

#[test]
fn lowerbound_vertex_count_matches_construction() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(dir.path(), &["lowerbound", "--k", "2", "--N", "3", "--seed", "7", "-o", "lb"]);
    let pairs = v["pairs"].as_u64().unwrap();
    let interiors: u64 = v["path_interiors"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(v["vertices"].as_u64().unwrap(), pairs + 3 * interiors);
    assert_eq!(v["vertices"], v["formula"]);
    let gt =
        hyptw::hardness::GridTilingInstance::from_json(&io::read_file(dir.path().join("lb.gt.json")).unwrap()).unwrap();
    assert_eq!(gt.total_pairs() as u64, pairs);
    let h = io::read_instance(
        &io::read_file(dir.path().join("lb.graph")).unwrap(),
        &io::read_file(dir.path().join("lb.points")).unwrap(),
    )
    .unwrap();
    assert_eq!(h.n() as u64, pairs + 3 * interiors);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for tag in ["a", "b"] {
        hyptw(p, &["gen-points", "--n", "200", "--seed", "3", "-o", &format!("{tag}.points")]);
        hyptw(
            p,
            &[
                "build-graph",
                "--points",
                &format!("{tag}.points"),
                "--rho",
                "0.3",
                "--seed",
                "3",
                "-o",
                &format!("{tag}.graph"),
            ],
        );
        hyptw(
            p,
            &[
                "experiment",
                "--kind",
                "full",
                "--ns",
                "32,64",
                "--seeds",
                "1,2",
                "--trials",
                "2",
                "-o",
                &format!("{tag}.csv"),
            ],
        );
        hyptw(p, &["lowerbound", "--k", "2", "--N", "3", "--seed", "7", "-o", tag]);
    }
    for ext in ["points", "graph", "csv", "graph", "gt.json"] {
        let a = std::fs::read(p.join(format!("a.{ext}"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, std::fs::read(p.join(format!("b.{ext}"))).unwrap(), "{ext}");
    }
}

#[test]
fn decompose_then_solve_matches_experiment_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let (n, seed) = ("48", "11");
    hyptw(
        p,
        &["experiment", "--kind", "full", "--ns", n, "--seeds", seed, "--rho", "0.3", "--nu", "1.2", "-o", "x.csv"],
    );
    hyptw(p, &["gen-points", "--n", n, "--seed", seed, "-o", "p"]);
    hyptw(p, &["build-graph", "--points", "p", "--rho", "0.3", "--nu", "1.2", "--seed", seed, "-o", "g"]);
    hyptw(p, &["decompose", "--graph", "g", "--points", "p", "--seed", seed, "-o", "td", "--partition-out", "part"]);
    let rows = hyptw::experiment::rows_from_csv(&io::read_file(p.join("x.csv")).unwrap()).unwrap();
    let get = |stage: &str, metric: &str| {
        rows.iter().find(|r| r.stage == stage && r.metric == metric).map(|r| r.value.clone()).unwrap()
    };
    let (g, _, _) = io::read_graph(&io::read_file(p.join("g")).unwrap()).unwrap();
    assert_eq!(g.m().to_string(), get("graph", "edges"));
    for (prob, metric) in [("is", "is"), ("ds", "ds")] {
        let v = json(p, &["solve", "--graph", "g", "--td", "td", "--partition", "part", "--problem", prob]);
        assert_eq!(v["value"].to_string(), get("solve", metric));
    }
}

#[test]
fn malformed_files_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.graph"), "p nubg 3 1 1 1\ne 1 2\ne 1 x\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hyptw"))
        .current_dir(dir.path())
        .args(["solve", "--graph", "bad.graph", "--problem", "is"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}
