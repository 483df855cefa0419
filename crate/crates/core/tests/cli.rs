use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fiwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fiwalk")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn instantiate_counts() {
    let out = fiwalk(&["instantiate", "--family", "kneser:2", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_of(&out)["report"];
    assert_eq!(r["vertices"], 10);
    assert_eq!(r["edges"], 15);

    let r = json_of(&fiwalk(&["instantiate", "--family", "complete", "--n", "4"]))["report"].clone();
    assert_eq!((r["vertices"].as_i64(), r["edges"].as_i64()), (Some(4), Some(6)));

    let r = json_of(&fiwalk(&["instantiate", "--family", "variety", "--n", "6"]))["report"].clone();
    let counts: Vec<i64> = r["vertex_orbits"].as_array().unwrap().iter().map(|o| o["vertices"].as_i64().unwrap()).collect();
    assert_eq!(counts, [120, 15, 90]);
}

#[test]
fn hitting_on_complete_graph() {
    let out = fiwalk(&["hitting", "--family", "complete", "--n-range", "3:12"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("n - 1 (10/10 oracle matches)"), "{}", stderr(&out));
}

#[test]
fn greens_on_star_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = fiwalk(&["greens", "--family", "star", "--n-range", "5:12", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let j: Value = serde_json::from_slice(&read(dir.path(), "greens.json")).unwrap();
    assert_eq!(j["passed"], true);
    let csv = String::from_utf8(read(dir.path(), "greens.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("G(center>center[]) = 1/4"));
}

#[test]
fn mixing_without_cutoff_widens() {
    let out = fiwalk(&["mixing", "--family", "nocutoff", "--walk", "lazy:0.0", "--n-range", "10:30", "--eps", "1/4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json_of(&out)["report"];
    assert_eq!(r["cutoff"]["trend"], "widening");
    assert_eq!(r["sweeps"][0]["trend"]["trend"], "linear");
}

#[test]
fn structure_polys_on_complete_graph() {
    let out = fiwalk(&["structure-polys", "--family", "complete"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("= (n - 2) r[vertex>vertex[]] + (n - 1) r[vertex>vertex[0=0]]"), "{}", stderr(&out));
    let terms = &json_of(&out)["report"]["products"][0]["terms"];
    assert_eq!(terms[0]["poly"], "n - 2");
    assert_eq!(terms[1]["poly"], "n - 1");
}

#[test]
fn too_few_points_is_unstable() {
    let out = fiwalk(&["structure-polys", "--family", "complete", "--n-range", "3:5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("insufficient_points"));
}

#[test]
fn verify_bottleneck_family() {
    let t = std::time::Instant::now();
    let out = fiwalk(&["verify", "--family", "bottleneck:2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("3/3 cells pass"));
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn input_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let spec = json_of(&fiwalk(&["instantiate", "--family", "kneser:2", "--n", "5"]))["report"]["spec"].clone();
    let mut bad = spec.clone();
    bad["edge_orbits"][0]["left"] = "nosuch".into();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad.to_string()).unwrap();
    let out = fiwalk(&["instantiate", "--spec", path.to_str().unwrap(), "--n", "5"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("edge_orbits[0]"), "{}", stderr(&out));

    assert_eq!(fiwalk(&["hitting", "--family", "kneser:2", "--n-range", "1:8"]).status.code(), Some(4));
    assert_eq!(fiwalk(&["hitting", "--family", "nosuch"]).status.code(), Some(4));
    assert_eq!(fiwalk(&["hitting", "--family", "complete", "--n-range", "9:3"]).status.code(), Some(4));
    let periodic = fiwalk(&["mixing", "--family", "star", "--n-range", "5:10"]);
    assert_eq!(periodic.status.code(), Some(4));
    assert!(stderr(&periodic).contains("lazy"));
}

#[test]
fn spec_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = json_of(&fiwalk(&["instantiate", "--family", "kneser:2", "--n", "5"]))["report"]["spec"].clone();
    let path = dir.path().join("k2.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = fiwalk(&["instantiate", "--spec", path.to_str().unwrap(), "--n", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json_of(&out)["report"];
    assert_eq!((r["vertices"].as_i64(), r["edges"].as_i64()), (Some(21), Some(105)));
    assert_eq!(r["spec"], spec);
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = fiwalk(&[
            "moments", "--family", "kneser:2", "--n-range", "7:13", "--simulate", "200", "--seed", "7", "--out", d.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    for f in ["moments.json", "moments.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
    let runs: Vec<_> = (0..2).map(|_| fiwalk(&["cutoff", "--family", "complete", "--n-range", "5:15"]).stdout).collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn lazy_zero_is_the_simple_walk() {
    let lazy = json_of(&fiwalk(&["hitting", "--family", "kneser:2", "--walk", "lazy:0.0", "--n-range", "7:14"]));
    let simple = json_of(&fiwalk(&["hitting", "--family", "kneser:2", "--n-range", "7:14"]));
    assert_eq!(lazy["passed"], true);
    let rows = |v: &Value| v["report"].clone();
    let (mut l, mut s) = (rows(&lazy), rows(&simple));
    l["walk"] = Value::Null;
    s["walk"] = Value::Null;
    assert_eq!(l, s);
}

#[test]
fn mismatches_map_to_exit_two() {
    use fiwalk::cli::{Failure, Report, EXIT_MISMATCH, EXIT_OK, EXIT_UNSTABLE};
    let mut r = Report {
        command: "hitting",
        json: Value::Null,
        header: vec![],
        rows: vec![],
        summary: vec![],
        failures: vec![],
    };
    assert_eq!(r.exit_code(), EXIT_OK);
    r.failures.push(Failure::unstable("no fit".into()));
    assert_eq!(r.exit_code(), EXIT_UNSTABLE);
    r.failures.push(Failure::mismatch("oracle disagrees".into()));
    assert_eq!(r.exit_code(), EXIT_MISMATCH);
    assert_eq!(r.full_json()["passed"], false);
}

#[test]
fn large_graphs_are_not_built() {
    // G_30 has over 650k vertices; only the orbit chains are needed.
    let out = fiwalk(&["mixing", "--family", "different_orbits", "--n-range", "30:32", "--eps", "1/4", "--jobs", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json_of(&out)["report"];
    assert!(r["equivariance"].is_null());
    let ts: Vec<i64> = r["sweeps"][0]["points"].as_array().unwrap().iter().map(|p| p[1].as_i64().unwrap()).collect();
    assert_eq!(ts[0], 786);
}
