use serde_json::Value;
use shapelab::enumerate::{enumerate_classes, EnumerationTask, SignatureFilter};
use shapelab::io::{forms_to_string, read_forms};
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn shapelab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shapelab"));
    cmd.args(args).env_remove("SHAPELAB_THREADS");
    if let Some(t) = threads {
        cmd.env("SHAPELAB_THREADS", t);
    }
    cmd.output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = shapelab(args, None);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(args: &[&str]) -> i32 {
    shapelab(args, None).status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn read(p: &str) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

#[test]
fn enumerate_matches_library() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "f.csv");
    ok(&["enumerate", "--xmax", "30000", "--i", "1", "--maximal-only", "--out", &out]);
    let recs = enumerate_classes(&EnumerationTask::new(30_000, SignatureFilter::One).maximal_only(true)).unwrap();
    assert_eq!(read(&out), forms_to_string(&recs).unwrap());
}

#[test]
fn brute_matches_enumerate() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    ok(&["brute", "--xmax", "3000", "--out", &a]);
    ok(&["enumerate", "--xmax", "3000", "--i", "both", "--include-c3", "--out", &b]);
    let (ra, rb) = (read_forms(read(&a).as_bytes()).unwrap(), read_forms(read(&b).as_bytes()).unwrap());
    assert_eq!(ra.len(), rb.len());
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!((x.form, x.disc, x.signature, x.s3, x.maximal), (y.form, y.disc, y.signature, y.s3, y.maximal));
        assert!((x.shape.x - y.shape.x).abs() < 1e-12 && (x.shape.y - y.shape.y).abs() < 1e-12);
    }
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let mut seen = Vec::new();
    for t in ["1", "3"] {
        let (f, r) = (path(&dir, &format!("f{t}.csv")), path(&dir, &format!("r{t}.json")));
        let run = |args: &[&str]| assert!(shapelab(args, Some(t)).status.success());
        run(&["enumerate", "--xmax", "100000", "--i", "both", "--out", &f]);
        run(&["equidist", "--in", &f, "--cells", "4x6", "--region", "0,0.5,1,2", "--out", &r]);
        let mc = shapelab(&["mc-ratio", "--i", "0", "--ymax", "4", "--region", "0,0.5,1,2", "--samples", "200000", "--seed", "9"], Some(t));
        seen.push((read(&f), read(&r), mc.stdout));
    }
    assert!(seen[0] == seen[1]);
}

#[test]
fn equidist_report_fields() {
    let dir = TempDir::new().unwrap();
    let (f, r) = (path(&dir, "f.csv"), path(&dir, "r.json"));
    ok(&["enumerate", "--xmax", "50000", "--i", "0", "--out", &f]);
    ok(&["equidist", "--in", &f, "--cells", "2x3", "--region", "0,0.25,1,inf", "--region", "0,0.5,1,1.5", "--out", &r, "--xmax", "50000"]);
    let v: Value = serde_json::from_str(&read(&r)).unwrap();
    assert_eq!(v["X"], 50000);
    assert_eq!(v["i"], 0);
    assert_eq!(v["filters"]["maximal_only"], false);
    assert_eq!(v["cells"].as_array().unwrap().len(), 6);
    assert_eq!(v["dof"], 5);
    assert_eq!(v["ratios"][0]["region"], "0,0.25,1,inf");
    assert!(v["cells"][2]["y2"].is_null());
}

#[test]
fn residue_files() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    let res = data("forms_residues.txt");
    ok(&["enumerate", "--xmax", "20000", "--i", "both", "--mod", "2", "--residues", &res, "--out", &a]);
    let with_mod = path(&dir, "r.txt");
    std::fs::write(&with_mod, "mod 2\n0 * * *\n").unwrap();
    ok(&["enumerate", "--xmax", "20000", "--i", "both", "--mod", "2", "--residues", &with_mod, "--out", &b]);
    assert_eq!(read(&a), read(&b));
    assert!(read(&a).lines().skip(1).all(|l| l.split(',').next().unwrap().parse::<i64>().unwrap() % 2 == 0));
    assert_eq!(code(&["enumerate", "--xmax", "2000", "--i", "both", "--mod", "3", "--residues", &with_mod, "--out", &b]), 1);
    assert_eq!(code(&["enumerate", "--xmax", "2000", "--i", "both", "--mod", "2", "--out", &b]), 1);
}

#[test]
fn local_density_output() {
    let v = json(&ok(&["local-density", "--p", "3", "--what", "maximal"]));
    assert_eq!((v["p"].as_u64(), v["density"].as_str()), (Some(3), Some("208/243")));
    let dir = TempDir::new().unwrap();
    let pred = path(&dir, "p.txt");
    std::fs::write(&pred, "mod 4\n0 * * *\n2 * * *\n").unwrap();
    let v = json(&ok(&["local-density", "--p", "2", "--what", &format!("file:{pred}")]));
    assert_eq!(v["density"], "1/2");
    assert_eq!(code(&["local-density", "--p", "3", "--what", &format!("file:{pred}")]), 1);
    assert_eq!(code(&["local-density", "--p", "11", "--what", "maximal"]), 1);
    assert_eq!(code(&["local-density", "--p", "2", "--what", "nonsense"]), 1);
}

#[test]
fn mc_outputs() {
    let v = json(&ok(&["mc-jacobian", "--i", "1", "--testfn", "B", "--samples", "1000000", "--seed", "4"]));
    for k in ["estimate", "stderr", "N", "seed", "config"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!((v["N"].as_u64(), v["seed"].as_u64()), (Some(1_000_000), Some(4)));
    let v = json(&ok(&["mc-ratio", "--i", "1", "--ymax", "4", "--region", "0,0.5,1,2", "--samples", "400000", "--seed", "4"]));
    let (e, s, mu) = (v["estimate"].as_f64().unwrap(), v["stderr"].as_f64().unwrap(), v["config"]["mu_ratio"].as_f64().unwrap());
    assert!((e - mu).abs() < 4.0 * s);
}

#[test]
fn ingest_command() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.json");
    ok(&["ingest", "--in", &data("golden_fields.csv"), "--out", &out, "--d4-test"]);
    let v: Value = serde_json::from_str(&read(&out)).unwrap();
    let flags: Vec<Value> = v.as_array().unwrap().iter().map(|r| r["d4_symmetric"].clone()).collect();
    assert_eq!(flags, [Value::Null, Value::Bool(false), Value::Bool(true), Value::Null]);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x");
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["enumerate", "--xmax", "100", "--i", "2", "--out", &out]), 1);
    assert_eq!(code(&["enumerate", "--xmax", "0", "--i", "0", "--out", &out]), 1);
    assert_eq!(code(&["brute", "--xmax", "20000", "--out", &out]), 1);
    assert_eq!(code(&["equidist", "--in", &path(&dir, "missing.csv"), "--cells", "4x6", "--out", &out]), 2);
    assert_eq!(code(&["mc-ratio", "--i", "0", "--ymax", "20", "--region", "0,0.5,1,2", "--samples", "1000", "--seed", "1"]), 1);

    let bad = path(&dir, "bad.csv");
    std::fs::write(&bad, "a,b,c,d,disc,i,s3,maximal,x,y\n1,0,-1,-1,-23,1,1,1,0.9,0.9\n").unwrap();
    assert_eq!(code(&["equidist", "--in", &bad, "--cells", "4x6", "--out", &out]), 2);
    assert_eq!(code(&["equidist", "--in", &bad, "--cells", "4by6", "--out", &out]), 1);

    let bad_fields = path(&dir, "bad_fields.csv");
    std::fs::write(&bad_fields, read(&data("golden_fields.csv")).replace(",-23,", ",-92,")).unwrap();
    assert_eq!(code(&["ingest", "--in", &bad_fields, "--out", &out]), 2);

    let env = shapelab(&["local-density", "--p", "2", "--what", "maximal"], Some("zero"));
    assert_eq!(env.status.code(), Some(1));
}
