//! End-to-end runs of the `xr` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("xr-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, file: &str, text: &str) -> String {
    let p = dir.join(file);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn xr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xr")).args(args).env_remove("XR_TOL").output().unwrap()
}

fn doc(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

const TYPE2: &str = r#"{"n":2,"values":[0.7071067811865476,-0.7071067811865476]}"#;
const TREE: &str = r#"{"vertices":["p","q"],"edges":[["p","q",2.5]],"ends":[["a","p"],["b","p"],["c","q"],["d","q"]]}"#;

#[test]
fn gromov_of_the_standard_pair_is_zero() {
    let d = scratch("gromov");
    let t = write(&d, "t.json", TYPE2);
    let x = write(&d, "x.json", r#"{"basis":[[1,0],[0,1]]}"#);
    let y = write(&d, "y.json", r#"{"basis":[[0,1],[1,0]]}"#);
    let out = xr(&["gromov", "--type", &t, "--x", &x, "--y", &y]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc(&out)["value"].as_f64(), Some(0.0));
    let out = xr(&["gromov", "--type", &t, "--x", &x, "--y", &x]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(doc(&out)["kind"], "plus_inf");
}

#[test]
fn non_opposite_cross_ratio_is_minus_infinity() {
    let d = scratch("cr");
    let t = write(&d, "t.json", TYPE2);
    let q = write(
        &d,
        "q.json",
        r#"{"x":{"basis":[[1,0],[0,1]]},"y":{"basis":[[1,0],[0,1]]},"z":{"basis":[[1,1],[1,-1]]},"w":{"basis":[[1,-1],[1,1]]}}"#,
    );
    let out = xr(&["cr", "--xi", &t, "--quad", &q]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(doc(&out)["kind"], "minus_inf");
}

#[test]
fn calibration_recovers_n_and_echoes_the_seed() {
    let out = xr(&["calibrate", "--n", "3", "--trials", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = doc(&out);
    assert!((v["c_metric"].as_f64().unwrap() - 3.0).abs() < 1e-3);
    assert_eq!(v["seed"], 7);
    assert_eq!(out.stdout, xr(&["calibrate", "--n", "3", "--trials", "50", "--seed", "7"]).stdout);
}

#[test]
fn tree_commands() {
    let d = scratch("tree");
    let t = write(&d, "t.json", TREE);
    let out = xr(&["tree-cr", "--tree", &t, "--ends", "a,b,c,d"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc(&out)["scalar"].as_f64().map(f64::abs), Some(2.5));
    let out = xr(&["tree-gromov", "--tree", &t, "--z", "a", "--w", "c", "--o", "q"]);
    assert_eq!(doc(&out)["value"].as_f64(), Some(0.0));
    let m = write(&d, "m.json", r#"{"a":"b","b":"a","c":"d","d":"c"}"#);
    let out = xr(&["tree-extend", "--source", &t, "--target", &t, "--map", &m]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(doc(&out)["vertex_map"]["p"], "p");
    let stretched = write(&d, "s.json", &TREE.replace("2.5", "2.6"));
    let out = xr(&["tree-extend", "--source", &t, "--target", &stretched, "--map", &m]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_xr"))
        .args(["tree-extend", "--source", &t, "--target", &stretched, "--map", &m])
        .env("XR_TOL", "0.5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn product_cross_ratio_reports_factors() {
    let d = scratch("product");
    let s = write(&d, "s.json", r#"{"factors":[{"kind":"h2"},{"kind":"h2"}],"weights":[0.6,0.8]}"#);
    let q = write(
        &d,
        "q.json",
        r#"{"x":[{"angle":0},{"angle":0}],"y":[{"angle":1.5},{"angle":2}],"z":[{"angle":3},{"angle":3}],"w":[{"angle":4.5},{"angle":5}]}"#,
    );
    let out = xr(&["product-cr", "--space", &s, "--quad", &q]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = doc(&out);
    let f: Vec<f64> = v["factors"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((v["scalar"].as_f64().unwrap() - (0.6 * f[0] + 0.8 * f[1])).abs() < 1e-12);
}

#[test]
fn bad_input_is_a_usage_error() {
    let d = scratch("bad");
    let t = write(&d, "t.json", "{not json");
    let out = xr(&["gromov", "--type", &t, "--x", &t, "--y", &t]);
    assert_eq!(out.status.code(), Some(1));
    assert!(doc(&out)["error"].is_string());
    assert_eq!(xr(&["frobnicate"]).status.code(), Some(1));
    let m = write(&d, "m.json", "{}");
    let out = Command::new(env!("CARGO_BIN_EXE_xr"))
        .args(["tree-extend", "--source", &m, "--target", &m, "--map", &m])
        .env("XR_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
