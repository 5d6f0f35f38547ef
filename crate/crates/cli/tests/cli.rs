use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weylbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylbound")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = weylbound(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (v, out.status.code().unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn count_cwp_spin1() {
    let (v, code) = report(&["count-cwp", "--preset", "spin1-scaled"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "count-cwp");
    assert_eq!(v["results"]["count_cwp"]["total"], 6);
    assert!(v.get("timings").is_none());
}

#[test]
fn cap_gives_inconclusive_exit() {
    let (v, code) = report(&["count-cwp", "--preset", "spin1-scaled", "--cap", "1"]);
    assert_eq!(code, 2);
    assert!(v["results"]["count_cwp"]["total"].is_null());
}

#[test]
fn errors_exit_one() {
    let out = weylbound(&["count-cwp", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
}

#[test]
fn config_errors_carry_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "t = 0.1\nseed = \"x\"\n");
    let out = weylbound(&["count-cwp", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml:2:8"), "{err}");

    let cfg = write(dir.path(), "unknown.toml", "[family]\npreset = \"spin1-scaled\"\ncolour = 1\n");
    let err = String::from_utf8_lossy(&weylbound(&["count-cwp", "--config", &cfg]).stderr).to_string();
    assert!(err.contains("unknown.toml:3:1"), "{err}");
}

#[test]
fn config_family_entries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "twofold.toml",
        "[family]\nclass = \"symmetric\"\nentries = [[\"2\", \"x\", \"y\"], [\"x\", \"0\", \"0\"], [\"y\", \"0\", \"0\"]]\n",
    );
    let (v, code) = report(&["count-cwp", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["count_cwp"]["total"], 4);
}

#[test]
fn find_weyl_preset_one() {
    let (v, code) = report(&["find-weyl", "--preset", "spin1-scaled", "--perturb", "preset1", "--t", "0.1"]);
    assert_eq!(code, 0);
    let w = &v["results"]["weyl"];
    assert_eq!(w["real"]["points"].as_array().unwrap().len(), 4);
    assert_eq!(w["complex"]["points"].as_array().unwrap().len(), 6);
    assert_eq!(v["results"]["bounds"]["parity_consistent"], true);
    assert_eq!(v["results"]["bounds"]["line"], "4 ≤ ♯WP ≤ 6");
}

#[test]
fn formulas_k4() {
    let (v, code) = report(&["formulas", "--k", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["total"], 20);
    assert_eq!(v["results"]["sequence"]["hilbert"]["dims"], serde_json::json!([1, 4, 10, 4, 1]));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = weylbound(&["report", "--preset", "spin1-scaled", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn timings_are_opt_in() {
    let (v, _) = report(&["count-cwp", "--preset", "spin1-scaled", "--timings"]);
    assert!(v["timings"]["count_cwp"].is_number());
}

#[test]
fn chern_flux_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("flux.csv");
    let (v, code) = report(&["chern", "--preset", "spin-1/2", "--grid", "8", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(v["results"].is_object());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("band,kind,i,j,theta,phi,flux"));
    assert!(lines.count() > 0);
}

#[test]
fn dispersion_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("disp.csv");
    let out = weylbound(&["find-weyl", "--preset", "spin1-scaled", "--perturb", "preset1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("s,x,y,z,e0,e1,e2"));
    assert_eq!(text.lines().count(), 202);
}

#[test]
fn band_report_bounds() {
    let (v, code) = report(&["report", "--preset", "band", "--alpha", "1,0,7/2", "--seed", "1", "--t", "0.1"]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["count_cwp"]["total"], 20);
    assert_eq!(r["bounds"]["line"], "8 ≤ ♯WP ≤ 20");
    assert_eq!(r["weyl"]["complex"]["points"].as_array().unwrap().len(), 20);
    assert_eq!(r["weyl"]["complex"]["complete"], true);
    assert_eq!(r["errors"], serde_json::json!([]));
}
