use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extremal"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).env("EXTREMAL_OUT", out).output().expect("binary runs")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .map(|rd| rd.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn run_writes_result_csv_and_svg() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["run", "--svg", scenario("check_rectangle.json").to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files(out.path()), ["check_rectangle.result.json", "check_rectangle.svg", "check_rectangle.witness.csv"]);
    let doc: Value = serde_json::from_slice(&std::fs::read(out.path().join("check_rectangle.result.json")).unwrap()).unwrap();
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["result"]["rectangle"], serde_json::json!([[1, 2], [1, 2]]));
    assert_eq!(doc["result"]["unique"], false);
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["run", scenario("reduced_form_infeasible.json").to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("crossing.json");
    std::fs::write(&bad, r#"{"kind": "decompose", "dims": [2, 2], "values": [1, 0, 0, 1]}"#).unwrap();
    let o = run(&["run", bad.to_str().unwrap()], out.path());
    assert_eq!(o.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&std::fs::read(out.path().join("crossing.result.json")).unwrap()).unwrap();
    assert_eq!(doc["status"], "structure_violation");
}

#[test]
fn malformed_input_leaves_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"kind": "ppi", "n": 2,"#).unwrap();
    let o = run(&["run", "--svg", broken.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(files(&out).is_empty());

    let typo = dir.path().join("typo.json");
    std::fs::write(&typo, r#"{"kind": "rationalize", "q": [[0.1, 0.2], [0.3, true]]}"#).unwrap();
    let o = run(&["run", typo.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/q/1/1"));
    assert!(files(&out).is_empty());
}

#[test]
fn batch_jobs_match_serial() {
    let names = ["decompose.json", "rationalize.json", "ppi_linear_2d.json", "reduced_form_spa.json"];
    let paths: Vec<String> = names.iter().map(|n| scenario(n).to_string_lossy().into_owned()).collect();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut serial = vec!["run", "--svg"];
    serial.extend(paths.iter().map(String::as_str));
    let mut parallel = serial.clone();
    parallel.extend(["--jobs", "4"]);
    assert!(run(&serial, a.path()).status.success());
    assert!(run(&parallel, b.path()).status.success());
    assert_eq!(files(a.path()), files(b.path()));
    for f in files(a.path()) {
        assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn out_flag_overrides_env() {
    let (env_dir, flag_dir) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let o = run(&["run", scenario("rationalize.json").to_str().unwrap(), "--out", flag_dir.path().to_str().unwrap()], env_dir.path());
    assert!(o.status.success());
    assert!(files(env_dir.path()).is_empty());
    assert!(!files(flag_dir.path()).is_empty());
}

#[test]
fn suite_force_fail_and_seed() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["suite", "choquet", "--seed", "4"], out.path());
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&std::fs::read(out.path().join("suite-choquet-seed4.json")).unwrap()).unwrap();
    assert_eq!(doc["seed"], 4);
    assert_eq!(doc["passed"], true);

    let o = run(&["suite", "choquet", "--force-fail"], out.path());
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["suite", "no-such-suite"], out.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_subcommands() {
    let out = tempfile::tempdir().unwrap();
    let json = |args: &[&str]| -> Value {
        let o = run(args, out.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_slice(&o.stdout).unwrap()
    };
    assert_eq!(json(&["oracle", "upsets", "2x3"])["count"], 10);
    assert_eq!(json(&["oracle", "vertices", "2x2"])["count"], 6);
    assert_eq!(json(&["oracle", "rationalizable", "[[0.5,0.5],[0.0,0.1]]"])["rationalizable"], false);
    assert_eq!(json(&["oracle", "unique", "2x2", "[0,0,0,1]"])["unique"], true);
    // Fractional cells on the edge of a 2x2 grid are pinned by their all-0 and all-1 neighbours.
    assert_eq!(json(&["oracle", "unique", "2x2", "[0,0.5,0.5,1]"])["unique"], true);
    let rect = "[0,0,0,1,0,0.5,0.5,1,0,0.5,0.5,1,1,1,1,1]";
    assert_eq!(json(&["oracle", "unique", "4x4", rect])["unique"], false);
    assert_eq!(json(&["oracle", "reduced-form", "[0.25,0.75]", "[0.25,0.75]"])["feasible"], true);
    assert_eq!(json(&["oracle", "reduced-form", "[0.9,0.9]", "[0.9,0.9]"])["feasible"], false);
    let t = json(&["oracle", "trade", "8"]);
    assert_eq!(t["trade"][7][0], true);
    assert_eq!(t["trade"][0][7], false);
    assert_eq!(run(&["oracle", "upsets", "2xq"], out.path()).status.code(), Some(1));
}
