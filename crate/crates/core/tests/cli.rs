use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tensorcone::cli::run;

fn run_capture(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tensorcone").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn gen_file(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut full = vec!["--out", path_str.as_str(), "gen"];
    full.extend_from_slice(args);
    let (code, _, err) = run_capture(&full);
    assert_eq!(code, 0, "{err}");
    path_str
}

#[test]
fn gen_writes_instances() {
    let (code, out, _) = run_capture(&["--seed", "7", "gen", "--m", "2", "--n", "2"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["quadric_count"], 1);
    assert!(v.get("base_point").is_none());

    let (code, out, _) = run_capture(&["--seed", "1", "gen", "--m", "4", "--n", "3", "--pointed"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["quadric_count"], 18);
    assert_eq!(v["base_point"].as_array().unwrap().len(), 12);
}

#[test]
fn recover_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (m, n, dims) in [("2", "2", [2, 2]), ("4", "3", [4, 3]), ("1", "5", [5, 1])] {
        let file = gen_file(dir.path(), &format!("{m}x{n}.json"), &["--m", m, "--n", n]);
        let (code, out, err) = run_capture(&["--seed", "3", "recover", "--instance", &file]);
        assert_eq!(code, 0, "{err}");
        let report = json(&out);
        assert_eq!(report["success"], true);
        assert_eq!(report["sheet_dims"], serde_json::json!(dims));
        assert!(report["lambda"].is_string());
    }
}

#[test]
fn simple_check_and_square_complete() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("id.json");
    std::fs::write(&file, r#"{"m":2,"n":2,"seed":0,"scramble":[["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]]}"#)
        .unwrap();
    let file = file.to_str().unwrap();
    let (code, out, _) = run_capture(&["simple-check", "--instance", file, "--vector", r#"["1","2","3","6"]"#]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["simple"], true);
    let (_, out, _) = run_capture(&["simple-check", "--instance", file, "--vector", "[1, 0, 0, 1]"]);
    assert_eq!(json(&out)["simple"], false);

    let corners = dir.path().join("corners.json");
    std::fs::write(&corners, r#"{"a":[1,0,0,0],"b":[0,1,0,0],"c":[0,0,1,0]}"#).unwrap();
    let (code, out, err) = run_capture(&["square-complete", "--instance", file, "--input", corners.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["d"], serde_json::json!(["0", "0", "0", "1"]));
    assert_eq!(v["case"], "generic");
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run_capture(&["gen", "--m", "0", "--n", "2"]);
    assert_eq!(code, 2);
    let (code, _, _) = run_capture(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = run_capture(&["recover", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(code, 2);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let (code, _, _) = run_capture(&["recover", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    let file = gen_file(dir.path(), "i.json", &["--m", "2", "--n", "3"]);
    let (code, _, _) = run_capture(&["simple-check", "--instance", &file, "--vector", "[1, 2]"]);
    assert_eq!(code, 2);
    let (code, _, _) = run_capture(&["props", "--suite", "nope"]);
    assert_eq!(code, 2);
    let (code, _, _) = run_capture(&["spin-demo", "--dims", "4by3"]);
    assert_eq!(code, 2);
    let (code, _, _) = run_capture(&["--trials", "0", "props"]);
    assert_eq!(code, 2);
    let (code, out, _) = run_capture(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("spin-demo"));
}

#[test]
fn spin_demo_tables() {
    let (code, out, _) = run_capture(&["spin-demo", "--dims", "4x3,2x6"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0][..4], ["4x3", "12", "6", "6"]);
    assert_eq!(rows[1][..4], ["2x6", "12", "7", "7"]);

    let (_, out, _) = run_capture(&["spin-demo", "--dims", "2x2"]);
    assert_eq!(out.lines().nth(1).unwrap().split_whitespace().nth(2), Some("3"));

    let (_, out, _) = run_capture(&["spin-demo", "--dims", "1x12,12x1"]);
    for line in out.lines().skip(1) {
        assert_eq!(line.split_whitespace().nth(2), Some("12"));
        assert!(line.contains("every vector is simple"));
    }
}

#[test]
fn props_pass_and_detect_faults() {
    let (code, out, _) = run_capture(&["--seed", "3", "--trials", "200", "props", "--suite", "lemmas"]);
    assert_eq!(code, 0);
    assert!(out.contains("all properties hold"));

    let (code, out, err) =
        run_capture(&["--seed", "3", "--trials", "5", "props", "--suite", "lemmas", "--inject-fault"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"));
    let dump = err.split_once("counterexample:\n").unwrap().1;
    let cx = json(dump);
    assert!(cx["instance"]["scramble"].is_array());
    assert!(cx["property"].is_string());
}

#[test]
fn naturality_summary() {
    let (code, out, _) = run_capture(&["--seed", "2", "--trials", "3", "naturality"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["trials"], 12);
    assert_eq!(v["psi_pass"], 12);
    assert_eq!(v["phi_pass"], 12);
    assert_eq!(v["functor_law_pass"], 12);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let file = gen_file(dir.path(), "p.json", &["--m", "3", "--n", "3", "--pointed"]);
    let commands: Vec<Vec<&str>> = vec![
        vec!["--seed", "9", "gen", "--m", "3", "--n", "2", "--pointed"],
        vec!["--seed", "9", "recover", "--instance", &file],
        vec!["--seed", "9", "--trials", "2", "props", "--suite", "all"],
        vec!["--seed", "9", "spin-demo", "--dims", "3x3,1x4"],
        vec!["--seed", "9", "--trials", "2", "naturality"],
    ];
    for args in commands {
        assert_eq!(run_capture(&args), run_capture(&args), "{args:?}");
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tensorcone");
    let ok = Command::new(bin).args(["spin-demo", "--dims", "2x2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["spin-demo", "--dims", "2x"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let fault = Command::new(bin)
        .args(["--quiet", "--trials", "3", "props", "--suite", "squares", "--inject-fault"])
        .output()
        .unwrap();
    assert_eq!(fault.status.code(), Some(1));
}
