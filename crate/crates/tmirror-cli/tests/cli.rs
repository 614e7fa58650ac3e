use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "toric-mirror", "corpus", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmirror")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dual_of_square_is_diamond() {
    let o = run(&["--format", "json", "polytope", "dual", &corpus("square.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["name"], "diamond");
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn dual_document_round_trips() {
    let dir = std::env::temp_dir().join(format!("tmirror-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let once = stdout(&run(&["--format", "json", "polytope", "dual", &corpus("hexagon.json")]));
    let path = dir.join("dual.json");
    std::fs::write(&path, &once).unwrap();
    let twice = stdout(&run(&["--format", "json", "polytope", "dual", path.to_str().unwrap()]));
    let v: Value = serde_json::from_str(&twice).unwrap();
    let h: Value = serde_json::from_str(&std::fs::read_to_string(corpus("hexagon.json")).unwrap()).unwrap();
    let mut got: Vec<Value> = v["vertices"].as_array().unwrap().clone();
    let mut want: Vec<Value> = h["vertices"].as_array().unwrap().clone();
    got.sort_by_key(|x| x.to_string());
    want.sort_by_key(|x| x.to_string());
    assert_eq!(got, want);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn non_reflexive_inputs() {
    let o = run(&["polytope", "reflexive", &corpus("big-square.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("false"));
    assert_eq!(run(&["polytope", "dual", &corpus("big-square.json")]).status.code(), Some(2));
}

#[test]
fn malformed_and_missing_files_exit_3() {
    let path = std::env::temp_dir().join(format!("tmirror-bad-{}.json", std::process::id()));
    std::fs::write(&path, "{\"rank\": 2, \"vertices\": [[1, 0],").unwrap();
    let o = run(&["polytope", "points", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    std::fs::remove_file(&path).ok();
    assert_eq!(run(&["polytope", "points", "/no/such/file.json"]).status.code(), Some(3));
}

#[test]
fn diagonal_partition_is_rejected() {
    let o = run(&["partition", "validate", &corpus("square-diag.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("vertex-uniqueness"));
    assert_eq!(run(&["partition", "validate", &corpus("square-vsplit.json")]).status.code(), Some(0));
}

#[test]
fn fans_and_projection() {
    let o = run(&["partition", "fans", &corpus("square-vsplit.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pi_Gamma = [z_(-1,-1) z_(-1,0) z_(-1,1) : z_(1,-1) z_(1,0) z_(1,1)]"));
    assert_eq!(run(&["--rank-limit", "1", "partition", "fans", &corpus("square-vsplit.json")]).status.code(), Some(2));
    assert_eq!(run(&["--bound", "0", "partition", "lift", &corpus("square-vsplit.json")]).status.code(), Some(2));
}

#[test]
fn compactified_diamond_fiber() {
    let o = run(&["lg", "compactify", &corpus("diamond-nef.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("lambda z_(1,0) - a_(-1,0) z_(-1,-1) z_(-1,0) z_(-1,1) = 0"));
    let o = run(&["lg", "compactify", &corpus("square-split-groups.json"), "--lambda", "s,t"]);
    assert!(stdout(&o).starts_with("# non-nef split"));
    assert!(stdout(&o).contains("\nt z_(-1,0)"));
}

#[test]
fn bad_split_argument() {
    assert_eq!(run(&["lg", "emit", &corpus("diamond-nef.json"), "--split", "x"]).status.code(), Some(3));
}

#[test]
fn euler_check_passes() {
    let o = run(&["euler", "check", &corpus("elliptic-deg.json"), &corpus("elliptic-hyb.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("topological mirror: PASS (0 = -0; -2 = -2)"));
}

#[test]
fn corrupted_hybrid_entry_fails() {
    let text = std::fs::read_to_string(corpus("elliptic-hyb.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let e = &mut v["entries"][0]["e"];
    *e = Value::from(e.as_i64().unwrap() + 1);
    let path = std::env::temp_dir().join(format!("tmirror-hyb-{}.json", std::process::id()));
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["euler", "check", &corpus("elliptic-deg.json"), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn spectral_commands() {
    let deg = corpus("elliptic-deg-complex.json");
    let hyb = corpus("elliptic-hyb-complex.json");
    for mode in ["smoothing", "central_fiber"] {
        let o = run(&["ss", "pw", &deg, &hyb, "--mode", mode]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        assert!(stdout(&o).contains("P=W: PASS"));
    }
    assert_eq!(run(&["ss", "pd", &hyb]).status.code(), Some(0));
    assert_eq!(run(&["ss", "cubical", &deg, &hyb, "--label", "0"]).status.code(), Some(0));
    let o = run(&["ss", "monodromy", &deg]);
    assert!(stdout(&o).contains("abutment: match"));
    assert_eq!(run(&["ss", "pw", &deg]).status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let deg = corpus("elliptic-deg-complex.json");
    let hyb = corpus("elliptic-hyb-complex.json");
    let cases: Vec<Vec<String>> = vec![
        vec!["--format".into(), "json".into(), "partition".into(), "fans".into(), corpus("square-vsplit.json")],
        vec!["--format".into(), "json".into(), "ss".into(), "delta".into(), hyb.clone()],
        vec!["ss".into(), "pw".into(), deg, hyb],
        vec!["lg".into(), "compactify".into(), corpus("square-split-groups.json")],
    ];
    for args in cases {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&a).stdout, run(&a).stdout, "{args:?}");
    }
}

#[test]
fn charts_of_projective_plane() {
    let o = run(&["--format", "json", "euler", "charts", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7);
}
