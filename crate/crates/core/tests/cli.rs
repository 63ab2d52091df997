use std::path::Path;
use std::process::{Command, Output};

use stablecomp::arithmetizer::goedel_sentence;
use stablecomp::logic::sexpr::parse_formula;
use stablecomp::machines::ra_emitter;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablecomp")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn dioph_trace_matches_golden() {
    let o = run(&["dioph", "--horizon", "40"]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(Path::new(GOLDEN).join("dioph_h40.trace")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn dioph_out_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.trace");
    let b = dir.path().join("b.trace");
    for p in [&a, &b] {
        let o = run(&["dioph", "--horizon", "200", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with(b"# stablecomp "));
}

#[test]
fn header_records_defaults_and_input_hash() {
    let o = run(&["halting", "--horizon", "10"]);
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("horizon=10 report=false seed=0"));

    let copier = format!("{DATA}/copier.tm");
    let o = run(&["simulate", "--machine", &copier, "--input", "101"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("# input ") && l.contains("sha256=")));
    assert!(text.trim_end().ends_with("output=101"), "{text}");
}

#[test]
fn eval_prints_truth_value() {
    let o = run(&["eval", "--formula", "(ble x 50 (<= 0 x))"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().last(), Some("true"));
    let o = run(&["eval", "--formula", "(exle x 9 (= (s x) 0))"]);
    assert_eq!(stdout(&o).lines().last(), Some("false"));
    let o = run(&["eval", "--formula", "(ble x 1000000 (<= 0 x))", "--fuel", "100"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["eval", "--formula", "(forall x (<= 0 x))", "--fuel", "1000"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["eval", "--formula", "(exists x (= (* x x) 49))"]);
    assert_eq!(stdout(&o).lines().last(), Some("true"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    let o = run(&["simulate", "--machine", "/nonexistent/m.tm"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error\t"));
    let o = run(&["eval", "--formula", "(= 0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prove_check_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let premises = dir.path().join("p.txt");
    std::fs::write(&premises, "(= 0 0)\n").unwrap();
    let good = dir.path().join("good.proof");
    std::fs::write(&good, "(proof\n  (line (= 0 0) (premise 0)))\n").unwrap();
    let bad = dir.path().join("bad.proof");
    std::fs::write(&bad, "(proof\n  (line (= 0 (s 0)) (premise 0)))\n").unwrap();
    let args = |p: &Path| {
        vec!["prove-check".to_string(), "--proof".into(), p.display().to_string(), "--theory".into(), "empty".into(), "--premises".into(), premises.display().to_string()]
    };
    let o = Command::new(env!("CARGO_BIN_EXE_stablecomp")).args(args(&good)).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_stablecomp")).args(args(&bad)).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn goedel_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.sexp");
    let z_out = dir.path().join("z.tm");
    let emitter = format!("{DATA}/ra_emitter.tm");
    let o = run(&["goedel", "--machine", &emitter, "--out", out.to_str().unwrap(), "--z-out", z_out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with(';')).collect::<Vec<_>>().join("\n");
    let parsed = parse_formula(&body).unwrap();
    let g = goedel_sentence(&ra_emitter());
    assert_eq!(parsed, g.sentence);
    let z_spec = std::fs::read_to_string(&z_out).unwrap();
    assert_eq!(z_spec, g.z.to_spec());
    assert!(text.contains(&format!("; z-spec-sha256 {}", g.provenance)));
}
