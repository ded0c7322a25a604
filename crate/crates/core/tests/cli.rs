use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use stt::io::{parse, parse_block_map};
use stt::monoid::MonoidElement;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn stt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stt")).args(args).output().expect("runs the binary")
}

fn stt_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stt"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn minimize_six_state_matches_five_state() {
    let o = stt(&["minimize", &data("six_state.stt")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# kappa d5 d0"));
    assert!(text.contains("# extent d2 1"));
    let got = MonoidElement::from_minimal(&parse(&text).unwrap().transducer).unwrap();
    let want = MonoidElement::from_minimal(&parse(&std::fs::read_to_string(data("five_state.stt")).unwrap()).unwrap().transducer)
        .unwrap();
    assert_eq!(got, want);
}

#[test]
fn yes_no_questions_use_exit_status() {
    assert_eq!(stt(&["check", "--lipschitz", &data("five_state.stt")]).status.code(), Some(0));
    assert_eq!(stt(&["check", "--lipschitz", &data("order_two.stt")]).status.code(), Some(1));
    assert_eq!(stt(&["splits", "6"]).status.code(), Some(0));
    assert_eq!(stt(&["splits", "8"]).status.code(), Some(1));
}

#[test]
fn errors_exit_with_two_and_a_position() {
    let o = stt_stdin(&["validate", "-"], "alphabet 2\nstates a\nedge a 0 a 0\nedge a 7 a 0\n");
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 4, column 8"), "{err}");
    assert_eq!(stt(&["validate", "/nonexistent/file.stt"]).status.code(), Some(2));
}

#[test]
fn order_of_the_order_two_element() {
    let o = stt(&["order", "--bound", "4", &data("order_two.stt")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn sync_reports_level() {
    let o = stt(&["sync", &data("five_state.stt")]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().next().unwrap().contains('3'));
}

#[test]
fn act_on_periodic_point() {
    let o = stt(&["act", &data("five_state.stt"), "--periodic", "0011"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "0,0,1,0");
    let bare = stt(&["act", &data("shift2.stt"), "--periodic", "0,1,1"]);
    assert_eq!(bare.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bare.stderr).contains("no annotation"));
}

#[test]
fn block_map_round_trip_through_the_cli() {
    let built = stt(&["from-blockmap", &data("xor.blockmap")]);
    assert!(built.status.success());
    let back = stt_stdin(&["to-blockmap", "-"], &stdout(&built));
    assert!(back.status.success(), "{}", String::from_utf8_lossy(&back.stderr));
    let (shift, f) = parse_block_map(&stdout(&back)).unwrap();
    let (shift0, f0) = parse_block_map(&std::fs::read_to_string(data("xor.blockmap")).unwrap()).unwrap();
    assert_eq!((shift, f), (shift0, f0));
}

#[test]
fn invert_five_state() {
    let inv = stt(&["invert", &data("five_state.stt")]);
    assert!(inv.status.success());
    let prod = stt_stdin(&["product", "--m", &data("five_state.stt"), "-"], &stdout(&inv));
    assert!(prod.status.success(), "{}", String::from_utf8_lossy(&prod.stderr));
    let t = parse(&stdout(&prod)).unwrap().transducer;
    assert!(MonoidElement::from_minimal(&t).unwrap().is_identity());
}

#[test]
fn debruijn_and_dot() {
    let o = stt(&["debruijn", "2", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\nstates 00 01 10 11\n"));
    let d = stt(&["dot", &data("five_state.stt")]);
    assert!(stdout(&d).starts_with("digraph transducer {"));
}

#[test]
fn sig_of_the_shift() {
    let o = stt(&["sig", &data("shift2.stt")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1");
}
