use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use stt_ffi::*;

const FIVE_STATE: &str = include_str!("../../core/tests/data/five_state.stt");
const ORDER_TWO: &str = include_str!("../../core/tests/data/order_two.stt");

fn parse_doc(text: &str) -> *mut SttDocument {
    let c = CString::new(text).unwrap();
    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { stt_parse(c.as_ptr(), &mut doc) }, SttStatus::Ok);
    assert!(!doc.is_null());
    doc
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(stt_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn parse_serialize_round_trip() {
    let doc = parse_doc(FIVE_STATE);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { stt_serialize(doc, &mut text) }, SttStatus::Ok);
    let s = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    unsafe { stt_string_free(text) };
    let again = parse_doc(&s);
    let (mut a, mut b) = (0, 0);
    unsafe {
        assert_eq!(stt_state_count(again, &mut a), SttStatus::Ok);
        assert_eq!(stt_alphabet_size(again, &mut b), SttStatus::Ok);
        stt_document_free(again);
        stt_document_free(doc);
    }
    assert_eq!((a, b), (5, 2));
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = CString::new("alphabet 2\nstates a\nedge a 0 a 5\n").unwrap();
    let mut doc = ptr::null_mut();
    assert_eq!(unsafe { stt_parse(bad.as_ptr(), &mut doc) }, SttStatus::Parse);
    assert!(doc.is_null());
    assert!(last_error().contains("line 3"), "{}", last_error());
    assert_eq!(unsafe { stt_parse(ptr::null(), &mut doc) }, SttStatus::NullPointer);
    let mut level = 0;
    assert_eq!(unsafe { stt_sync_level(ptr::null(), &mut level) }, SttStatus::NullPointer);
    let plain = parse_doc("alphabet 2\nstates a\nedge a 0 a 0\nedge a 1 a 1\n");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { stt_annotated_product(plain, plain, &mut out) }, SttStatus::Annotation);
    unsafe { stt_document_free(plain) };
}

#[test]
fn queries_on_sample_machines() {
    let l = parse_doc(FIVE_STATE);
    let t = parse_doc(ORDER_TWO);
    let (mut level, mut lip, mut order) = (0, false, 0);
    unsafe {
        assert_eq!(stt_sync_level(l, &mut level), SttStatus::Ok);
        assert_eq!(stt_is_lipschitz(l, &mut lip), SttStatus::Ok);
        assert!(lip);
        assert_eq!(stt_is_lipschitz(t, &mut lip), SttStatus::Ok);
        assert!(!lip);
        assert_eq!(stt_order(t, 4, &mut order), SttStatus::Ok);
        assert_eq!(order, 2);
        assert_eq!(stt_order(l, 1, &mut order), SttStatus::Ok);
        assert_eq!(order, 0);
        let mut sq = ptr::null_mut();
        assert_eq!(stt_product(t, t, &mut sq), SttStatus::Ok);
        let mut n = 0;
        assert_eq!(stt_state_count(sq, &mut n), SttStatus::Ok);
        assert_eq!(n, 1);
        let mut min = ptr::null_mut();
        assert_eq!(stt_minimize(l, &mut min), SttStatus::Ok);
        assert_eq!(stt_state_count(min, &mut n), SttStatus::Ok);
        assert_eq!(n, 5);
        for d in [l, t, sq, min] {
            stt_document_free(d);
        }
    }
    assert_eq!(level, 3);
}

#[test]
fn annotated_action() {
    let bare = parse_doc(&FIVE_STATE.lines().filter(|l| !l.starts_with("annot")).collect::<Vec<_>>().join("\n"));
    let mut l = ptr::null_mut();
    assert_eq!(unsafe { stt_canonical_annotation(bare, &mut l) }, SttStatus::Ok);
    let mut sq = ptr::null_mut();
    assert_eq!(unsafe { stt_annotated_product(l, l, &mut sq) }, SttStatus::Ok);
    let x = [0u32, 0, 1, 1, 0, 1];
    let act = |doc: *const SttDocument, w: &[u32]| -> Vec<u32> {
        let (mut out, mut len) = (ptr::null_mut(), 0);
        assert_eq!(unsafe { stt_act_periodic(doc, w.as_ptr(), w.len(), &mut out, &mut len) }, SttStatus::Ok);
        let v = unsafe { std::slice::from_raw_parts(out, len) }.to_vec();
        unsafe { stt_word_free(out, len) };
        v
    };
    let once = act(l, &x);
    assert_eq!(act(sq, &x), act(l, &once));
    let (mut out, mut len) = (ptr::null_mut(), 0);
    let bad = [0u32, 2];
    assert_eq!(unsafe { stt_act_periodic(l, bad.as_ptr(), 2, &mut out, &mut len) }, SttStatus::InvalidTransducer);
    unsafe {
        stt_document_free(bare);
        stt_document_free(l);
        stt_document_free(sq);
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/stt.h")).unwrap();
    for f in ["stt_parse", "stt_serialize", "stt_minimize", "stt_product", "stt_annotated_product", "stt_act_periodic"] {
        assert!(header.contains(&format!("{f}(")), "header lacks {f}");
    }
    let probe = Command::new(&cc).arg("--version").output();
    if probe.is_err() {
        eprintln!("no C compiler found, skipping compile check");
        return;
    }
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .status()
        .unwrap();
    assert!(status.success());
}
