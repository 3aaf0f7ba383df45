// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use basespace_ffi::*;

const SIERPINSKI: &str = r#"{
    "version": 1,
    "spaces": [{"name": "S", "points": ["a", "b"], "opens": [[], ["a"], ["a", "b"]]}],
    "bases": [{"name": "B", "space": "S", "levels": {"e0": [2], "e1": [1, 2]}}],
    "nets": [
        {"name": "at-a", "space": "S", "cycle": ["a"]},
        {"name": "at-b", "space": "S", "cycle": ["b"]}
    ]
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = bs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn load(json: &str) -> *mut BsWorkspace {
    let mut ws = ptr::null_mut();
    let json = c(json);
    assert_eq!(unsafe { bs_workspace_load_json(json.as_ptr(), &mut ws) }, BsStatus::Ok);
    ws
}

#[test]
fn classify_and_approach() {
    let ws = load(SIERPINSKI);
    let mut witness = ptr::null_mut();
    assert_eq!(unsafe { bs_classify(ws, c("B").as_ptr(), &mut witness) }, BsStatus::Fails);
    let text = unsafe { CStr::from_ptr(witness) }.to_str().unwrap().to_string();
    assert!(text.contains("\"excluded\":1"), "{text}");
    unsafe { bs_string_free(witness) };

    assert_eq!(
        unsafe { bs_approaches(ws, c("at-a").as_ptr(), c("at-b").as_ptr()) },
        BsStatus::Ok
    );
    assert_eq!(
        unsafe { bs_approaches(ws, c("at-b").as_ptr(), c("at-a").as_ptr()) },
        BsStatus::Fails
    );

    let mut count = 0usize;
    assert_eq!(unsafe { bs_limit_count(ws, c("at-a").as_ptr(), &mut count) }, BsStatus::Ok);
    assert_eq!(count, 2);
    unsafe { bs_workspace_free(ws) };
}

#[test]
fn errors_are_reported() {
    let mut ws = ptr::null_mut();
    let bad = c(r#"{"version": 1, "bases": [{"name": "B", "space": "missing", "auto": "full"}]}"#);
    assert_eq!(unsafe { bs_workspace_load_json(bad.as_ptr(), &mut ws) }, BsStatus::InputError);
    assert!(ws.is_null());
    assert!(last_error().contains("missing"));

    assert_eq!(unsafe { bs_workspace_load_json(ptr::null(), &mut ws) }, BsStatus::NullPointer);
    let ws = load(SIERPINSKI);
    assert_eq!(
        unsafe { bs_approaches(ws, c("nope").as_ptr(), c("at-a").as_ptr()) },
        BsStatus::InputError
    );
    assert!(last_error().contains("nope"));
    assert_eq!(
        unsafe { bs_approaches(ptr::null(), c("at-a").as_ptr(), c("at-a").as_ptr()) },
        BsStatus::NullPointer
    );
    let invalid = [0xffu8, 0];
    assert_eq!(
        unsafe { bs_classify(ws, invalid.as_ptr().cast(), ptr::null_mut()) },
        BsStatus::InvalidUtf8
    );
    unsafe { bs_workspace_free(ws) };
    unsafe { bs_workspace_free(ptr::null_mut()) };
}

#[test]
fn run_json_matches_exit_codes() {
    let dir = std::env::temp_dir().join(format!("basespace-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.json");
    std::fs::write(&path, SIERPINSKI).unwrap();
    let args = serde_json::to_string(&["classify", path.to_str().unwrap(), "--json"]).unwrap();
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { bs_run_json(c(&args).as_ptr(), &mut report) }, BsStatus::Fails);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
    unsafe { bs_string_free(report) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["exit_code"], 1);
    assert_eq!(v["bases"]["B"]["lsb"]["witness"]["excluded"], "b");

    assert_eq!(
        unsafe { bs_run_json(c("not json").as_ptr(), &mut report) },
        BsStatus::InputError
    );
    assert_eq!(
        unsafe { bs_run_json(c(r#"["frobnicate"]"#).as_ptr(), &mut report) },
        BsStatus::InputError
    );
    unsafe { bs_string_free(report) };
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(bs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/basespace.h");
    let text = std::fs::read_to_string(header).unwrap();
    for sym in [
        "bs_workspace_load_json",
        "bs_run_json",
        "bs_last_error",
        "BS_STATUS_PRECONDITION_UNMET",
    ] {
        assert!(text.contains(sym), "{sym} missing from the header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .output()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
