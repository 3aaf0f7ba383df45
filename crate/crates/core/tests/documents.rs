// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use basespace::approach::classify_base;
use basespace::doc::Workspace;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

#[test]
fn sierpinski_loads_one_space_one_base() {
    let ws = Workspace::load(&[examples().join("sierpinski.json")]).unwrap();
    assert_eq!(ws.spaces.len(), 1);
    assert_eq!(ws.bases.len(), 1);
    assert_eq!(ws.nets.len(), 3);
    let (name, base) = ws.base_for_space("sierpinski").unwrap();
    assert_eq!(name, "sierpinski-base");
    assert!(!classify_base(base).lsb.holds);
}

#[test]
fn every_example_loads() {
    for entry in std::fs::read_dir(examples()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "json") {
            Workspace::load(&[&path]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
    let ws = Workspace::load(&[examples().join("all3.json")]).unwrap();
    assert_eq!(ws.spaces.len(), 29);
    assert_eq!(ws.bases.len(), 29);
}

#[test]
fn duplicate_names_across_documents_fail_whole_document() {
    let first = r#"{"version": 1, "spaces": [{"name": "s", "points": ["a"], "opens": [[], ["a"]]}]}"#;
    let second = r#"{"version": 1,
        "spaces": [{"name": "t", "points": ["x"], "opens": [[], ["x"]]},
                   {"name": "s", "points": ["b"], "opens": [[], ["b"]]}]}"#;
    let mut ws = Workspace::from_json(first).unwrap();
    let doc = basespace::doc::parse_document(second, "second").unwrap();
    let err = ws.add_document(&doc).unwrap_err().to_string();
    assert!(err.contains("duplicate"), "{err}");
    assert!(!ws.spaces.contains_key("t"), "load is all-or-nothing");
}

#[test]
fn dangling_open_index_names_the_level() {
    let text = r#"{"version": 1,
        "spaces": [{"name": "s", "points": ["a", "b"], "opens": [[], ["a"], ["a", "b"]]}],
        "bases": [{"name": "b", "space": "s", "levels": {"coarse": [2], "fine": [1, 9]}}]}"#;
    let err = Workspace::from_json(text).unwrap_err().to_string();
    assert!(err.contains("level `fine`"), "{err}");
}

#[test]
fn wrong_version_and_unknown_fields_rejected() {
    assert!(Workspace::from_json(r#"{"version": 2}"#).is_err());
    assert!(Workspace::from_json(r#"{"version": 1, "extra": []}"#).is_err());
    assert!(Workspace::from_json(r#"{"version": 1}"#).unwrap().spaces.is_empty());
}
