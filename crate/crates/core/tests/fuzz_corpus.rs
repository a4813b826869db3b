//! Replays the checked-in fuzz seeds through the fuzz targets' assertions.

use std::path::PathBuf;

use dga_core::presentation::{normalize, parse, parse_algebra, parse_designator, parse_module};
use dga_core::{PrimeField, Rationals};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn algebra_seeds_round_trip() {
    for (name, src) in seeds("parse_algebra") {
        let p = parse_algebra(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_algebra(&p.to_string()).unwrap(), p, "{name}");
    }
}

#[test]
fn module_seeds_round_trip() {
    for (name, src) in seeds("parse_module") {
        let m = parse_module(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_module(&m.to_string()).unwrap(), m, "{name}");
    }
}

#[test]
fn designator_seeds_round_trip() {
    for (name, src) in seeds("parse_designator") {
        let d = parse_designator(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_designator(&d.to_string()).unwrap(), d, "{name}");
    }
}

#[test]
fn document_seeds_parse() {
    for (name, src) in seeds("parse_document") {
        parse(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn normalize_seeds_are_dg_algebras() {
    for (name, src) in seeds("normalize") {
        let p = parse_algebra(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let a = normalize(&p, Rationals).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(a.check_associative() && a.check_leibniz(), "{name}");
        normalize(&p, PrimeField::new(7)).unwrap_or_else(|e| panic!("{name} over F7: {e}"));
    }
}
