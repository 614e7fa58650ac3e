use std::path::PathBuf;

use toric_mirror::io::{nef_doc_from_value, parse_value, partition_from_value, polytope_from_value, polytope_to_json};
use toric_mirror::spectral_engine::StrataComplexData;
use toric_mirror::strata_calculus::{MonodromyDoc, StrataEuler};

fn read(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn polytopes_load_and_round_trip() {
    for name in ["square.json", "diamond.json", "big-square.json", "hexagon.json"] {
        let v = parse_value(&read(name)).unwrap();
        let p = polytope_from_value(&v).unwrap();
        assert_eq!(polytope_from_value(&polytope_to_json(&p, name)).unwrap(), p, "{name}");
    }
}

#[test]
fn partitions_and_nef_documents_load() {
    for name in ["square-vsplit.json", "square-diag.json"] {
        partition_from_value(&parse_value(&read(name)).unwrap()).unwrap();
    }
    let d = nef_doc_from_value(&parse_value(&read("diamond-nef.json")).unwrap()).unwrap();
    assert_eq!(d.parts.len(), 2);
    let s = nef_doc_from_value(&parse_value(&read("square-split-groups.json")).unwrap()).unwrap();
    assert_eq!(s.split_groups.unwrap().len(), 2);
}

#[test]
fn strata_documents_load() {
    StrataEuler::from_json(&read("elliptic-deg.json")).unwrap();
    StrataEuler::from_json(&read("elliptic-hyb.json")).unwrap();
    let deg = StrataComplexData::from_json(&read("elliptic-deg-complex.json")).unwrap();
    assert!(deg.has_hodge() && deg.abutment.is_some());
    StrataComplexData::from_json(&read("elliptic-hyb-complex.json")).unwrap();
    assert_eq!(MonodromyDoc::from_json(&read("elliptic-monodromy.json")).unwrap().dim, 2);
}
