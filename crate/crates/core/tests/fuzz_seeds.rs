use std::path::Path;

use toric_exceptional::variety::{build_named, VarietySpec};
use toric_exceptional::{fan, formats};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.display().to_string(), std::fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

#[test]
fn fan_seeds_round_trip() {
    let mut valid = 0;
    for (name, text) in seeds("fan_json") {
        let f = formats::parse_fan(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = serde_json::to_string(&formats::fan_file(&f).unwrap()).unwrap();
        assert_eq!(formats::parse_fan(&again).unwrap(), f, "{name}");
        if fan::validate(&f).is_ok() {
            valid += 1;
        }
    }
    assert!(valid >= 3);
}

#[test]
fn divisor_and_collection_seeds_round_trip() {
    for (name, text) in seeds("divisor_json") {
        let d = formats::parse_divisor(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = serde_json::to_string(&formats::divisor_file(&d).unwrap()).unwrap();
        assert_eq!(formats::parse_divisor(&again).unwrap(), d, "{name}");
    }
    for (name, text) in seeds("collection_json") {
        let c = formats::parse_collection(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let again = serde_json::to_string(&formats::collection_file(&c).unwrap()).unwrap();
        assert_eq!(formats::parse_collection(&again).unwrap(), c, "{name}");
    }
}

#[test]
fn descriptor_seeds_build() {
    for (name, text) in seeds("variety_descriptor") {
        let spec: VarietySpec = text.parse().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(spec.to_string().parse::<VarietySpec>().unwrap(), spec);
        assert_eq!(build_named(&spec).unwrap().dim(), spec.dim(), "{name}");
    }
}
