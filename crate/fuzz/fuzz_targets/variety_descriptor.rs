#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_exceptional::variety::{build_named, VarietySpec};

fn small(spec: &VarietySpec) -> bool {
    match spec {
        VarietySpec::Xd(d) => *d <= 7,
        VarietySpec::Hirzebruch(a) => *a <= 1000,
        VarietySpec::Product(parts) => parts.iter().all(small),
        _ => true,
    }
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = text.parse::<VarietySpec>() else { return };
    assert_eq!(spec.to_string().parse::<VarietySpec>().unwrap(), spec);
    if spec.dim() <= 6 && small(&spec) {
        let fan = build_named(&spec).unwrap();
        assert_eq!(fan.dim(), spec.dim());
    }
});
