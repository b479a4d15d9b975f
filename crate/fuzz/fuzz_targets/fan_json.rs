#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_exceptional::{fan, formats};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(f) = formats::parse_fan(text) else { return };
    if f.dim() > 4 || f.ray_count() > 16 {
        return;
    }
    if fan::validate(&f).is_ok() {
        let again = serde_json::to_string(&formats::fan_file(&f).unwrap()).unwrap();
        assert_eq!(formats::parse_fan(&again).unwrap(), f);
        let _ = toric_exceptional::bondal::bondal_criterion(&f);
    }
});
