#![no_main]

use libfuzzer_sys::fuzz_target;
use toric_exceptional::formats;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = formats::parse_divisor(text) {
        let again = serde_json::to_string(&formats::divisor_file(&d).unwrap()).unwrap();
        assert_eq!(formats::parse_divisor(&again).unwrap(), d);
    }
});
