#![no_main]

use dga_core::presentation::parse_designator;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_designator(src) {
        assert_eq!(parse_designator(&d.to_string()).expect("printed designator parses"), d);
    }
});
