#![no_main]

use dga_core::presentation::parse_algebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_algebra(src) {
        // printing and reparsing is the identity on accepted input
        let again = parse_algebra(&p.to_string()).expect("printed presentation parses");
        assert_eq!(again, p);
    }
});
