#![no_main]

use dga_core::presentation::parse_module;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_module(src) {
        let again = parse_module(&m.to_string()).expect("printed module parses");
        assert_eq!(again, m);
    }
});
