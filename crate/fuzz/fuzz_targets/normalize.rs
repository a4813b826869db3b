#![no_main]

use dga_core::presentation::{normalize, parse_algebra};
use dga_core::{PrimeField, Rationals};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_algebra(src) else { return };
    // errors are fine; panics and non-associative output are not
    if let Ok(a) = normalize(&p, Rationals) {
        assert!(a.check_associative());
        assert!(a.check_leibniz());
    }
    let _ = normalize(&p, PrimeField::new(7));
});
