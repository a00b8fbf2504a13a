#![no_main]

use libfuzzer_sys::fuzz_target;
use semireg::series::parse_rational;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(text) {
        assert!(!r.denom().to_string().starts_with('0'));
    }
});
