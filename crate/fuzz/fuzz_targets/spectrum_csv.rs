#![no_main]

use libfuzzer_sys::fuzz_target;
use semireg::io::{read_spectrum_csv, write_spectrum_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = read_spectrum_csv(text) {
        assert_eq!(read_spectrum_csv(&write_spectrum_csv(&values)).unwrap(), values);
    }
});
