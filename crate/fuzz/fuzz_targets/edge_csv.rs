#![no_main]

use libfuzzer_sys::fuzz_target;
use semireg::io::{read_edge_csv, write_edge_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = read_edge_csv(text, None) {
        let again = read_edge_csv(&write_edge_csv(&g), Some(g.n())).expect("writer output parses");
        assert_eq!(again, g);
    }
});
