#![no_main]

use libfuzzer_sys::fuzz_target;
use semireg::series::{solve_output, ExtFloat, GfSystem};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sys) = GfSystem::parse(text) {
        let again = GfSystem::parse_with_step(&sys.to_text(), sys.default_step()).expect("printed system parses");
        assert_eq!(again.unknowns(), sys.unknowns());
        let _ = solve_output::<ExtFloat>(&sys, 8);
    }
});
