#![no_main]

use libfuzzer_sys::fuzz_target;
use semireg::experiments::{EnsembleReport, TableReport};
use semireg::io::to_json;

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = serde_json::from_slice::<EnsembleReport>(data) {
        let text = to_json(&report).unwrap();
        let again: EnsembleReport = serde_json::from_str(&text).unwrap();
        assert_eq!(to_json(&again).unwrap(), text);
    }
    if let Ok(table) = serde_json::from_slice::<TableReport>(data) {
        let _ = table.to_csv();
    }
});
