#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = tiltrotor::harness::parse_scenario(text) {
            // Anything that validates must survive a serialise/parse round trip.
            let again = tiltrotor::harness::parse_scenario(&s.to_json()).expect("re-parse");
            assert_eq!(s, again);
        }
    }
});
