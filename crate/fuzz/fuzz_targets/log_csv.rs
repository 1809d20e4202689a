#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = tiltrotor::harness::metrics_from_csv(data, 1.0);
});
