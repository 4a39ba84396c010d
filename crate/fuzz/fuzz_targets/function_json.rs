// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

#![no_main]

use holoknot::trig::TrigPolynomial;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = TrigPolynomial::from_json(text) {
        // accepted files round-trip
        let again = TrigPolynomial::from_json(&f.to_json()).expect("round trip");
        assert_eq!(f, again);
    }
});
