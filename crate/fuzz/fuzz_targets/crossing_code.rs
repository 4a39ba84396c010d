// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

#![no_main]

use holoknot::knot::{jones, CrossingCode};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(code) = CrossingCode::parse(text) else { return };
    let again = CrossingCode::parse(&code.to_string()).expect("printed code parses");
    assert_eq!(code, again);
    if code.len() <= 8 {
        let _ = jones(&code);
    }
});
