// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

#![allow(dead_code)]

use std::path::Path;

use holoknot::circle_functions::{random_trig, Tolerances};
use holoknot::diagram::{build_diagram, FramedDiagram};
use holoknot::trig::TrigPolynomial;

pub const FIXTURES: [&str; 6] = ["sine", "k1", "trefoil", "figure_eight", "cinquefoil", "granny"];

pub fn fixture(name: &str) -> TrigPolynomial {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
    TrigPolynomial::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// The first `count` generic functions among seeded random trigonometric
/// polynomials of degree at most 6, from seed `start` on.
pub fn random_generic(start: u64, count: usize) -> Vec<(u64, TrigPolynomial, FramedDiagram)> {
    let tol = Tolerances::default();
    let mut out = Vec::with_capacity(count);
    let mut seed = start;
    while out.len() < count {
        let f = random_trig(seed, 6);
        if let Ok(d) = build_diagram(&f, &tol) {
            out.push((seed, f, d));
        }
        seed += 1;
    }
    out
}

/// Fixtures plus 120 random generic functions.
pub fn corpus() -> Vec<(String, TrigPolynomial, FramedDiagram)> {
    let tol = Tolerances::default();
    let mut out: Vec<_> = FIXTURES
        .iter()
        .map(|name| {
            let f = fixture(name);
            let d = build_diagram(&f, &tol).unwrap();
            (name.to_string(), f, d)
        })
        .collect();
    out.extend(random_generic(1000, 120).into_iter().map(|(s, f, d)| (format!("random {s}"), f, d)));
    out
}
