// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

mod common;

use holoknot::circle_functions::{critical_points, Tolerances};
use holoknot::diagram::build_diagram;
use holoknot::invariants::split_invariants;
use holoknot::isotopy::{braid_normalize, is_braid_normalized};
use holoknot::knot::{jones, to_crossing_code};

use common::{fixture, random_generic};

#[test]
fn normalization_keeps_knot_and_invariants() {
    let tol = Tolerances::default();
    let mut inputs: Vec<_> = ["trefoil", "figure_eight"].iter().map(|n| (n.to_string(), fixture(n))).collect();
    inputs.extend(random_generic(1000, 6).into_iter().map(|(seed, f, _)| (seed.to_string(), f)));
    let mut compared = Vec::new();
    for (name, f) in inputs {
        let d = build_diagram(&f, &tol).unwrap();
        let (_, g) = braid_normalize(&f, &tol).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(is_braid_normalized(&critical_points(&g, &tol).unwrap()), "{name}");
        let e = build_diagram(&g, &tol).unwrap();
        // a closed braid often has more crossings than the state sum takes
        if let (Ok(before), Ok(after)) = (jones(&to_crossing_code(&d)), jones(&to_crossing_code(&e))) {
            assert_eq!(before, after, "{name}");
            compared.push(name.clone());
        }
        let (a, b) = (split_invariants(&d).unwrap(), split_invariants(&e).unwrap());
        assert_eq!((a.w, a.s, &a.s_k), (b.w, b.s, &b.s_k), "{name}");
    }
    assert!(compared.len() >= 2, "Jones compared only on {compared:?}");
}
