// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

use std::f64::consts::TAU;

use proptest::prelude::*;

use holoknot::circle_functions::{critical_points, genericity_margins, morse_perturb, random_trig, CriticalKind, Tolerances};
use holoknot::diagram::{build_diagram, find_double_points, spans_interleave, Branch, FramedDiagram, HalfPlane};
use holoknot::invariants::{pair_census, pair_count_n, split_invariants, whitney_by_degree, whitney_by_minima, whitney_formula};
use holoknot::knot::{identify, jones, mirror, to_crossing_code};
use holoknot::legendrian::{build_front, front_census, front_invariants, Variant};
use holoknot::trig::TrigPolynomial;

fn generic(seed: u64) -> Option<(TrigPolynomial, FramedDiagram)> {
    let f = random_trig(seed, 6);
    let d = build_diagram(&f, &Tolerances::default()).ok()?;
    Some((f, d))
}

fn coeffs(max_degree: usize) -> impl Strategy<Value = TrigPolynomial> {
    (1..=max_degree).prop_flat_map(|n| {
        (-1.0..1.0f64, prop::collection::vec(-1.0..1.0f64, n), prop::collection::vec(-1.0..1.0f64, n))
            .prop_map(|(c, a, b)| TrigPolynomial::new(c, a, b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn derivative_matches_central_differences(f in coeffs(8), t in 0.0..TAU) {
        let h = 1e-5;
        let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        let d1 = f.evaluate_jets(t, 1)[1];
        prop_assert!((fd - d1).abs() <= 1e-6 * d1.abs().max(1.0), "{fd} vs {d1}");
    }

    #[test]
    fn critical_points_alternate(f in coeffs(6)) {
        if let Ok(p) = critical_points(&f, &Tolerances::default()) {
            let n = p.points.len();
            prop_assert!(n >= 2 && n % 2 == 0);
            for k in 0..n {
                prop_assert_ne!(p.points[k].kind, p.points[(k + 1) % n].kind);
            }
            prop_assert_eq!(p.minima().count(), p.maxima().count());
            prop_assert_eq!(p.minima_count, p.minima().count());
        }
    }

    #[test]
    fn morse_perturb_clears_margins(k in 1usize..4, seed in any::<u64>()) {
        // cos kt has k equal minima: never generic for k > 1
        let f = TrigPolynomial::harmonic(k, 1.0, 0.0);
        let tol = Tolerances::default();
        let g = morse_perturb(&f, 1e-3, seed, &tol).unwrap();
        let margins = genericity_margins(&g, tol.grid_for(&g));
        prop_assert!(margins.all_positive(0.0), "{margins:?}");
    }

    #[test]
    fn diagram_shape_sign_and_parity(seed in any::<u64>()) {
        let Some((_, d)) = generic(seed) else { return Ok(()) };
        prop_assert_eq!(d.arcs.len(), 2 * d.m);
        for c in &d.crossings {
            prop_assert_eq!(c.arc_a.half_plane, c.arc_b.half_plane);
            let expected = if c.half_plane() == HalfPlane::Upper { -1 } else { 1 };
            prop_assert_eq!(c.sign, expected);
            prop_assert_eq!(c.double_point.point[1] > 0.0, c.half_plane() == HalfPlane::Upper);
        }
        for e in pair_census(&d).unwrap() {
            let odd = e.crossing_count % 2 == 1;
            prop_assert_eq!(odd, spans_interleave(d.arc(e.a).span(), d.arc(e.b).span()));
        }
    }

    #[test]
    fn double_points_stable_under_grid_doubling(seed in any::<u64>()) {
        let Some((f, _)) = generic(seed) else { return Ok(()) };
        let tol = Tolerances::default();
        let key = |g: usize| {
            let mut v: Vec<(f64, f64)> = find_double_points(&f, g, &tol).unwrap().iter().map(|p| (p.t1.min(p.t2), p.t1.max(p.t2))).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v
        };
        let (a, b) = (key(2048), key(4096));
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p.0 - q.0).abs() < 1e-6 && (p.1 - q.1).abs() < 1e-6);
        }
    }

    #[test]
    fn over_branch_flips_with_the_second_derivative_gap(seed in any::<u64>()) {
        let Some((f, d)) = generic(seed) else { return Ok(()) };
        let Ok(e) = build_diagram(&f.scale(-1.0), &Tolerances::default()) else { return Ok(()) };
        prop_assert_eq!(d.crossings.len(), e.crossings.len());
        let over = |t_a: f64, t_b: f64, b: Branch| if b == Branch::A { t_a } else { t_b };
        let same = |x: f64, y: f64| ((x - y).rem_euclid(TAU)).min((y - x).rem_euclid(TAU)) < 1e-8;
        for c in &d.crossings {
            let twin = e.crossings.iter().find(|z| (same(z.t_a, c.t_a) && same(z.t_b, c.t_b)) || (same(z.t_a, c.t_b) && same(z.t_b, c.t_a)));
            prop_assert!(twin.is_some());
            let z = twin.unwrap();
            prop_assert!(!same(over(c.t_a, c.t_b, c.over_branch), over(z.t_a, z.t_b, z.over_branch)));
        }
    }

    #[test]
    fn whitney_three_ways(seed in any::<u64>()) {
        let Some((f, d)) = generic(seed) else { return Ok(()) };
        let tol = Tolerances::default();
        let w = whitney_by_degree(&f, &tol).unwrap();
        prop_assert_eq!(w, whitney_by_minima(&d));
        prop_assert_eq!(w, whitney_formula(&d, &f, &tol).unwrap().w);
        prop_assert!(w < 0);
    }

    #[test]
    fn split_invariant_laws(seed in any::<u64>()) {
        let Some((_, d)) = generic(seed) else { return Ok(()) };
        let inv = split_invariants(&d).unwrap();
        prop_assert_eq!(inv.split_sum(), inv.s);
        prop_assert_eq!((inv.w + inv.s).rem_euclid(2), 1);
        if d.m == 1 {
            prop_assert!(d.crossings.is_empty());
            prop_assert_eq!(inv.s, 0);
        }
        for e in pair_census(&d).unwrap() {
            let (a, b) = (d.arc(e.a), d.arc(e.b));
            prop_assert_eq!(pair_count_n(a, b, &d).unwrap(), pair_count_n(b, a, &d).unwrap());
            if e.delta == 1 {
                prop_assert_eq!(e.crossing_count % 2, 0);
            }
        }
    }

    #[test]
    fn legendrian_identities(seed in any::<u64>()) {
        let Some((_, d)) = generic(seed) else { return Ok(()) };
        let inv = split_invariants(&d).unwrap();
        let (hp, hm, w) = (inv.h_plus as i64, inv.h_minus as i64, inv.w);
        for v in [Variant::Plus, Variant::Minus] {
            let closed = front_census(&d, v);
            prop_assert_eq!(build_front(&d, v).unwrap().census(), closed);
            let (wxy, sxy) = front_invariants(&closed).unwrap();
            match v {
                Variant::Plus => prop_assert_eq!((wxy, sxy), (hm, hp - 2 * hm + w)),
                Variant::Minus => prop_assert_eq!((wxy, sxy), (hp, hm - 2 * hp + w)),
            }
        }
    }

    #[test]
    fn jones_of_mirror_inverts_variable(seed in any::<u64>()) {
        let Some((_, d)) = generic(seed) else { return Ok(()) };
        let code = to_crossing_code(&d);
        prop_assume!(code.len() <= 10);
        let j = jones(&code).unwrap();
        prop_assert_eq!(jones(&mirror(&code)).unwrap(), j.invert_variable());
        prop_assert_eq!(identify(&code).unwrap(), identify(&code).unwrap());
    }
}

#[test]
fn minima_kind_starts_each_arc_pair() {
    let f = TrigPolynomial::new(0.0, vec![0.0, 0.4], vec![1.0, 0.3]);
    let p = critical_points(&f, &Tolerances::default()).unwrap();
    assert_eq!(p.points[p.global_min_index()].kind, CriticalKind::Min);
}
