// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Whitney index, self-linking number and the split invariants `S_k`.
//!
//! The Whitney index is computed three independent ways: as the winding of
//! the tangent `(f', f'')`, as minus the number of minima, and through the
//! Whitney formula on the diagram. The split invariants refine
//! `S = H_- - H_+` by the cyclic index distance between arcs:
//!
//! `S_k = Σ_{d(Y_i,Y_j)=k} N(Y_i,Y_j) - Σ_{d(X_i,X_j)=k} N(X_i,X_j)`
//!
//! summed over unordered pairs, with `N = |A_i ∩ A_j| + δ(A_i, A_j)` and
//! `δ = 1` exactly when the x0-spans of the two arcs are disjoint.
//!
//! The distance is read off the indices. The midpoint of `X_i` followed
//! forward along the circle to the midpoint of `X_j` passes the midpoints of
//! `Y_i, ..., Y_{j-1}`, i.e. `(j - i) mod m` of them.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::circle_functions::{golden_min, grid_points, Tolerances};
use crate::diagram::{Arc, ArcId, FramedDiagram, HalfPlane};
use crate::error::{Error, Result};
use crate::trig::CircleFunction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitInvariants {
    pub m: usize,
    #[serde(rename = "W")]
    pub w: i64,
    #[serde(rename = "S")]
    pub s: i64,
    #[serde(rename = "H_plus")]
    pub h_plus: usize,
    #[serde(rename = "H_minus")]
    pub h_minus: usize,
    #[serde(rename = "S_k")]
    pub s_k: Vec<i64>,
}

impl SplitInvariants {
    pub fn split_sum(&self) -> i64 {
        self.s_k.iter().sum()
    }
}

/// Winding of `a(t)` about the origin over one period, refining any grid
/// step whose angle increment exceeds π/4.
fn winding<A: Fn(f64) -> (f64, f64)>(a: A, grid: usize, floor: f64) -> Result<i64> {
    fn step<A: Fn(f64) -> (f64, f64)>(a: &A, t0: f64, v0: (f64, f64), t1: f64, v1: (f64, f64), depth: u32, floor: f64) -> Result<f64> {
        let d = (v0.0 * v1.1 - v0.1 * v1.0).atan2(v0.0 * v1.0 + v0.1 * v1.1);
        if d.abs() <= std::f64::consts::FRAC_PI_4 || depth == 0 {
            if depth == 0 && d.abs() > std::f64::consts::FRAC_PI_2 {
                return Err(Error::ImmersionMarginTooSmall { margin: v0.0.hypot(v0.1).min(v1.0.hypot(v1.1)) });
            }
            return Ok(d);
        }
        let tm = 0.5 * (t0 + t1);
        let vm = a(tm);
        if vm.0.hypot(vm.1) < floor {
            return Err(Error::ImmersionMarginTooSmall { margin: vm.0.hypot(vm.1) });
        }
        Ok(step(a, t0, v0, tm, vm, depth - 1, floor)? + step(a, tm, vm, t1, v1, depth - 1, floor)?)
    }
    let ts: Vec<f64> = grid_points(grid).chain(std::iter::once(TAU)).collect();
    let vs: Vec<(f64, f64)> = ts.iter().map(|&t| a(t)).collect();
    if let Some(v) = vs.iter().find(|v| v.0.hypot(v.1) < floor) {
        return Err(Error::ImmersionMarginTooSmall { margin: v.0.hypot(v.1) });
    }
    let mut total = 0.0;
    for k in 0..grid {
        total += step(&a, ts[k], vs[k], ts[k + 1], vs[k + 1], 40, floor)?;
    }
    Ok((total / TAU).round() as i64)
}

/// Tangential degree of `c`: the winding number of `(f', f'')`.
pub fn whitney_by_degree<F: CircleFunction + ?Sized>(f: &F, tol: &Tolerances) -> Result<i64> {
    winding(
        |t| {
            let j = f.jets(t);
            (j.d1, j.d2)
        },
        tol.grid_for(f),
        tol.margin,
    )
}

/// Every minimum of `f` contributes `-1` to the tangential degree.
pub fn whitney_by_minima(d: &FramedDiagram) -> i64 {
    -(d.m as i64)
}

/// Details of the Whitney-formula evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyFormula {
    /// Parameter of the base point `q` (global minimum of `x1`).
    pub t_q: f64,
    pub mu: i64,
    pub epsilons: Vec<i64>,
    pub w: i64,
}

/// `W = -Σ ε_p + μ(q)` with `q` the lowest point of `c`.
pub fn whitney_formula<F: CircleFunction + ?Sized>(d: &FramedDiagram, f: &F, tol: &Tolerances) -> Result<WhitneyFormula> {
    let grid = tol.grid_for(f);
    let h = TAU / grid as f64;
    let x1: Vec<f64> = grid_points(grid).map(|t| f.jets(t).d1).collect();
    let mut locals: Vec<(f64, f64)> = (0..grid)
        .filter(|&i| x1[i] <= x1[(i + grid - 1) % grid] && x1[i] <= x1[(i + 1) % grid])
        .map(|i| golden_min(|t| f.jets(t).d1, h * (i as f64 - 1.0), h * (i as f64 + 1.0), 80))
        .collect();
    locals.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (t_q, low) = locals[0];
    let scale = f.derivative_bounds()[1].max(1.0);
    if locals.len() > 1 {
        // a second distinct local minimum at the same height
        let other = locals[1..].iter().find(|(t, _)| {
            let dt = (t - t_q).rem_euclid(TAU);
            dt.min(TAU - dt) > 1e-6
        });
        if let Some(&(_, v)) = other {
            if (v - low).abs() < 1e-9 * scale {
                return Err(Error::AmbiguousBasePoint);
            }
        }
    }
    let q = f.jets(t_q);
    let eta = 1e-7 * scale;
    let mu = winding(
        |t| {
            let j = f.jets(t);
            (j.f - q.f, j.d1 - (q.d1 + eta))
        },
        grid,
        eta * 1e-3,
    )?;
    let epsilons: Vec<i64> = d
        .crossings
        .iter()
        .map(|c| {
            let (ua, ub) = ((c.t_a - t_q).rem_euclid(TAU), (c.t_b - t_q).rem_euclid(TAU));
            let (first, second) = if ua < ub { (c.t_a, c.t_b) } else { (c.t_b, c.t_a) };
            let (j1, j2) = (f.jets(first), f.jets(second));
            let det = j1.d1 * j2.d2 - j1.d2 * j2.d1;
            if det > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let w = -epsilons.iter().sum::<i64>() + mu;
    Ok(WhitneyFormula { t_q, mu, epsilons, w })
}

/// `S = H_- - H_+`.
pub fn self_linking(d: &FramedDiagram) -> i64 {
    d.h_minus() as i64 - d.h_plus() as i64
}

/// `S` as the sum of the recorded crossing signs.
pub fn self_linking_by_signs(d: &FramedDiagram) -> i64 {
    d.crossings.iter().map(|c| c.sign as i64).sum()
}

/// Cyclic distance between arcs `i` and `j` (0-based) of one family.
pub fn cyclic_distance(i: usize, j: usize, m: usize) -> Result<usize> {
    if i == j {
        return Err(Error::SameArc);
    }
    let fwd = (j + m - i % m) % m;
    let bwd = (i + m - j % m) % m;
    Ok(fwd.min(bwd))
}

/// 1 when the closed x0-spans of the two arcs are disjoint.
pub fn delta(a: &Arc, b: &Arc) -> Result<u8> {
    if a.id.half_plane != b.id.half_plane {
        return Err(Error::MixedHalfPlanes);
    }
    if a.id == b.id {
        return Err(Error::SameArc);
    }
    for u in [a.start_value, a.end_value] {
        for v in [b.start_value, b.end_value] {
            if u == v {
                return Err(Error::ValueCollision { a: u, b: v });
            }
        }
    }
    Ok(spans_disjoint(a.span(), b.span()) as u8)
}

pub fn spans_disjoint(a: (f64, f64), b: (f64, f64)) -> bool {
    a.1 < b.0 || b.1 < a.0
}

/// `N(a, b) = |a ∩ b| + δ(a, b)`.
pub fn pair_count_n(a: &Arc, b: &Arc, d: &FramedDiagram) -> Result<usize> {
    Ok(d.crossing_count(a.id, b.id) + delta(a, b)? as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub a: ArcId,
    pub b: ArcId,
    pub crossing_count: usize,
    pub delta: u8,
    pub distance: usize,
}

/// Every unordered same-family arc pair with its crossing count, δ and distance.
pub fn pair_census(d: &FramedDiagram) -> Result<Vec<PairEntry>> {
    let mut out = Vec::new();
    for hp in [HalfPlane::Upper, HalfPlane::Lower] {
        for i in 0..d.m {
            for j in (i + 1)..d.m {
                let (a, b) = (ArcId { half_plane: hp, index: i }, ArcId { half_plane: hp, index: j });
                let (arc_a, arc_b) = (d.arc(a), d.arc(b));
                out.push(PairEntry {
                    a,
                    b,
                    crossing_count: d.crossing_count(a, b),
                    delta: delta(arc_a, arc_b)?,
                    distance: cyclic_distance(i, j, d.m)?,
                });
            }
        }
    }
    Ok(out)
}

pub fn split_invariants(d: &FramedDiagram) -> Result<SplitInvariants> {
    let n = d.m / 2;
    let mut s_k = vec![0i64; n];
    for e in pair_census(d)? {
        let count = (e.crossing_count + e.delta as usize) as i64;
        let k = e.distance;
        debug_assert!(k >= 1 && k <= n);
        match e.a.half_plane {
            HalfPlane::Lower => s_k[k - 1] += count,
            HalfPlane::Upper => s_k[k - 1] -= count,
        }
    }
    Ok(SplitInvariants {
        m: d.m,
        w: whitney_by_minima(d),
        s: self_linking(d),
        h_plus: d.h_plus(),
        h_minus: d.h_minus(),
        s_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{build_diagram, Branch, Crossing, DoublePoint};
    use crate::trig::TrigPolynomial;

    #[test]
    fn distances() {
        assert_eq!(cyclic_distance(0, 1, 4).unwrap(), 1);
        assert_eq!(cyclic_distance(0, 2, 4).unwrap(), 2);
        assert_eq!(cyclic_distance(0, 3, 4).unwrap(), 1);
        assert_eq!(cyclic_distance(2, 2, 4), Err(Error::SameArc));
    }

    fn arc(id: ArcId, a: f64, b: f64) -> Arc {
        Arc { id, t_start: 0.0, t_end: 1.0, start_value: a, end_value: b, samples: vec![] }
    }

    #[test]
    fn delta_cases() {
        let x = |i, a, b| arc(ArcId::x(i), a, b);
        assert_eq!(delta(&x(0, 0.0, 1.0), &x(1, 2.0, 3.0)).unwrap(), 1);
        assert_eq!(delta(&x(0, 0.0, 2.0), &x(1, 1.0, 3.0)).unwrap(), 0);
        assert_eq!(delta(&x(0, 0.0, 3.0), &x(1, 1.0, 2.0)).unwrap(), 0);
        assert!(matches!(delta(&x(0, 0.0, 3.0), &x(1, 3.0, 4.0)), Err(Error::ValueCollision { .. })));
        let y = arc(ArcId::y(1), 3.0, 1.0);
        assert_eq!(delta(&x(0, 0.0, 1.0), &y), Err(Error::MixedHalfPlanes));
    }

    #[test]
    fn pair_count_examples() {
        let arcs = vec![
            arc(ArcId::x(0), 0.0, 1.0),
            arc(ArcId::y(0), 1.0, 0.5),
            arc(ArcId::x(1), 2.0, 3.0),
            arc(ArcId::y(1), 3.0, -1.0),
        ];
        let d = FramedDiagram { m: 2, arcs, crossings: vec![] };
        assert_eq!(pair_count_n(&d.arcs[0], &d.arcs[2], &d).unwrap(), 1);
        let dp = DoublePoint { t1: 0.0, t2: 1.0, point: [1.5, 1.0], half_plane: HalfPlane::Upper, x2_gap: 1.0, transversality: 1.0 };
        let c = Crossing { arc_a: ArcId::x(0), arc_b: ArcId::x(1), t_a: 0.0, t_b: 1.0, double_point: dp, sign: -1, over_branch: Branch::A };
        let arcs = vec![
            arc(ArcId::x(0), 0.0, 2.0),
            arc(ArcId::y(0), 2.0, 0.5),
            arc(ArcId::x(1), 0.5, 3.0),
            arc(ArcId::y(1), 3.0, -1.0),
        ];
        let d = FramedDiagram { m: 2, arcs, crossings: vec![c.clone(), c] };
        assert_eq!(pair_count_n(&d.arcs[0], &d.arcs[2], &d).unwrap(), 2);
        assert_eq!(pair_count_n(&d.arcs[2], &d.arcs[0], &d).unwrap(), 2);
    }

    #[test]
    fn sine_invariants() {
        let f = TrigPolynomial::new(0.0, vec![0.0], vec![1.0]);
        let tol = Tolerances::default();
        assert_eq!(whitney_by_degree(&f, &tol).unwrap(), -1);
        assert_eq!(whitney_by_degree(&f.scale(7.5), &tol).unwrap(), -1);
        let d = build_diagram(&f, &tol).unwrap();
        assert_eq!(whitney_by_minima(&d), -1);
        let wf = whitney_formula(&d, &f, &tol).unwrap();
        assert_eq!((wf.mu, wf.w), (-1, -1));
        let s = split_invariants(&d).unwrap();
        assert_eq!((s.w, s.s), (-1, 0));
        assert!(s.s_k.is_empty());
    }

    #[test]
    fn two_harmonic_whitney_three_ways() {
        let f = TrigPolynomial::new(0.0, vec![0.0, 0.3], vec![1.0, 0.5]);
        let tol = Tolerances::default();
        let d = build_diagram(&f, &tol).unwrap();
        assert_eq!(whitney_by_degree(&f, &tol).unwrap(), -2);
        assert_eq!(whitney_by_minima(&d), -2);
        assert_eq!(whitney_formula(&d, &f, &tol).unwrap().w, -2);
        assert_eq!(self_linking(&d), self_linking_by_signs(&d));
    }

    #[test]
    fn even_derivative_has_ambiguous_base_point() {
        let f = TrigPolynomial::new(0.0, vec![0.0, 0.0], vec![1.0, 0.6]);
        let tol = Tolerances::default();
        let d = build_diagram(&f, &tol).unwrap();
        assert_eq!(whitney_formula(&d, &f, &tol), Err(Error::AmbiguousBasePoint));
    }

    #[test]
    fn synthetic_census_split() {
        // lower: two crossings at distance 1; upper: two at distance 1, one at
        // distance 2; all spans overlapping
        let m = 4;
        let mut arcs = Vec::new();
        for i in 0..m {
            arcs.push(arc(ArcId::x(i), -(i as f64) - 1.0, 10.0 + i as f64));
            arcs.push(arc(ArcId::y(i), 10.0 + i as f64, -(i as f64) - 1.5));
        }
        let dp = DoublePoint { t1: 0.0, t2: 1.0, point: [0.0, 1.0], half_plane: HalfPlane::Upper, x2_gap: 1.0, transversality: 1.0 };
        let c = |a: ArcId, b: ArcId| Crossing {
            arc_a: a,
            arc_b: b,
            t_a: 0.0,
            t_b: 1.0,
            double_point: DoublePoint { half_plane: a.half_plane, ..dp },
            sign: a.half_plane.crossing_sign(),
            over_branch: Branch::A,
        };
        let crossings = vec![
            c(ArcId::y(0), ArcId::y(1)),
            c(ArcId::y(2), ArcId::y(3)),
            c(ArcId::x(0), ArcId::x(1)),
            c(ArcId::x(1), ArcId::x(2)),
            c(ArcId::x(0), ArcId::x(2)),
        ];
        let d = FramedDiagram { m, arcs, crossings };
        let s = split_invariants(&d).unwrap();
        assert_eq!(s.s_k, vec![0, -1]);
        assert_eq!(s.s, -1);
        assert_eq!(s.split_sum(), s.s);
    }
}
