// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Deforming a diagram into a closed braid: every maximum value above every
//! minimum value.

use serde::{Deserialize, Serialize};

use super::{detect_events, FunctionPath, Segment, LOCALIZATION};
use crate::circle_functions::{critical_points, CriticalKind, CriticalPoint, MorseProfile, Tolerances};
use crate::diagram::build_diagram;
use crate::error::{Error, Result};
use crate::invariants::{pair_census, split_invariants, SplitInvariants};
use crate::trig::TrigPolynomial;

/// True when every local maximum value exceeds every local minimum value.
pub fn is_braid_normalized(profile: &MorseProfile) -> bool {
    let top_min = profile.minima().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max);
    let low_max = profile.maxima().map(|c| c.value).fold(f64::INFINITY, f64::min);
    low_max > top_min
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
}

/// Where the weight rises on each side of the moving critical point, as
/// fractions of the side measured from the outer critical point.
#[derive(Clone, Copy, Debug)]
struct Ramp {
    start: f64,
    width: f64,
    kappa: f64,
}

/// The first ramp is the default; the rest are retried in order.
fn ramps() -> Vec<Ramp> {
    let mut out = vec![Ramp { start: 0.15, width: 0.5, kappa: 1.0 }];
    for kappa in [1.0, 2.0, 0.4] {
        for width in [0.15, 0.3, 0.5] {
            for start in [0.05, 0.25, 0.45, 0.65, 0.8] {
                if start + width <= 0.95 && (start, width, kappa) != (0.15, 0.5, 1.0) {
                    out.push(Ramp { start, width, kappa });
                }
            }
        }
    }
    out
}

/// Weight `u >= 0` on `[a, c]` around the critical point `b`, vanishing near
/// `a` and `c` and equal to one near `b`.
fn plateau(t: f64, a: f64, b: f64, c: f64, r: Ramp) -> f64 {
    if t <= b {
        smoothstep(((t - a) / (b - a) - r.start) / r.width)
    } else {
        smoothstep(((c - t) / (c - b) - r.start) / r.width)
    }
}

/// Bump supported in the middle of `[a, c]`.
fn bump(t: f64, a: f64, c: f64) -> f64 {
    let x = (t - a) / (c - a);
    if x <= 0.2 || x >= 0.8 {
        0.0
    } else {
        let y = (x - 0.2) / 0.6;
        (std::f64::consts::PI * y).sin().powi(4)
    }
}

fn integrate<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, n: usize) -> f64 {
    // Simpson
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for k in 1..n {
        s += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Increment `g` moving the value at `b` by `shift` while the values at all
/// other critical points stay put. `g' = f' u` with `u > -1`, so the critical
/// set of `f + s g` does not move for `s` in `[0, 1]`. None if the weight
/// would get too close to `-1`.
fn value_shift(f: &TrigPolynomial, a: f64, b: f64, c: f64, shift: f64, degree: usize, ramp: Ramp) -> Option<TrigPolynomial> {
    let d1 = |t: f64| f.evaluate_jets(t, 1)[1];
    let n = 2000;
    let left = integrate(|t| d1(t) * plateau(t, a, b, c, ramp), a, b, n);
    let right = -integrate(|t| d1(t) * plateau(t, a, b, c, ramp), b, c, n);
    let left_bump = integrate(|t| d1(t) * bump(t, a, b), a, b, n);
    let right_bump = -integrate(|t| d1(t) * bump(t, b, c), b, c, n);
    // the plateau carries `kappa` times what the weaker side needs; a bump in
    // the middle of each side makes up the rest, pulling the arc towards the
    // axis when negative
    let k = ramp.kappa * shift / (left.abs().max(right.abs()) * left.signum());
    let alpha = (shift - k * left) / left_bump;
    let beta = (shift - k * right) / right_bump;
    let u = |t: f64| {
        let t = a + (t - a).rem_euclid(std::f64::consts::TAU);
        if t >= c {
            return 0.0;
        }
        let extra = if t <= b { alpha * bump(t, a, b) } else { beta * bump(t, b, c) };
        k * plateau(t, a, b, c, ramp) + extra
    };
    let lowest = (0..=n).map(|j| u(a + (c - a) * j as f64 / n as f64)).fold(f64::INFINITY, f64::min);
    if lowest <= -0.9 {
        return None;
    }
    Some(tabulate(f, a, u, degree))
}

/// The increment with `g' = f' u` and `g(a) = 0`, for `u` given on
/// `[a, a + 2π)`.
fn tabulate(f: &TrigPolynomial, a: f64, u: impl Fn(f64) -> f64, degree: usize) -> TrigPolynomial {
    let samples = 4096;
    let h = std::f64::consts::TAU / samples as f64;
    let g_prime = |t: f64| f.evaluate_jets(t, 1)[1] * u(t);
    let mut values = Vec::with_capacity(samples);
    let mut acc = 0.0;
    for j in 0..samples {
        values.push(acc);
        let t = a + j as f64 * h;
        acc += h / 6.0 * (g_prime(t) + 4.0 * g_prime(t + 0.5 * h) + g_prime(t + h));
    }
    TrigPolynomial::from_samples(&values, degree, false).shifted(-a)
}

/// Window on `[a, b]` vanishing at both ends and flat in the middle.
fn window(t: f64, a: f64, b: f64) -> f64 {
    let x = (t - a) / (b - a);
    smoothstep(x / 0.25) * smoothstep((1.0 - x) / 0.25)
}

/// Increment translating the stretch `[b0, b1]` of `f` by `shift`: zero
/// outside `(a, c)`, constant on `[b0, b1]`, and stretching or shrinking the
/// two arcs `[a, b0]` and `[b1, c]` in between. None if an arc would shrink
/// too far.
fn block_shift(f: &TrigPolynomial, [a, b0, b1, c]: [f64; 4], shift: f64, degree: usize) -> Option<TrigPolynomial> {
    let d1 = |t: f64| f.evaluate_jets(t, 1)[1];
    let n = 2000;
    let alpha = shift / integrate(|t| d1(t) * window(t, a, b0), a, b0, n);
    let beta = -shift / integrate(|t| d1(t) * window(t, b1, c), b1, c, n);
    if alpha.min(beta) <= -0.9 {
        return None;
    }
    let u = |t: f64| {
        if t < b0 {
            alpha * window(t, a, b0)
        } else if t > b1 && t < c {
            beta * window(t, b1, c)
        } else {
            0.0
        }
    };
    Some(tabulate(f, a, u, degree))
}

/// One candidate step.
#[derive(Clone)]
enum Swap {
    /// Critical points moved by the given shifts, each with its own ramped
    /// weight. Indices are pairwise non-adjacent so the increments have
    /// disjoint support.
    Points(Vec<(usize, f64)>),
    /// The `len` consecutive critical points from `first` translated
    /// together by `shift`, keeping the arcs between them rigid.
    Block { first: usize, len: usize, shift: f64 },
}

/// True if moving the critical points `block` by `shift` creates no new
/// inversion: no maximum goes down past a minimum and no minimum goes up
/// past a maximum. Passes between points of one kind are Ω2+ moves.
fn creates_no_inversion(pts: &[CriticalPoint], block: &[usize], shift: f64) -> bool {
    block.iter().all(|&p| {
        let (from, to) = (pts[p].value, pts[p].value + shift);
        let (lo, hi) = (from.min(to), from.max(to));
        let forbidden = match (pts[p].kind, shift > 0.0) {
            (CriticalKind::Min, true) => CriticalKind::Max,
            (CriticalKind::Max, false) => CriticalKind::Min,
            _ => return true,
        };
        !pts.iter().enumerate().any(|(q, c)| !block.contains(&q) && c.value > lo && c.value < hi && c.kind == forbidden)
    })
}

/// Each maximum just below a minimum in the value order, lowest first, and
/// ways of undoing it: raise the maximum or lower the minimum, overshooting
/// by a fraction of the gap to the next value, alone or together with
/// neighbouring critical points. Small overshoots deform the arcs least.
fn inversions(profile: &MorseProfile) -> (Vec<Swap>, Vec<Swap>) {
    let pts = &profile.points;
    let n = pts.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].value.total_cmp(&pts[b].value));
    let mut single = Vec::new();
    let mut blocks = Vec::new();
    for r in 0..n.saturating_sub(1) {
        let (lo, hi) = (order[r], order[r + 1]);
        if pts[lo].kind != CriticalKind::Max || pts[hi].kind != CriticalKind::Min {
            continue;
        }
        let (vl, vh) = (pts[lo].value, pts[hi].value);
        let above = order.get(r + 2).map(|&k| pts[k].value).unwrap_or(vh + 2.0);
        let below = r.checked_sub(1).map(|q| pts[order[q]].value).unwrap_or(vl - 2.0);
        for frac in [0.25, 0.05, 0.6, 0.9] {
            single.push(Swap::Points(vec![(lo, vh + frac * (above - vh) - vl)]));
            single.push(Swap::Points(vec![(hi, vl - frac * (vl - below) - vh)]));
        }
        // both ends move and meet in the gap, each sweeping part of it
        if (lo + 1) % n != hi && (hi + 1) % n != lo {
            for lambda in [0.5, 0.25, 0.75] {
                let meet = vl + lambda * (vh - vl);
                let o = 0.3 * (above - meet).min(meet - below);
                single.push(Swap::Points(vec![(lo, meet + o - vl), (hi, meet - o - vh)]));
            }
        }
        for (mover, other, shifts) in [
            (lo, hi, [0.05, 0.25, 0.5, 0.8].map(|frac| vh + frac * (above - vh) - vl)),
            (hi, lo, [0.05, 0.25, 0.5, 0.8].map(|frac| vl - frac * (vl - below) - vh)),
        ] {
            for left in 0..=2 {
                for right in 0..=2 {
                    let len = left + 1 + right;
                    if len == 1 || len + 2 > n {
                        continue;
                    }
                    let first = (mover + n - left) % n;
                    let block: Vec<usize> = (0..len).map(|j| (first + j) % n).collect();
                    if block.contains(&other) {
                        continue;
                    }
                    for shift in shifts {
                        if creates_no_inversion(pts, &block, shift) {
                            blocks.push(Swap::Block { first, len, shift });
                        }
                    }
                }
            }
        }
    }
    (single, blocks)
}

/// Parameters `[a, b0, b1, c]` of the critical points before `index`, at
/// `index`, at the last of the `len` points from `index`, and after it,
/// unwrapped so that they increase.
fn neighbours(profile: &MorseProfile, index: usize, len: usize) -> [f64; 4] {
    let n = profile.points.len();
    let t = |k: usize| profile.points[k % n].t;
    let b0 = t(index);
    let unwrap_after = |x: f64, from: f64| if x <= from { x + std::f64::consts::TAU } else { x };
    let mut a = t(index + n - 1);
    if a >= b0 {
        a -= std::f64::consts::TAU;
    }
    let b1 = unwrap_after(t(index + len - 1), b0);
    let b1 = if len == 1 { b0 } else { b1 };
    let c = unwrap_after(t(index + len), b1);
    [a, b0, b1, c]
}

/// Straight path moving the value of critical point `index` (in the order
/// of [`critical_points`]) by `shift`, all other critical values and every
/// critical parameter fixed.
pub fn value_slide(f: &TrigPolynomial, index: usize, shift: f64, degree: usize, tol: &Tolerances) -> Result<FunctionPath> {
    step_path(f, &Swap::Points(vec![(index, shift)]), degree, ramps()[0], tol)
}

fn step_path(f: &TrigPolynomial, swap: &Swap, degree: usize, ramp: Ramp, tol: &Tolerances) -> Result<FunctionPath> {
    let profile = critical_points(f, tol)?;
    let n = profile.points.len();
    let degree = degree.max(f.degree());
    let folds = || Error::NormalizationFailed("weight would fold the curve".into());
    let mut end = f.padded(degree);
    match swap {
        Swap::Points(moves) => {
            for &(index, shift) in moves {
                if index >= n {
                    return Err(Error::Precondition(format!("critical point {index} of {n}")));
                }
                let [a, b, _, c] = neighbours(&profile, index, 1);
                end = end.add(&value_shift(f, a, b, c, shift, degree, ramp).ok_or_else(folds)?);
            }
        }
        &Swap::Block { first, len, shift } => {
            if first >= n || len + 2 > n {
                return Err(Error::Precondition(format!("block of {len} from {first} among {n}")));
            }
            end = end.add(&block_shift(f, neighbours(&profile, first, len), shift, degree).ok_or_else(folds)?);
        }
    }
    Ok(FunctionPath::through(&[f.padded(degree), end], 48))
}

fn try_swap(f: &TrigPolynomial, swap: &Swap, degree: usize, ramp: Ramp, tol: &Tolerances) -> Result<TrigPolynomial> {
    let path = step_path(f, swap, degree, ramp, tol)?;
    let end = path.end().expect("one segment");
    // an admissible step keeps every invariant; most bad steps show it at the ends
    let before = split_invariants(&build_diagram(f, tol)?)?;
    let after = split_invariants(&build_diagram(&end, tol)?)?;
    if (before.m, before.w, before.s, &before.s_k) != (after.m, after.w, after.s, &after.s_k) {
        return Err(Error::NormalizationFailed(format!("step changed (S, S_k) from ({}, {:?}) to ({}, {:?})", before.s, before.s_k, after.s, after.s_k)));
    }
    let events = detect_events(&path, LOCALIZATION, tol)?;
    if events.iter().all(|e| e.kind.is_framed()) && events.iter().any(|e| e.kind.is_omega2()) {
        Ok(end)
    } else {
        Err(Error::NormalizationFailed(format!("step produced {:?}", events.iter().map(|e| e.kind).collect::<Vec<_>>())))
    }
}

/// Candidate steps in the order tried: single moves with the default ramp,
/// block moves, then single moves with the other ramps.
fn candidates(profile: &MorseProfile, ramps: &[Ramp]) -> Vec<(Ramp, Swap)> {
    let (single, blocks) = inversions(profile);
    let mut out: Vec<(Ramp, Swap)> = single.iter().map(|s| (ramps[0], s.clone())).collect();
    out.extend(blocks.into_iter().map(|s| (ramps[0], s)));
    for &r in &ramps[1..] {
        out.extend(single.iter().map(|s| (r, s.clone())));
    }
    out
}

/// Deforms `f` through Ω2 and Ω3 moves only until it is a closed braid.
/// Returns the path (empty if `f` is already normalized) and its end.
pub fn braid_normalize(f: &TrigPolynomial, tol: &Tolerances) -> Result<(FunctionPath, TrigPolynomial)> {
    build_diagram(f, tol)?;
    let start = critical_points(f, tol)?;
    if is_braid_normalized(&start) {
        return Ok((FunctionPath { segments: Vec::<Segment>::new(), step: 48 }, f.clone()));
    }
    let degree = (2 * f.degree()).max(24);
    let ramps = ramps();
    // depth-first over steps: a state with no admissible step sends the
    // search back to try the next candidate one level up
    let mut points = vec![f.padded(degree)];
    let mut pending = vec![candidates(&start, &ramps)];
    let mut tried = vec![0usize];
    let mut last = None;
    for _ in 0..MAX_ATTEMPTS {
        let current = points.last().expect("start state");
        let (cands, k) = (pending.last().expect("one per state"), tried.last_mut().expect("one per state"));
        if cands.is_empty() {
            let path = if points.len() > 1 { FunctionPath::through(&points, 48) } else { FunctionPath { segments: Vec::<Segment>::new(), step: 48 } };
            let end = points.pop().expect("end state");
            return Ok((path, end));
        }
        if *k >= cands.len() || points.len() > MAX_STEPS {
            points.pop();
            pending.pop();
            tried.pop();
            if points.is_empty() {
                break;
            }
            continue;
        }
        let (ramp, swap) = &cands[*k];
        *k += 1;
        match try_swap(current, swap, degree, *ramp, tol) {
            Ok(next) => {
                pending.push(candidates(&critical_points(&next, tol)?, &ramps));
                tried.push(0);
                points.push(next);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NormalizationFailed("no admissible step".into())))
}

/// Steps tried, admissible or not, before giving up.
const MAX_ATTEMPTS: usize = 1200;
/// Longest path kept before backing off.
const MAX_STEPS: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraidCheck {
    pub before: SplitInvariants,
    pub after: SplitInvariants,
    /// `Σ S_k` on the normalized diagram.
    pub split_sum: i64,
    /// `H- - H+` on the normalized diagram.
    pub crossing_difference: i64,
    pub all_delta_zero: bool,
    pub steps: usize,
}

impl BraidCheck {
    pub fn passed(&self) -> bool {
        let same = |a: &SplitInvariants, b: &SplitInvariants| (a.m, a.w, a.s, &a.s_k) == (b.m, b.w, b.s, &b.s_k);
        self.all_delta_zero && self.split_sum == self.crossing_difference && same(&self.before, &self.after) && self.after.s == self.split_sum
    }
}

/// Normalizes `f` and compares the split invariants with the crossing
/// difference of the closed braid.
pub fn check_split_via_braid(f: &TrigPolynomial, tol: &Tolerances) -> Result<BraidCheck> {
    let before = split_invariants(&build_diagram(f, tol)?)?;
    let (path, g) = braid_normalize(f, tol)?;
    let d = build_diagram(&g, tol)?;
    let after = split_invariants(&d)?;
    let all_delta_zero = pair_census(&d)?.iter().all(|e| e.delta == 0);
    Ok(BraidCheck {
        split_sum: after.split_sum(),
        crossing_difference: d.h_minus() as i64 - d.h_plus() as i64,
        before,
        after,
        all_delta_zero,
        steps: path.segments.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Design;

    #[test]
    fn normalized_input_gives_empty_path() {
        let f = TrigPolynomial::new(0.0, vec![0.0], vec![1.0]);
        let (p, g) = braid_normalize(&f, &Tolerances::default()).unwrap();
        assert!(p.is_empty());
        assert_eq!(g, f);
    }

    #[test]
    fn nested_spans_get_normalized() {
        // the max at 5 sits below the min at 8
        let d = Design::from_extrema(&[0.0, 8.0, 1.0], &[10.0, 20.0, 5.0]).unwrap();
        let f = d.to_trig(32);
        let check = check_split_via_braid(&f, &Tolerances::default()).unwrap();
        assert!(check.passed(), "{check:?}");
        assert!(check.steps >= 1);
    }
}
