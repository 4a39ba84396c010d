// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Constructions: witnesses for prescribed `(W, S)`, paths realizing single
//! moves, and the search for pairs told apart only by the split invariants.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{detect_events, isolate_event, value_slide, FunctionPath, IsotopyEvent, LOCALIZATION};
use crate::circle_functions::{critical_points, MorseProfile, Tolerances};
use crate::design::{Design, Wave};
use crate::diagram::build_diagram;
use crate::error::{Error, Result};
use crate::invariants::{split_invariants, SplitInvariants};
use crate::knot::{identify, to_crossing_code};
use crate::trig::{CircleFunction, TrigPolynomial};

/// Equal-length design with `m` minima and random values.
pub fn random_design<R: Rng>(rng: &mut R, m: usize) -> Design {
    loop {
        let minima: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..10.0)).collect();
        let maxima: Vec<f64> = (0..m)
            .map(|i| minima[i].max(minima[(i + 1) % m]) + rng.gen_range(0.3..10.0))
            .collect();
        if let Ok(d) = Design::from_extrema(&minima, &maxima) {
            return d;
        }
    }
}

/// Path between two designs that differ only in their values. The
/// projection is linear in the values, so the path stays the projection of
/// the interpolated design.
pub fn omega2_path(from: &Design, to: &Design, degree: usize) -> Result<FunctionPath> {
    if from.lengths() != to.lengths() || from.waves() != to.waves() {
        return Err(Error::Precondition("designs differ in more than their values".into()));
    }
    Ok(FunctionPath::through(&[from.to_trig(degree).padded(degree), to.to_trig(degree).padded(degree)], 64))
}

/// Grows a wave on one piece. Values and critical parameters stay fixed
/// along the path, so only crossings between arcs can change.
pub fn omega0_path(base: &Design, piece: usize, wave: Wave, degree: usize) -> Result<FunctionPath> {
    let mut waves = base.waves().to_vec();
    if piece >= waves.len() {
        return Err(Error::Precondition(format!("piece {piece} out of range")));
    }
    waves[piece] = wave;
    let target = Design::new(base.values().to_vec(), base.lengths().to_vec(), waves)?;
    Ok(FunctionPath::through(&[base.to_trig(degree).padded(degree), target.to_trig(degree).padded(degree)], 64))
}

/// Narrow dip of depth `depth` in `f'` centred at `t0`, as a trigonometric
/// polynomial of degree `3 * sharpness`. The dip has zero mean.
pub fn dip(t0: f64, depth: f64, sharpness: usize) -> TrigPolynomial {
    let k_max = 3 * sharpness;
    let w: Vec<f64> = (1..=k_max).map(|k| (-0.5 * (k as f64 / sharpness as f64).powi(2)).exp()).collect();
    let peak: f64 = 2.0 * w.iter().sum::<f64>();
    let mut cos = vec![0.0; k_max];
    let mut sin = vec![0.0; k_max];
    for (i, wk) in w.iter().enumerate() {
        let k = (i + 1) as f64;
        // -depth * 2 w_k cos(k (t - t0)) / peak, integrated
        let c = -depth * 2.0 * wk / peak / k;
        let (s0, c0) = (k * t0).sin_cos();
        // ∫ cos(k(t - t0)) = sin(k(t - t0)) / k
        cos[i] = -c * s0;
        sin[i] = c * c0;
    }
    TrigPolynomial::new(0.0, cos, sin)
}

/// `s ↦ f + s · dip`: a kink is born where the dip pushes `f'` through zero.
pub fn omega1_path(f: &TrigPolynomial, t0: f64, depth: f64, sharpness: usize) -> FunctionPath {
    let g = f.add(&dip(t0, depth, sharpness));
    let k = f.degree().max(g.degree());
    FunctionPath::through(&[f.padded(k), g.padded(k)], 64)
}

/// Move family for [`sample_move_path`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveFamily {
    Omega0,
    Omega1,
    /// Paths whose events are all `Ω2` or `Ω3`, at least one `Ω2`.
    Omega2,
}

/// Draws a seeded path realizing one move: a single `Ω0` or `Ω1` event, or
/// only `Ω2`/`Ω3` events. Gives up with `NotFound` after `attempts` draws.
pub fn sample_move_path(family: MoveFamily, seed: u64, attempts: usize, tol: &Tolerances) -> Result<(FunctionPath, Vec<IsotopyEvent>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let drawn = match family {
            MoveFamily::Omega0 => draw_omega0(&mut rng, tol),
            MoveFamily::Omega1 => draw_omega1(&mut rng, tol),
            MoveFamily::Omega2 => draw_omega2(&mut rng, tol),
        };
        if let Some(found) = drawn {
            return Ok(found);
        }
    }
    Err(Error::NotFound)
}

fn single(p: &FunctionPath, want: fn(&IsotopyEvent) -> bool, tol: &Tolerances) -> Option<(FunctionPath, Vec<IsotopyEvent>)> {
    let events = detect_events(p, LOCALIZATION, tol).ok()?;
    let i = events.iter().position(want)?;
    let q = isolate_event(p, &events, i, tol).ok()?;
    let ev = detect_events(&q, LOCALIZATION, tol).ok()?;
    Some((q, ev))
}

fn draw_omega1<R: Rng>(rng: &mut R, tol: &Tolerances) -> Option<(FunctionPath, Vec<IsotopyEvent>)> {
    let m = rng.gen_range(2..=4);
    let f = random_design(rng, m).to_trig(48);
    let prof = critical_points(&f, tol).ok()?;
    let n = prof.points.len();
    // just above a minimum, where f' is small
    let k = 2 * rng.gen_range(0..n / 2);
    let k = if prof.points[k].kind == crate::circle_functions::CriticalKind::Min { k } else { (k + 1) % n };
    let (a, mut b) = (prof.points[k].t, prof.points[(k + 1) % n].t);
    if b < a {
        b += TAU;
    }
    let t0 = a + rng.gen_range(0.08..0.2) * (b - a);
    let depth = 1.3 * f.jets(t0).d1;
    single(&omega1_path(&f, t0, depth, 16), |e| e.kind.is_omega1(), tol)
}

fn draw_omega0<R: Rng>(rng: &mut R, tol: &Tolerances) -> Option<(FunctionPath, Vec<IsotopyEvent>)> {
    let m = rng.gen_range(2..=4);
    let base = random_design(rng, m);
    let before = build_diagram(&base, tol).ok()?;
    let piece = rng.gen_range(0..2 * m);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let wave = Wave { amplitude: sign * rng.gen_range(0.5..0.9), frequency: rng.gen_range(1..=2) };
    let mut waves = base.waves().to_vec();
    waves[piece] = wave;
    let target = Design::new(base.values().to_vec(), base.lengths().to_vec(), waves).ok()?;
    let after = build_diagram(&target, tol).ok()?;
    // the design census must see a crossing pair appear or vanish
    let total = |d: &crate::diagram::FramedDiagram| d.h_plus() + d.h_minus();
    if total(&before).abs_diff(total(&after)) != 2 {
        return None;
    }
    let p = omega0_path(&base, piece, wave, 64).ok()?;
    single(&p, |e| e.kind.is_omega0(), tol)
}

const CURVATURE_RATIO: f64 = 2.5;

/// Slides of one critical value past exactly one non-adjacent value, as
/// `(index, passed index, shift)`.
fn slide_candidates<R: Rng>(prof: &MorseProfile, rng: &mut R) -> Vec<(usize, usize, f64)> {
    let pts = &prof.points;
    let n = pts.len();
    let mut out = Vec::new();
    for k in 0..n {
        let v = pts[k].value;
        for up in [true, false] {
            let mut ahead: Vec<usize> = (0..n).filter(|&j| if up { pts[j].value > v } else { pts[j].value < v }).collect();
            ahead.sort_by(|&p, &q| if up { pts[p].value.total_cmp(&pts[q].value) } else { pts[q].value.total_cmp(&pts[p].value) });
            let Some(&j) = ahead.first() else { continue };
            if j == (k + 1) % n || j == (k + n - 1) % n {
                continue;
            }
            let x = pts[j].value;
            let gap = ahead.get(1).map(|&i| (pts[i].value - x).abs()).unwrap_or(1.0);
            let target = x + if up { 1.0 } else { -1.0 } * rng.gen_range(0.1..0.3) * gap;
            out.push((k, j, target - v));
        }
    }
    out
}

fn draw_omega2<R: Rng>(rng: &mut R, tol: &Tolerances) -> Option<(FunctionPath, Vec<IsotopyEvent>)> {
    let m = rng.gen_range(3..=4);
    let f = random_design(rng, m).to_trig(16 * m);
    let prof = critical_points(&f, tol).ok()?;
    // min-max passes are transversal; same-kind passes are drawn less often
    let same = rng.gen_bool(0.25);
    let candidates: Vec<_> = slide_candidates(&prof, rng).into_iter().filter(|&(k, j, _)| (prof.points[k].kind == prof.points[j].kind) == same).collect();
    let (k, j, shift) = *candidates.get(rng.gen_range(0..candidates.len().max(1)))?;
    let p = value_slide(&f, k, shift, 2 * f.degree(), tol).ok()?;
    let (moving, passed) = (&prof.points[k], &prof.points[j]);
    if critical_points(&p.end()?, tol).ok()?.points.len() != prof.points.len() {
        return None;
    }
    if passed.kind == moving.kind {
        // f'' at the moving extremum is affine along the slide; extrema of
        // one kind meeting with similar curvature cluster Ω0 events around
        // the Ω2
        let s_meet = (passed.value - moving.value) / shift;
        let end = p.end()?.evaluate_jets(moving.t, 2)[2];
        let here = ((1.0 - s_meet) * moving.second_deriv + s_meet * end).abs();
        let there = passed.second_deriv.abs();
        if here.max(there) / here.min(there) < CURVATURE_RATIO {
            return None;
        }
    }
    let events = detect_events(&p, LOCALIZATION, tol).ok()?;
    if events.iter().all(|e| e.kind.is_framed()) && events.iter().any(|e| e.kind.is_omega2()) {
        Some((p, events))
    } else {
        None
    }
}

fn census(design: &Design, tol: &Tolerances) -> Option<(usize, usize)> {
    let d = build_diagram(design, tol).ok()?;
    Some((d.h_plus(), d.h_minus()))
}

fn projection_degree(design: &Design) -> usize {
    design.default_degree().clamp(32, 192)
}

fn mutate<R: Rng>(rng: &mut R, d: &Design, waves_allowed: bool) -> Option<Design> {
    let mut values = d.values().to_vec();
    let mut lengths = d.lengths().to_vec();
    let mut waves = d.waves().to_vec();
    let n = values.len();
    let k = rng.gen_range(0..n);
    let op = if waves_allowed { rng.gen_range(0..4) } else { rng.gen_range(0..2) };
    match op {
        0 | 1 => {
            let (prev, next) = (values[(k + n - 1) % n], values[(k + 1) % n]);
            values[k] = if k % 2 == 0 {
                prev.min(next) - rng.gen_range(0.2..8.0)
            } else {
                prev.max(next) + rng.gen_range(0.2..8.0)
            };
        }
        2 => {
            let mean = TAU / n as f64;
            lengths[k] = (lengths[k] * rng.gen_range(0.7..1.4)).clamp(0.6 * mean, 1.6 * mean);
        }
        _ => {
            waves[k] = if rng.gen_bool(0.2) {
                Wave::default()
            } else {
                Wave { amplitude: rng.gen_range(-0.85..0.85), frequency: rng.gen_range(1..=2) }
            };
        }
    }
    Design::new(values, lengths, waves).ok()
}

/// Builds a generic function with `W = w` and `S = s`.
///
/// A hill climb over designs with `-w` minima targets `H- - H+ = s` using the
/// census of the design itself; candidates are then projected and accepted
/// only when the extracted diagram of the projection has the target values.
pub fn generate_range(w: i64, s: i64, seed: u64) -> Result<TrigPolynomial> {
    if w > -2 || (w + s).rem_euclid(2) != 1 {
        return Err(Error::Precondition(format!("need W <= -2 and W + S odd, got ({w}, {s})")));
    }
    let m = (-w) as usize;
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((w as u64) << 32) ^ (s as u64).wrapping_mul(0x9e37_79b9));
    let score = |c: (usize, usize)| (c.1 as i64 - c.0 as i64 - s).abs() * 4 + (c.0 + c.1) as i64 / 8;
    for _restart in 0..8 {
        let mut current = random_design(&mut rng, m);
        let Some(c) = census(&current, &tol) else { continue };
        let mut best = score(c);
        for _ in 0..3000 {
            if best < 4 {
                let f = current.to_trig(projection_degree(&current));
                if let Ok(inv) = verify(&f, &tol) {
                    if inv.w == w && inv.s == s {
                        return Ok(f);
                    }
                }
            }
            let Some(next) = mutate(&mut rng, &current, s.abs() as usize + 1 > m) else { continue };
            let Some(c) = census(&next, &tol) else { continue };
            let sc = score(c);
            if sc <= best || rng.gen_bool(0.02) {
                best = sc;
                current = next;
            }
        }
    }
    Err(Error::GenerationFailed { w, s })
}

fn verify(f: &TrigPolynomial, tol: &Tolerances) -> Result<SplitInvariants> {
    split_invariants(&build_diagram(f, tol)?)
}

/// Two functions with the same knot class, `W` and `S`, but different split
/// invariants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub knot: String,
    pub seed: u64,
    pub first: TrigPolynomial,
    pub second: TrigPolynomial,
    pub first_invariants: SplitInvariants,
    pub second_invariants: SplitInvariants,
}

impl PairCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

struct Classified {
    invariants: SplitInvariants,
    knot: String,
}

fn classify_function<F: CircleFunction + ?Sized>(f: &F, tol: &Tolerances) -> Option<Classified> {
    let d = build_diagram(f, tol).ok()?;
    let invariants = split_invariants(&d).ok()?;
    let id = identify(&to_crossing_code(&d)).ok()??;
    Some(Classified { invariants, knot: id.name })
}

/// Samples equal-length designs with `-w` minima and `S = s` until two of
/// the same knot class differ in their split invariants. `knot` restricts
/// the class.
pub fn search_distinguishing_pair(w: i64, s: i64, knot: Option<&str>, budget: usize, seed: u64) -> Result<PairCertificate> {
    if w > -4 {
        return Err(Error::Precondition(format!("need at least 4 minima for two split invariants, got W = {w}")));
    }
    let m = (-w) as usize;
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashMap<(String, Vec<i64>), Design> = HashMap::new();
    for _ in 0..budget {
        let design = random_design(&mut rng, m);
        let (upper, lower) = design.predicted_crossings();
        if lower.len() as i64 - upper.len() as i64 != s || upper.len() + lower.len() > 12 {
            continue;
        }
        let Some(c) = classify_function(&design, &tol) else { continue };
        if knot.is_some_and(|k| k != c.knot) || c.invariants.s != s {
            continue;
        }
        let key = (c.knot.clone(), c.invariants.s_k.clone());
        if seen.contains_key(&key) {
            continue;
        }
        let partner = seen.iter().find(|((k, _), _)| *k == c.knot).map(|(_, d)| d.clone());
        seen.insert(key, design.clone());
        let Some(other) = partner else { continue };
        let (f1, f2) = (other.to_trig(projection_degree(&other)), design.to_trig(projection_degree(&design)));
        let (Some(a), Some(b)) = (classify_function(&f1, &tol), classify_function(&f2, &tol)) else { continue };
        if a.knot == b.knot && a.invariants.w == w && b.invariants.w == w && a.invariants.s == s && b.invariants.s == s && a.invariants.s_k != b.invariants.s_k {
            return Ok(PairCertificate {
                knot: a.knot,
                seed,
                first: f1,
                second: f2,
                first_invariants: a.invariants,
                second_invariants: b.invariants,
            });
        }
    }
    Err(Error::NotFound)
}
