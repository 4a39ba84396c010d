// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Paths in function space, their bifurcations and the invariants along them.
//!
//! Events are found by comparing diagram signatures along the path: the
//! number of minima, the order of the critical values, and for every arc the
//! sequence of arcs it crosses. A change is localized by bisection and then
//! classified:
//!
//! * `Ω1`: the number of minima changes. Sign of the half-plane of the
//!   crossing created with the kink.
//! * `Ω2`: two critical values trade places. Sign of `f'' f''` at the pair.
//! * `Ω0`: the crossing count of an arc pair changes by two. This is a
//!   tangency of `c`, where the x2 gap and the transversality vanish together.
//!   Sign of the half-plane.
//! * `Ω3`: only the order of crossings along arcs changes.

mod generate;
mod normalize;

pub use generate::{dip, generate_range, omega0_path, omega1_path, omega2_path, random_design, sample_move_path, search_distinguishing_pair, MoveFamily, PairCertificate};
pub use normalize::{braid_normalize, check_split_via_braid, is_braid_normalized, value_slide, BraidCheck};

use serde::{Deserialize, Serialize};

use crate::circle_functions::Tolerances;
use crate::diagram::{build_diagram, FramedDiagram, HalfPlane};
use crate::error::{Error, Result};
use crate::invariants::{split_invariants, SplitInvariants};
use crate::trig::TrigPolynomial;

/// Default localization tolerance in `s`.
pub const LOCALIZATION: f64 = 1e-9;
/// Events closer than this cannot be told apart.
pub const SEPARATION: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: TrigPolynomial,
    pub to: TrigPolynomial,
    pub s_range: (f64, f64),
}

/// Piecewise-linear path in coefficient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionPath {
    pub segments: Vec<Segment>,
    /// Number of scan samples per segment.
    pub step: usize,
}

impl FunctionPath {
    /// Joins consecutive functions by linear segments of equal `s`-length.
    pub fn through(points: &[TrigPolynomial], step: usize) -> Self {
        let n = points.len().saturating_sub(1).max(1);
        let segments = points
            .windows(2)
            .enumerate()
            .map(|(k, w)| Segment { from: w[0].clone(), to: w[1].clone(), s_range: (k as f64 / n as f64, (k + 1) as f64 / n as f64) })
            .collect();
        FunctionPath { segments, step }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn start(&self) -> Option<TrigPolynomial> {
        self.segments.first().map(|s| s.from.clone())
    }

    pub fn end(&self) -> Option<TrigPolynomial> {
        self.segments.last().map(|s| s.to.clone())
    }

    pub fn eval(&self, s: f64) -> TrigPolynomial {
        let seg = self
            .segments
            .iter()
            .find(|g| s <= g.s_range.1)
            .unwrap_or_else(|| self.segments.last().expect("non-empty path"));
        let (a, b) = seg.s_range;
        let u = if b > a { ((s - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
        seg.from.lerp(&seg.to, u)
    }

    /// Largest coefficient mismatch at segment joints.
    pub fn joint_error(&self) -> f64 {
        self.segments.windows(2).map(|w| w[0].to.max_coeff_distance(&w[1].from)).fold(0.0, f64::max)
    }

    /// The part of the path over `[a, b]`, reparameterized to `[0, 1]`.
    pub fn restrict(&self, a: f64, b: f64) -> FunctionPath {
        let mut cuts = vec![a];
        cuts.extend(self.segments.iter().map(|g| g.s_range.1).filter(|&s| s > a && s < b));
        cuts.push(b);
        let points: Vec<TrigPolynomial> = cuts.iter().map(|&s| self.eval(s)).collect();
        let segments = cuts
            .windows(2)
            .zip(points.windows(2))
            .map(|(c, f)| Segment { from: f[0].clone(), to: f[1].clone(), s_range: ((c[0] - a) / (b - a), (c[1] - a) / (b - a)) })
            .collect();
        FunctionPath { segments, step: self.step }
    }

    fn scan_points(&self) -> Vec<f64> {
        let mut pts = Vec::new();
        for seg in &self.segments {
            let (a, b) = seg.s_range;
            for k in 0..self.step.max(1) {
                pts.push(a + (b - a) * k as f64 / self.step.max(1) as f64);
            }
        }
        if let Some(seg) = self.segments.last() {
            pts.push(seg.s_range.1);
        }
        pts.dedup();
        pts
    }
}

/// `s ↦ (1 - s) f + s g` on `[0, 1]`.
pub fn interpolate(f: &TrigPolynomial, g: &TrigPolynomial) -> FunctionPath {
    let k = f.degree().max(g.degree());
    FunctionPath { segments: vec![Segment { from: f.padded(k), to: g.padded(k), s_range: (0.0, 1.0) }], step: 64 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Omega0Plus,
    Omega0Minus,
    Omega1Plus,
    Omega1Minus,
    Omega2Plus,
    Omega2Minus,
    Omega3,
}

impl EventKind {
    pub fn is_omega0(self) -> bool {
        matches!(self, EventKind::Omega0Plus | EventKind::Omega0Minus)
    }

    pub fn is_omega1(self) -> bool {
        matches!(self, EventKind::Omega1Plus | EventKind::Omega1Minus)
    }

    pub fn is_omega2(self) -> bool {
        matches!(self, EventKind::Omega2Plus | EventKind::Omega2Minus)
    }

    /// Moves of framed holonomic isotopy.
    pub fn is_framed(self) -> bool {
        self.is_omega2() || self == EventKind::Omega3
    }

    fn from_half_plane(hp: HalfPlane, plus: EventKind, minus: EventKind) -> EventKind {
        match hp {
            HalfPlane::Upper => plus,
            HalfPlane::Lower => minus,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventWitness {
    /// Parameters of the critical points or arcs involved, on the low side.
    pub t: Vec<f64>,
    pub half_plane: Option<HalfPlane>,
    /// Second derivatives at the two extrema of an `Ω2` event.
    pub second_derivatives: Vec<f64>,
    /// Arc labels involved, on the low side.
    pub arcs: Vec<String>,
    pub before: Option<Counts>,
    pub after: Option<Counts>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub m: usize,
    pub h_plus: usize,
    pub h_minus: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotopyEvent {
    pub s_star: f64,
    pub kind: EventKind,
    pub witness: EventWitness,
}

/// Diagram data compared along a path.
#[derive(Clone, Debug)]
struct Snapshot {
    diagram: FramedDiagram,
    /// Rank of each critical value, critical points in arc order.
    ranks: Vec<usize>,
    /// For each arc, the arcs met along it in traversal order.
    partners: Vec<Vec<usize>>,
    second: Vec<f64>,
}

impl Snapshot {
    fn new(f: &TrigPolynomial, tol: &Tolerances) -> Result<Self> {
        let diagram = build_diagram(f, tol)?;
        let n = diagram.arcs.len();
        let values: Vec<f64> = diagram.arcs.iter().map(|a| a.start_value).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut ranks = vec![0; n];
        for (r, &k) in order.iter().enumerate() {
            ranks[k] = r;
        }
        let index_of = |id| diagram.arcs.iter().position(|a| a.id == id).expect("arc present");
        let mut meets: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
        for c in &diagram.crossings {
            let (ia, ib) = (index_of(c.arc_a), index_of(c.arc_b));
            let along = |k: usize, t: f64| (t - diagram.arcs[k].t_start).rem_euclid(std::f64::consts::TAU);
            meets[ia].push((along(ia, c.t_a), ib));
            meets[ib].push((along(ib, c.t_b), ia));
        }
        let partners = meets
            .into_iter()
            .map(|mut v| {
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                v.into_iter().map(|x| x.1).collect()
            })
            .collect();
        let second = diagram.arcs.iter().map(|a| crate::trig::CircleFunction::jets(f, a.t_start).d2).collect();
        Ok(Snapshot { diagram, ranks, partners, second })
    }

    fn same(&self, other: &Snapshot) -> bool {
        self.diagram.m == other.diagram.m && self.ranks == other.ranks && self.partners == other.partners
    }

    fn counts(&self) -> Counts {
        Counts { m: self.diagram.m, h_plus: self.diagram.h_plus(), h_minus: self.diagram.h_minus() }
    }

    fn pair_counts(&self) -> Vec<Vec<usize>> {
        self.partners
            .iter()
            .map(|p| {
                let mut c = vec![0; self.partners.len()];
                for &q in p {
                    c[q] += 1;
                }
                c
            })
            .collect()
    }
}

/// Snapshot at `s`, nudging off exact degeneracies.
fn snapshot_near(p: &FunctionPath, s: f64, lo: f64, hi: f64, tol: &Tolerances) -> Option<(f64, Snapshot)> {
    for k in 0..6 {
        let shift = (hi - lo) * 1e-3 * k as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
        let ss = (s + shift).clamp(lo, hi);
        if let Ok(snap) = Snapshot::new(&p.eval(ss), tol) {
            return Some((ss, snap));
        }
    }
    None
}

fn classify(s_star: f64, lo: &Snapshot, hi: &Snapshot) -> Option<IsotopyEvent> {
    let mut w = EventWitness { before: Some(lo.counts()), after: Some(hi.counts()), ..Default::default() };
    let (cl, ch) = (lo.counts(), hi.counts());
    let dh = (ch.h_plus as i64 - cl.h_plus as i64, ch.h_minus as i64 - cl.h_minus as i64);
    if cl.m != ch.m {
        // a kink carries exactly one crossing
        if cl.m.abs_diff(ch.m) != 1 || dh.0.abs() + dh.1.abs() != 1 {
            return None;
        }
        let hp = if cl.h_plus != ch.h_plus { HalfPlane::Upper } else { HalfPlane::Lower };
        w.half_plane = Some(hp);
        let kind = EventKind::from_half_plane(hp, EventKind::Omega1Plus, EventKind::Omega1Minus);
        return Some(IsotopyEvent { s_star, kind, witness: w });
    }
    let n = lo.ranks.len();
    let m = cl.m;
    if lo.ranks != hi.ranks {
        // the global minimum may have moved: relabel by nearest critical parameter
        let gap = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(std::f64::consts::TAU);
            d.min(std::f64::consts::TAU - d)
        };
        let shift = (0..m)
            .min_by(|&r, &q| {
                let cost = |r: usize| (0..n).map(|k| gap(lo.diagram.arcs[k].t_start, hi.diagram.arcs[(k + n - 2 * r) % n].t_start)).sum::<f64>();
                cost(r).total_cmp(&cost(q))
            })
            .unwrap_or(0);
        let rot: Vec<usize> = (0..n).map(|k| hi.ranks[(k + n - 2 * shift) % n]).collect();
        let diff: Vec<usize> = (0..n).filter(|&k| lo.ranks[k] != rot[k]).collect();
        if diff.len() == 2 {
            let (i, j) = (diff[0], diff[1]);
            // the two extrema pass through each other with one upper and one
            // lower crossing between them
            let adjacent = lo.ranks[i] == rot[j] && lo.ranks[j] == rot[i] && lo.ranks[i].abs_diff(lo.ranks[j]) == 1;
            if adjacent && dh.0 == dh.1 && dh.0.abs() == 1 {
                let kind = if i % 2 == j % 2 { EventKind::Omega2Plus } else { EventKind::Omega2Minus };
                w.t = vec![lo.diagram.arcs[i].t_start, lo.diagram.arcs[j].t_start];
                w.second_derivatives = vec![lo.second[i], lo.second[j]];
                w.arcs = vec![lo.diagram.arcs[i].id.label(), lo.diagram.arcs[j].id.label()];
                return Some(IsotopyEvent { s_star, kind, witness: w });
            }
        }
        return None;
    }
    let (pl, ph) = (lo.pair_counts(), hi.pair_counts());
    let changed: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).filter(|&(i, j)| pl[i][j] != ph[i][j]).collect();
    if changed.len() > 1 {
        return None;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if pl[i][j] != ph[i][j] {
                if pl[i][j].abs_diff(ph[i][j]) != 2 {
                    return None;
                }
                let hp = lo.diagram.arcs[i].id.half_plane;
                w.half_plane = Some(hp);
                w.arcs = vec![lo.diagram.arcs[i].id.label(), lo.diagram.arcs[j].id.label()];
                let kind = EventKind::from_half_plane(hp, EventKind::Omega0Plus, EventKind::Omega0Minus);
                return Some(IsotopyEvent { s_star, kind, witness: w });
            }
        }
    }
    let moved: Vec<String> = (0..n).filter(|&k| lo.partners[k] != hi.partners[k]).map(|k| lo.diagram.arcs[k].id.label()).collect();
    w.half_plane = moved.first().map(|_| lo.diagram.arcs[(0..n).find(|&k| lo.partners[k] != hi.partners[k]).unwrap()].id.half_plane);
    w.arcs = moved;
    Some(IsotopyEvent { s_star, kind: EventKind::Omega3, witness: w })
}

/// A localized change: parameter and the snapshots on both sides.
struct Change {
    s: f64,
    lo: Snapshot,
    hi: Snapshot,
}

fn bisect(p: &FunctionPath, a: (f64, Snapshot), b: (f64, Snapshot), loc: f64, tol: &Tolerances, out: &mut Vec<Change>) -> Result<()> {
    let ((sa, za), (sb, zb)) = (a, b);
    if za.same(&zb) {
        return Ok(());
    }
    if sb - sa <= loc {
        out.push(Change { s: 0.5 * (sa + sb), lo: za, hi: zb });
        return Ok(());
    }
    let mid = 0.5 * (sa + sb);
    let Some((sm, zm)) = snapshot_near(p, mid, sa + 0.25 * (sb - sa), sb - 0.25 * (sb - sa), tol) else {
        // the degeneracy is wider than the interval: stop refining here
        out.push(Change { s: mid, lo: za, hi: zb });
        return Ok(());
    };
    bisect(p, (sa, za), (sm, zm.clone()), loc, tol, out)?;
    bisect(p, (sm, zm), (sb, zb), loc, tol, out)
}

fn changes(p: &FunctionPath, loc: f64, tol: &Tolerances) -> Result<Vec<Change>> {
    let pts = p.scan_points();
    let mut snaps = Vec::with_capacity(pts.len());
    for (k, &s) in pts.iter().enumerate() {
        let lo = if k == 0 { s } else { 0.5 * (pts[k - 1] + s) };
        let hi = if k + 1 == pts.len() { s } else { 0.5 * (s + pts[k + 1]) };
        let snap = if k == 0 || k + 1 == pts.len() {
            Snapshot::new(&p.eval(s), tol).map(|z| (s, z))?
        } else {
            snapshot_near(p, s, lo, hi, tol).ok_or(Error::UnresolvedEvent { s })?
        };
        snaps.push(snap);
    }
    let mut out = Vec::new();
    for w in snaps.windows(2) {
        bisect(p, w[0].clone(), w[1].clone(), loc, tol, &mut out)?;
    }
    Ok(out)
}

/// Scans the path, localizes every diagram change to `loc` in `s` and
/// classifies it.
pub fn detect_events(p: &FunctionPath, loc: f64, tol: &Tolerances) -> Result<Vec<IsotopyEvent>> {
    if p.is_empty() {
        return Ok(Vec::new());
    }
    let found = changes(p, loc, tol)?;
    check_separation(&found)?;
    found
        .iter()
        .map(|c| classify(c.s, &c.lo, &c.hi).ok_or(Error::UnresolvedEvent { s: c.s }))
        .collect()
}

fn check_separation(found: &[Change]) -> Result<()> {
    for w in found.windows(2) {
        if w[1].s - w[0].s < SEPARATION {
            return Err(Error::UnresolvedEvent { s: w[1].s });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSegment {
    pub s_range: (f64, f64),
    pub invariants: SplitInvariants,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventJump {
    pub event: IsotopyEvent,
    pub delta_w: i64,
    pub delta_s: i64,
    pub delta_s_k: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantTrace {
    pub segments: Vec<TraceSegment>,
    pub jumps: Vec<EventJump>,
}

impl InvariantTrace {
    pub fn events(&self) -> Vec<&IsotopyEvent> {
        self.jumps.iter().map(|j| &j.event).collect()
    }
}

fn jump_law(e: &IsotopyEvent, before: &SplitInvariants, after: &SplitInvariants) -> Option<String> {
    let dw = after.w - before.w;
    let ds = after.s - before.s;
    let ok = match e.kind {
        EventKind::Omega2Plus | EventKind::Omega2Minus | EventKind::Omega3 => dw == 0 && ds == 0 && before.s_k == after.s_k,
        EventKind::Omega1Plus | EventKind::Omega1Minus => dw.abs() == 1 && ds.abs() == 1,
        EventKind::Omega0Plus | EventKind::Omega0Minus => dw == 0 && ds.abs() == 2,
    };
    if ok {
        None
    } else {
        Some(format!("{:?}: before {before:?}, after {after:?}", e.kind))
    }
}

/// Computes the split invariants on every event-free stretch at three
/// interior samples and checks the jump laws at every event.
pub fn monitor_invariants(p: &FunctionPath, loc: f64, tol: &Tolerances) -> Result<InvariantTrace> {
    let events = detect_events(p, loc, tol)?;
    invariant_trace(p, &events, tol)
}

/// Invariants on each stretch between the given events of `p`, and the jump
/// across each event, checked against the jump law of its kind.
pub fn invariant_trace(p: &FunctionPath, events: &[IsotopyEvent], tol: &Tolerances) -> Result<InvariantTrace> {
    if p.is_empty() {
        return Ok(InvariantTrace { segments: Vec::new(), jumps: Vec::new() });
    }
    let (s0, s1) = (p.segments[0].s_range.0, p.segments.last().unwrap().s_range.1);
    let mut cuts = vec![s0];
    cuts.extend(events.iter().map(|e| e.s_star));
    cuts.push(s1);
    let mut segments = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut inv: Option<SplitInvariants> = None;
        for frac in [0.25, 0.5, 0.75] {
            let s = a + (b - a) * frac;
            let (_, snap) = snapshot_near(p, s, a + 0.1 * (b - a), b - 0.1 * (b - a), tol).ok_or(Error::UnresolvedEvent { s })?;
            let here = split_invariants(&snap.diagram)?;
            match &inv {
                None => inv = Some(here),
                Some(prev) if *prev != here => {
                    return Err(Error::InvarianceViolation { s, detail: format!("event-free stretch changed from {prev:?} to {here:?}") });
                }
                _ => {}
            }
        }
        segments.push(TraceSegment { s_range: (a, b), invariants: inv.expect("three samples") });
    }
    let mut jumps = Vec::with_capacity(events.len());
    for (k, event) in events.iter().enumerate() {
        let (before, after) = (&segments[k].invariants, &segments[k + 1].invariants);
        if let Some(detail) = jump_law(event, before, after) {
            return Err(Error::InvarianceViolation { s: event.s_star, detail });
        }
        let n = before.s_k.len().max(after.s_k.len());
        let get = |v: &Vec<i64>, i: usize| v.get(i).copied().unwrap_or(0);
        jumps.push(EventJump {
            delta_w: after.w - before.w,
            delta_s: after.s - before.s,
            delta_s_k: (0..n).map(|i| get(&after.s_k, i) - get(&before.s_k, i)).collect(),
            event: event.clone(),
        });
    }
    Ok(InvariantTrace { segments, jumps })
}

/// Sub-path around `events[index]` reaching halfway to its neighbours,
/// checked to contain that event alone.
pub fn isolate_event(p: &FunctionPath, events: &[IsotopyEvent], index: usize, tol: &Tolerances) -> Result<FunctionPath> {
    let (s0, s1) = (p.segments[0].s_range.0, p.segments.last().map(|g| g.s_range.1).unwrap_or(1.0));
    let s = events[index].s_star;
    let a = if index == 0 { s0 } else { 0.5 * (events[index - 1].s_star + s) };
    let b = events.get(index + 1).map(|e| 0.5 * (s + e.s_star)).unwrap_or(s1);
    let q = p.restrict(a, b);
    let found = detect_events(&q, LOCALIZATION, tol)?;
    if found.len() == 1 && found[0].kind == events[index].kind {
        Ok(q)
    } else {
        Err(Error::UnresolvedEvent { s })
    }
}

/// Event trace as JSON.
pub fn events_to_json(events: &[IsotopyEvent]) -> String {
    serde_json::to_string_pretty(&serde_json::json!({ "events": events })).expect("events serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_path_has_no_events() {
        let f = TrigPolynomial::new(0.0, vec![0.0, 0.3], vec![1.0, 0.5]);
        let p = interpolate(&f, &f);
        assert!(detect_events(&p, LOCALIZATION, &Tolerances::default()).unwrap().is_empty());
    }

    #[test]
    fn scaling_path_has_no_events() {
        let f = TrigPolynomial::new(0.0, vec![0.0], vec![1.0]);
        let p = interpolate(&f, &f.scale(2.0));
        assert!(detect_events(&p, LOCALIZATION, &Tolerances::default()).unwrap().is_empty());
        assert_eq!(p.eval(0.5).sin_coeffs()[0], 1.5);
    }
}
