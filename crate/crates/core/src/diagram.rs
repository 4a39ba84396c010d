// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! The planar diagram of the 1-jet curve `c(t) = (f(t), f'(t))`.
//!
//! The x0-axis cuts `c` at the critical points of `f` into arcs `X_1, Y_1, ...,
//! X_m, Y_m`. Every `X` arc lies in the upper half-plane and is a graph over
//! x0 (increasing), every `Y` arc lies in the lower half-plane (decreasing),
//! so double points only occur between two arcs of the same family. They are
//! found pairwise in x0 coordinates and then polished in parameter space.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::circle_functions::{critical_points, golden_min, polish_root, CriticalKind, CriticalPoint, MorseProfile, Tolerances};
use crate::error::{Error, Result};
use crate::trig::{wrap_angle, CircleFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    /// Crossing sign forced by the half-plane for the orientation
    /// `dx0 ∧ dx1 ∧ dx2 > 0`.
    pub fn crossing_sign(self) -> i8 {
        match self {
            HalfPlane::Upper => -1,
            HalfPlane::Lower => 1,
        }
    }
}

/// `X_{index+1}` (upper) or `Y_{index+1}` (lower).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcId {
    pub half_plane: HalfPlane,
    pub index: usize,
}

impl ArcId {
    pub fn x(index: usize) -> Self {
        ArcId { half_plane: HalfPlane::Upper, index }
    }

    pub fn y(index: usize) -> Self {
        ArcId { half_plane: HalfPlane::Lower, index }
    }

    pub fn label(&self) -> String {
        let c = match self.half_plane {
            HalfPlane::Upper => 'X',
            HalfPlane::Lower => 'Y',
        };
        format!("{c}{}", self.index + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublePoint {
    pub t1: f64,
    pub t2: f64,
    pub point: [f64; 2],
    pub half_plane: HalfPlane,
    /// `f''(t1) - f''(t2)`.
    pub x2_gap: f64,
    /// `|det(c'(t1), c'(t2))|`.
    pub transversality: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub id: ArcId,
    /// Parameter interval `[t_start, t_end]`, `t_end` possibly past 2π.
    pub t_start: f64,
    pub t_end: f64,
    pub start_value: f64,
    pub end_value: f64,
    /// x0 along the arc at a few interior parameters, in traversal order.
    pub samples: Vec<f64>,
}

impl Arc {
    /// Closed x0-interval spanned by the endpoints.
    pub fn span(&self) -> (f64, f64) {
        (self.start_value.min(self.end_value), self.start_value.max(self.end_value))
    }

    pub fn contains_parameter(&self, t: f64) -> bool {
        let u = (t - self.t_start).rem_euclid(TAU);
        u <= self.t_end - self.t_start
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub arc_a: ArcId,
    pub arc_b: ArcId,
    /// Parameters on `arc_a` and `arc_b` respectively.
    pub t_a: f64,
    pub t_b: f64,
    pub double_point: DoublePoint,
    pub sign: i8,
    pub over_branch: Branch,
}

impl Crossing {
    pub fn half_plane(&self) -> HalfPlane {
        self.arc_a.half_plane
    }

    pub fn x0(&self) -> f64 {
        self.double_point.point[0]
    }
}

/// Combinatorial diagram of a framed holonomic knot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramedDiagram {
    pub m: usize,
    /// `X_1, Y_1, ..., X_m, Y_m`; `X_1` starts at the global minimum.
    pub arcs: Vec<Arc>,
    pub crossings: Vec<Crossing>,
}

impl FramedDiagram {
    pub fn arc(&self, id: ArcId) -> &Arc {
        let offset = match id.half_plane {
            HalfPlane::Upper => 0,
            HalfPlane::Lower => 1,
        };
        &self.arcs[2 * id.index + offset]
    }

    pub fn h_plus(&self) -> usize {
        self.crossings.iter().filter(|c| c.half_plane() == HalfPlane::Upper).count()
    }

    pub fn h_minus(&self) -> usize {
        self.crossings.iter().filter(|c| c.half_plane() == HalfPlane::Lower).count()
    }

    /// Number of recorded crossings between two arcs.
    pub fn crossing_count(&self, a: ArcId, b: ArcId) -> usize {
        self.crossings
            .iter()
            .filter(|c| (c.arc_a == a && c.arc_b == b) || (c.arc_a == b && c.arc_b == a))
            .count()
    }

    pub fn to_json(&self) -> String {
        let arcs: Vec<_> = self
            .arcs
            .iter()
            .map(|a| {
                serde_json::json!({
                    "arc": a.id.label(),
                    "index": a.id.index + 1,
                    "half_plane": a.id.half_plane,
                    "start_value": a.start_value,
                    "end_value": a.end_value,
                    "t_start": a.t_start,
                    "t_end": a.t_end,
                })
            })
            .collect();
        let crossings: Vec<_> = self
            .crossings
            .iter()
            .map(|c| {
                serde_json::json!({
                    "arcs": [c.arc_a.label(), c.arc_b.label()],
                    "x0": c.double_point.point[0],
                    "x1": c.double_point.point[1],
                    "t": [c.t_a, c.t_b],
                    "sign": c.sign,
                    "over_branch": c.over_branch,
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({ "m": self.m, "arcs": arcs, "crossings": crossings }))
            .expect("diagram serializes")
    }
}

/// Arc sampled by parameter, reordered so x0 increases.
struct ArcTrace {
    ts: Vec<f64>,
    x0: Vec<f64>,
    x1: Vec<f64>,
}

impl ArcTrace {
    fn new<F: CircleFunction + ?Sized>(f: &F, arc: &Arc, grid: usize) -> Self {
        let len = arc.t_end - arc.t_start;
        let n = ((grid as f64 * len / TAU).ceil() as usize).max(64);
        let mut ts = Vec::with_capacity(n + 1);
        let mut x0 = Vec::with_capacity(n + 1);
        let mut x1 = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = arc.t_start + len * k as f64 / n as f64;
            let j = f.jets(t);
            ts.push(t);
            // endpoints sit exactly on the axis at the critical values
            let (v, s) = if k == 0 {
                (arc.start_value, 0.0)
            } else if k == n {
                (arc.end_value, 0.0)
            } else {
                (j.f, j.d1)
            };
            x0.push(v);
            x1.push(s);
        }
        if arc.id.half_plane == HalfPlane::Lower {
            ts.reverse();
            x0.reverse();
            x1.reverse();
        }
        // enforce monotonicity against rounding at the flat ends
        for k in 1..x0.len() {
            if x0[k] < x0[k - 1] {
                x0[k] = x0[k - 1];
            }
        }
        ArcTrace { ts, x0, x1 }
    }

    fn lo(&self) -> f64 {
        self.x0[0]
    }

    fn hi(&self) -> f64 {
        *self.x0.last().unwrap()
    }

    /// Bracketing sample interval for `x`.
    fn bracket(&self, x: f64) -> usize {
        let k = self.x0.partition_point(|&v| v < x);
        k.clamp(1, self.x0.len() - 1) - 1
    }

    fn interp(&self, x: f64) -> (f64, f64) {
        let k = self.bracket(x);
        let (a, b) = (self.x0[k], self.x0[k + 1]);
        let u = if b > a { ((x - a) / (b - a)).clamp(0.0, 1.0) } else { 0.5 };
        (self.ts[k] + u * (self.ts[k + 1] - self.ts[k]), self.x1[k] + u * (self.x1[k + 1] - self.x1[k]))
    }

    /// Exact parameter with `f(t) = x` on this arc.
    fn invert<F: CircleFunction + ?Sized>(&self, f: &F, x: f64) -> f64 {
        let k = self.bracket(x);
        let (t0, t1) = (self.ts[k], self.ts[k + 1]);
        let (lo, hi) = if t0 < t1 { (t0, t1) } else { (t1, t0) };
        polish_root(|t| f.jets(t).f - x, lo, hi, 1e-14)
    }
}

/// x1 difference of two arcs at abscissa `x`, evaluated exactly.
fn exact_gap<F: CircleFunction + ?Sized>(f: &F, a: &ArcTrace, b: &ArcTrace, x: f64) -> f64 {
    let ta = a.invert(f, x);
    let tb = b.invert(f, x);
    f.jets(ta).d1 - f.jets(tb).d1
}

/// Two Newton steps on `(f(t1) - f(t2), f'(t1) - f'(t2)) = 0`.
fn newton_refine<F: CircleFunction + ?Sized>(f: &F, mut t1: f64, mut t2: f64) -> (f64, f64) {
    for _ in 0..3 {
        let (j1, j2) = (f.jets(t1), f.jets(t2));
        let (r0, r1) = (j1.f - j2.f, j1.d1 - j2.d1);
        // J = [[f'(t1), -f'(t2)], [f''(t1), -f''(t2)]]
        let det = -j1.d1 * j2.d2 + j2.d1 * j1.d2;
        if det.abs() < 1e-300 {
            break;
        }
        let d1 = (-j2.d2 * r0 + j2.d1 * r1) / det;
        let d2 = (-j1.d2 * r0 + j1.d1 * r1) / det;
        if !(d1.abs() < 1e-10 && d2.abs() < 1e-10) {
            break;
        }
        t1 -= d1;
        t2 -= d2;
    }
    (t1, t2)
}

/// Whether the quadratic through three samples of one sign comes within
/// half the middle value of zero.
fn parabola_reaches_zero(x: [f64; 3], y: [f64; 3]) -> bool {
    if y[0] * y[1] <= 0.0 || y[1] * y[2] <= 0.0 {
        return true;
    }
    let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
    if !(h0 > 0.0 && h1 > 0.0) {
        return true;
    }
    let s0 = (y[1] - y[0]) / h0;
    let s1 = (y[2] - y[1]) / h1;
    let c = (s1 - s0) / (h0 + h1);
    if c == 0.0 {
        return false;
    }
    // p(u) = y1 + b u + c u^2 around x1
    let b = s0 + c * h0;
    let u = (-b / (2.0 * c)).clamp(-h0, h1);
    let vertex = y[1] + b * u + c * u * u;
    vertex * y[1] <= 0.0 || vertex.abs() < 0.5 * y[1].abs()
}

/// Raw crossings of one pair of same-family arcs: `(t_a, t_b)` pairs.
fn pair_crossings<F: CircleFunction + ?Sized>(f: &F, a: &ArcTrace, b: &ArcTrace) -> Vec<(f64, f64)> {
    let lo = a.lo().max(b.lo());
    let hi = a.hi().min(b.hi());
    if !(hi > lo) {
        return Vec::new();
    }
    let mut xs: Vec<f64> = a
        .x0
        .iter()
        .chain(&b.x0)
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    xs.push(lo);
    xs.push(hi);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    // x1 grows like a square root near an arc end, where interpolation is poor
    let near_lo = a.x0[1].max(b.x0[1]);
    let near_hi = a.x0[a.x0.len() - 2].min(b.x0[b.x0.len() - 2]);
    let d: Vec<f64> = xs
        .iter()
        .map(|&x| if x <= near_lo || x >= near_hi { exact_gap(f, a, b, x) } else { a.interp(x).1 - b.interp(x).1 })
        .collect();
    let roots = roots_from_samples(f, a, b, &xs, &d);
    // an odd count exactly when the spans interleave; otherwise a root pair
    // was split by interpolation error, so rescan exactly. Interpolation
    // can also put a sign change in the wrong sample interval, leaving a
    // bracket without a root.
    let interleaved = spans_interleave((a.lo(), a.hi()), (b.lo(), b.hi()));
    let scale = 1.0 + a.x1.iter().chain(&b.x1).fold(0.0f64, |m, v| m.max(v.abs()));
    let genuine = roots.iter().all(|&x| exact_gap(f, a, b, x).abs() <= 1e-9 * scale);
    let roots = if genuine && (roots.len() % 2 == 1) == interleaved {
        roots
    } else {
        let d: Vec<f64> = xs.iter().map(|&x| exact_gap(f, a, b, x)).collect();
        roots_from_samples(f, a, b, &xs, &d)
    };
    roots
        .into_iter()
        .map(|x| {
            let (ta, tb) = (a.invert(f, x), b.invert(f, x));
            newton_refine(f, ta, tb)
        })
        .collect()
}

/// Roots in x0 of the exact gap, bracketed by sign changes of the sampled
/// gap `d` or by dips toward zero.
fn roots_from_samples<F: CircleFunction + ?Sized>(f: &F, a: &ArcTrace, b: &ArcTrace, xs: &[f64], d: &[f64]) -> Vec<f64> {
    let mut roots = Vec::new();
    let solve = |x0: f64, x1: f64| polish_root(|x| exact_gap(f, a, b, x), x0, x1, 1e-15 * (1.0 + x1.abs()));
    for k in 0..xs.len() - 1 {
        if d[k] == 0.0 && k > 0 {
            roots.push(xs[k]);
        } else if d[k] * d[k + 1] < 0.0 {
            roots.push(solve(xs[k], xs[k + 1]));
        } else if k > 0 && d[k - 1] * d[k] > 0.0 && d[k] * d[k + 1] > 0.0 && d[k].abs() < d[k - 1].abs() && d[k].abs() <= d[k + 1].abs() {
            // a dip toward zero between samples may hide two close roots
            if !parabola_reaches_zero(
                [xs[k - 1], xs[k], xs[k + 1]],
                [exact_gap(f, a, b, xs[k - 1]), exact_gap(f, a, b, xs[k]), exact_gap(f, a, b, xs[k + 1])],
            ) {
                continue;
            }
            let sgn = d[k].signum();
            let (xm, vm) = golden_min(|x| sgn * exact_gap(f, a, b, x), xs[k - 1], xs[k + 1], 80);
            if vm < 0.0 {
                roots.push(solve(xs[k - 1], xm));
                roots.push(solve(xm, xs[k + 1]));
            }
        }
    }
    roots
}

pub fn arcs_from_profile<F: CircleFunction + ?Sized>(f: &F, profile: &MorseProfile) -> Vec<Arc> {
    let pts: Vec<CriticalPoint> = profile.from_global_min();
    let n = pts.len();
    let mut arcs = Vec::with_capacity(n);
    for k in 0..n {
        let (p, q) = (pts[k], pts[(k + 1) % n]);
        let mut t_end = q.t;
        while t_end <= p.t {
            t_end += TAU;
        }
        let id = if p.kind == CriticalKind::Min { ArcId::x(k / 2) } else { ArcId::y(k / 2) };
        let samples = (1..16)
            .map(|i| f.jets(p.t + (t_end - p.t) * i as f64 / 16.0).f)
            .collect();
        arcs.push(Arc { id, t_start: p.t, t_end, start_value: p.value, end_value: q.value, samples });
    }
    arcs
}

fn locate(arcs: &[Arc], t: f64) -> usize {
    arcs.iter().position(|a| a.contains_parameter(t)).unwrap_or(0)
}

/// Crossings between arcs with their arc assignment.
fn extract_crossings<F: CircleFunction + ?Sized>(f: &F, arcs: &[Arc], grid: usize, tol: &Tolerances) -> Result<Vec<Crossing>> {
    let traces: Vec<ArcTrace> = arcs.iter().map(|a| ArcTrace::new(f, a, grid)).collect();
    let mut out: Vec<Crossing> = Vec::new();
    for i in 0..arcs.len() {
        for j in (i + 1)..arcs.len() {
            if arcs[i].id.half_plane != arcs[j].id.half_plane {
                continue;
            }
            let (ia, ib) = if arcs[i].id < arcs[j].id { (i, j) } else { (j, i) };
            for (ta, tb) in pair_crossings(f, &traces[ia], &traces[ib]) {
                let (ta, tb) = (wrap_angle(ta), wrap_angle(tb));
                // Newton may slide a root out of its arc only at a spurious solution
                if locate(arcs, ta) != ia || locate(arcs, tb) != ib {
                    continue;
                }
                let dup = out.iter().any(|c| {
                    c.arc_a == arcs[ia].id && c.arc_b == arcs[ib].id && (c.t_a - ta).abs() < 1e-12 && (c.t_b - tb).abs() < 1e-12
                });
                if dup {
                    continue;
                }
                out.push(make_crossing(f, arcs[ia].id, arcs[ib].id, ta, tb, tol)?);
            }
        }
    }
    out.sort_by(|a, b| (a.arc_a, a.arc_b).cmp(&(b.arc_a, b.arc_b)).then(a.x0().total_cmp(&b.x0())));
    Ok(out)
}

fn make_crossing<F: CircleFunction + ?Sized>(f: &F, arc_a: ArcId, arc_b: ArcId, t_a: f64, t_b: f64, tol: &Tolerances) -> Result<Crossing> {
    let (ja, jb) = (f.jets(t_a), f.jets(t_b));
    let (t1, t2, j1, j2) = if t_a < t_b { (t_a, t_b, ja, jb) } else { (t_b, t_a, jb, ja) };
    let x1 = 0.5 * (ja.d1 + jb.d1);
    let det = j1.d1 * j2.d2 - j1.d2 * j2.d1;
    let dp = DoublePoint {
        t1,
        t2,
        point: [0.5 * (ja.f + jb.f), x1],
        half_plane: arc_a.half_plane,
        x2_gap: j1.d2 - j2.d2,
        transversality: det.abs(),
    };
    if x1.abs() < tol.axis_clearance {
        return Err(Error::AxisDoublePoint { t1, t2, x1 });
    }
    if dp.transversality < tol.transversality {
        return Err(Error::NonTransverseDoublePoint { t1, t2 });
    }
    let over_branch = if ja.d2 > jb.d2 { Branch::A } else { Branch::B };
    let (o, u) = if over_branch == Branch::A { (ja, jb) } else { (jb, ja) };
    let geometric = (o.d1 * u.d2 - o.d2 * u.d1).signum() as i8;
    Ok(Crossing { arc_a, arc_b, t_a, t_b, double_point: dp, sign: geometric, over_branch })
}

/// All double points of `c`, with half-plane, x2 gap and transversality.
pub fn find_double_points<F: CircleFunction + ?Sized>(f: &F, grid_size: usize, tol: &Tolerances) -> Result<Vec<DoublePoint>> {
    let profile = critical_points(f, tol)?;
    let arcs = arcs_from_profile(f, &profile);
    let mut pts: Vec<DoublePoint> = extract_crossings(f, &arcs, grid_size.max(tol.grid_for(f)), tol)?
        .into_iter()
        .map(|c| c.double_point)
        .collect();
    pts.sort_by(|a, b| a.t1.total_cmp(&b.t1).then(a.t2.total_cmp(&b.t2)));
    Ok(pts)
}

/// Outcome of checking that the space curve `C` is embedded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub ok: bool,
    pub min_gap: f64,
    pub violations: Vec<DoublePoint>,
}

pub fn embedding_check(points: &[DoublePoint], tol: f64) -> EmbeddingReport {
    let violations: Vec<DoublePoint> = points.iter().filter(|p| !(p.x2_gap.abs() > tol)).copied().collect();
    let min_gap = points.iter().map(|p| p.x2_gap.abs()).fold(f64::INFINITY, f64::min);
    EmbeddingReport { ok: violations.is_empty(), min_gap, violations }
}

/// Extracts the framed diagram of a generic function.
pub fn build_diagram<F: CircleFunction + ?Sized>(f: &F, tol: &Tolerances) -> Result<FramedDiagram> {
    let profile = critical_points(f, tol)?;
    let arcs = arcs_from_profile(f, &profile);
    let crossings = extract_crossings(f, &arcs, tol.grid_for(f), tol)?;
    let pts: Vec<DoublePoint> = crossings.iter().map(|c| c.double_point).collect();
    let emb = embedding_check(&pts, tol.x2_gap);
    if !emb.ok {
        return Err(Error::NotEmbedded { count: emb.violations.len() });
    }
    Ok(FramedDiagram { m: profile.minima_count, arcs, crossings })
}

/// Per-check results of [`validate_diagram`]; each list holds offenders.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub arc_count_ok: bool,
    pub sign_violations: Vec<usize>,
    pub monotonicity_violations: Vec<ArcId>,
    pub mixed_pairs: Vec<usize>,
    pub parity_violations: Vec<(ArcId, ArcId)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.arc_count_ok
            && self.sign_violations.is_empty()
            && self.monotonicity_violations.is_empty()
            && self.mixed_pairs.is_empty()
            && self.parity_violations.is_empty()
    }
}

/// Whether exactly one endpoint of `b` lies strictly inside the span of `a`.
pub fn spans_interleave(a: (f64, f64), b: (f64, f64)) -> bool {
    let inside = |v: f64| v > a.0 && v < a.1;
    inside(b.0) != inside(b.1)
}

pub fn validate_diagram(d: &FramedDiagram) -> ValidationReport {
    let mut r = ValidationReport { arc_count_ok: d.arcs.len() == 2 * d.m, ..Default::default() };
    for (k, c) in d.crossings.iter().enumerate() {
        if c.sign != c.half_plane().crossing_sign() {
            r.sign_violations.push(k);
        }
        if c.arc_a.half_plane != c.arc_b.half_plane || c.arc_a == c.arc_b {
            r.mixed_pairs.push(k);
        }
    }
    for a in &d.arcs {
        let mut seq = vec![a.start_value];
        seq.extend(&a.samples);
        seq.push(a.end_value);
        let want = match a.id.half_plane {
            HalfPlane::Upper => Ordering::Less,
            HalfPlane::Lower => Ordering::Greater,
        };
        if seq.windows(2).any(|w| w[0].total_cmp(&w[1]) != want) {
            r.monotonicity_violations.push(a.id);
        }
    }
    for (i, a) in d.arcs.iter().enumerate() {
        for b in d.arcs.iter().skip(i + 1) {
            if a.id.half_plane != b.id.half_plane {
                continue;
            }
            let odd = d.crossing_count(a.id, b.id) % 2 == 1;
            if odd != spans_interleave(a.span(), b.span()) {
                r.parity_violations.push((a.id, b.id));
            }
        }
    }
    r
}
