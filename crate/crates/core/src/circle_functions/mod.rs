// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Critical-point structure and genericity margins of circle functions.

pub mod homotopy;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trig::{CircleFunction, Jets, TrigPolynomial};

/// Numerical thresholds shared by the extraction pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Base sampling grid; raised to `64 * degree` for high-degree input.
    pub grid: usize,
    /// Minimum admissible `|f''|` at a critical point and `sqrt(f'^2 + f''^2)` anywhere.
    pub margin: f64,
    /// Minimum distance between two critical values.
    pub value_gap: f64,
    /// Root polishing tolerance in `t`.
    pub root: f64,
    /// Minimum `|x1|` at a double point.
    pub axis_clearance: f64,
    /// Minimum `|det(c'(t1), c'(t2))|` at a double point.
    pub transversality: f64,
    /// Minimum `|f''(t1) - f''(t2)|` at a double point.
    pub x2_gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grid: 4096,
            margin: 1e-8,
            value_gap: 1e-8,
            root: 1e-12,
            axis_clearance: 1e-6,
            transversality: 1e-10,
            x2_gap: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn grid_for<F: CircleFunction + ?Sized>(&self, f: &F) -> usize {
        self.grid.max(64 * f.degree_hint())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub value: f64,
    pub kind: CriticalKind,
    pub second_deriv: f64,
}

/// Critical points of a Morse function in cyclic order of `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseProfile {
    pub points: Vec<CriticalPoint>,
    pub minima_count: usize,
}

impl MorseProfile {
    /// Index of the minimum with the smallest value.
    pub fn global_min_index(&self) -> usize {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.kind == CriticalKind::Min)
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .map(|(i, _)| i)
            .expect("profile has a minimum")
    }

    /// The points rotated so that the list starts at the global minimum.
    pub fn from_global_min(&self) -> Vec<CriticalPoint> {
        let start = self.global_min_index();
        let n = self.points.len();
        (0..n).map(|k| self.points[(start + k) % n]).collect()
    }

    pub fn minima(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.kind == CriticalKind::Min)
    }

    pub fn maxima(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.kind == CriticalKind::Max)
    }
}

pub(crate) fn grid_points(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |i| TAU * i as f64 / n as f64)
}

/// Root of `g` in `[lo, hi]` with `g(lo)` and `g(hi)` of opposite sign (or
/// zero at `lo`), polished by Illinois-modified regula falsi with bisection
/// fallback.
pub(crate) fn polish_root<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut glo = g(lo);
    let mut ghi = g(hi);
    if glo == 0.0 {
        return lo;
    }
    if ghi == 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mut x = (lo * ghi - hi * glo) / (ghi - glo);
        let width = hi - lo;
        // keep the secant step well inside the bracket
        if !(x > lo + 0.01 * width && x < hi - 0.01 * width) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if (gx < 0.0) == (glo < 0.0) {
            lo = x;
            glo = gx;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimizer on `[lo, hi]`.
pub(crate) fn golden_min<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..iters {
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 < g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// A root of `f'` before any genericity checks.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RawCritical {
    pub t: f64,
    pub jets: Jets,
    pub upward: bool,
}

pub(crate) fn raw_critical_points<F: CircleFunction + ?Sized>(
    f: &F,
    grid: usize,
    root_tol: f64,
) -> Vec<RawCritical> {
    let ts: Vec<f64> = grid_points(grid).collect();
    let d1: Vec<f64> = ts.iter().map(|&t| f.jets(t).d1).collect();
    let mut out = Vec::new();
    for i in 0..grid {
        let j = (i + 1) % grid;
        let (a, b) = (d1[i], d1[j]);
        let lo = ts[i];
        let hi = if j == 0 { TAU } else { ts[j] };
        let upward = a <= 0.0 && b > 0.0;
        let downward = a >= 0.0 && b < 0.0;
        if upward || downward {
            let t = polish_root(|t| f.jets(t).d1, lo, hi, root_tol);
            let t = crate::trig::wrap_angle(t);
            out.push(RawCritical { t, jets: f.jets(t), upward });
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    out
}

/// Smallest value of `f'^2 + f''^2` over the grid, polished around the
/// smallest few grid minima. Returns `(t, value)`.
pub(crate) fn immersion_minimum<F: CircleFunction + ?Sized>(f: &F, grid: usize) -> (f64, f64) {
    let h = TAU / grid as f64;
    let g = |t: f64| {
        let j = f.jets(t);
        j.d1 * j.d1 + j.d2 * j.d2
    };
    let vals: Vec<f64> = grid_points(grid).map(g).collect();
    let mut minima: Vec<usize> = (0..grid)
        .filter(|&i| {
            let prev = vals[(i + grid - 1) % grid];
            let next = vals[(i + 1) % grid];
            vals[i] <= prev && vals[i] <= next
        })
        .collect();
    minima.sort_by(|a, b| vals[*a].total_cmp(&vals[*b]));
    let mut best = (0.0, f64::INFINITY);
    for &i in minima.iter().take(8) {
        let t0 = h * i as f64;
        let (t, v) = golden_min(g, t0 - h, t0 + h, 60);
        let v = v.min(vals[i]);
        if v < best.1 {
            best = (crate::trig::wrap_angle(t), v);
        }
    }
    best
}

/// All critical points of `f`, verified Morse with distinct values.
pub fn critical_points<F: CircleFunction + ?Sized>(f: &F, tol: &Tolerances) -> Result<MorseProfile> {
    let b = f.derivative_bounds();
    if b[1] < 1e-14 {
        return Err(Error::ConstantFunction);
    }
    let grid = tol.grid_for(f);
    let (tmin, gmin) = immersion_minimum(f, grid);
    if gmin.sqrt() < tol.margin {
        return Err(Error::DegenerateCritical { t: tmin, second: f.jets(tmin).d2 });
    }
    let raw = raw_critical_points(f, grid, tol.root);
    if raw.is_empty() {
        return Err(Error::ConstantFunction);
    }
    if raw.len() % 2 == 1 {
        return Err(Error::BrokenAlternation);
    }
    let mut points = Vec::with_capacity(raw.len());
    for r in &raw {
        let second = r.jets.d2;
        if second.abs() < tol.margin || (second > 0.0) != r.upward {
            return Err(Error::DegenerateCritical { t: r.t, second });
        }
        points.push(CriticalPoint {
            t: r.t,
            value: r.jets.f,
            kind: if r.upward { CriticalKind::Min } else { CriticalKind::Max },
            second_deriv: second,
        });
    }
    for w in 0..points.len() {
        if points[w].kind == points[(w + 1) % points.len()].kind {
            return Err(Error::BrokenAlternation);
        }
    }
    let mut values: Vec<f64> = points.iter().map(|p| p.value).collect();
    values.sort_by(f64::total_cmp);
    for w in values.windows(2) {
        if w[1] - w[0] < tol.value_gap {
            return Err(Error::ValueCollision { a: w[0], b: w[1] });
        }
    }
    let minima_count = points.len() / 2;
    Ok(MorseProfile { points, minima_count })
}

/// Lower bounds certifying that `f` is a generic Morse function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    /// Grid minimum of `f'^2 + f''^2`.
    pub immersion: f64,
    /// `immersion` less the largest change possible between grid points.
    pub immersion_lower_bound: f64,
    /// Smallest `|f''|` at a critical point (0 without critical points).
    pub morse: f64,
    /// Smallest distance between two critical values (0 with fewer than two).
    pub value_gap: f64,
}

impl MarginReport {
    pub fn all_positive(&self, threshold: f64) -> bool {
        self.immersion_lower_bound > threshold && self.morse > threshold && self.value_gap > threshold
    }
}

pub fn genericity_margins<F: CircleFunction + ?Sized>(f: &F, grid_size: usize) -> MarginReport {
    let grid = grid_size.max(16);
    let b = f.derivative_bounds();
    let mut immersion = f64::INFINITY;
    for t in grid_points(grid) {
        let j = f.jets(t);
        immersion = immersion.min(j.d1 * j.d1 + j.d2 * j.d2);
    }
    // Between grid points a C^2 function dips at most sup|g''| h^2 / 8 below
    // the smaller endpoint; g = f'^2 + f''^2 has
    // g'' = 2 (f''^2 + f' f''' + f'''^2 + f'' f'''').
    let curvature = 2.0 * (b[2] * b[2] + b[1] * b[3] + b[3] * b[3] + b[2] * b[4]);
    let h = TAU / grid as f64;
    let pad = curvature * h * h / 8.0;
    let immersion_lower_bound = (immersion - pad).max(0.0);
    let raw = raw_critical_points(f, grid, 1e-12);
    let morse = raw.iter().map(|r| r.jets.d2.abs()).fold(f64::INFINITY, f64::min);
    let morse = if raw.is_empty() { 0.0 } else { morse };
    let mut values: Vec<f64> = raw.iter().map(|r| r.jets.f).collect();
    values.sort_by(f64::total_cmp);
    let value_gap = if values.len() < 2 {
        0.0
    } else {
        values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    };
    MarginReport { immersion, immersion_lower_bound, morse, value_gap }
}

const PERTURB_ATTEMPTS: usize = 64;

/// Seeded trigonometric polynomial of exact degree in `1..=max_degree`, with
/// coefficients uniform in `[-1, 1]` and a nonzero top harmonic. Not
/// necessarily generic; callers filter with [`critical_points`] or the
/// diagram builder.
pub fn random_trig(seed: u64, max_degree: usize) -> TrigPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_degree.max(1));
    let mut cos: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sin: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    if cos[n - 1].abs() + sin[n - 1].abs() < 0.1 {
        cos[n - 1] = 0.5;
    }
    TrigPolynomial::new(rng.gen_range(-1.0..1.0), cos, sin)
}

/// Adds a random trigonometric term of sup-norm at most `epsilon` until every
/// genericity margin clears `tol.margin`. Generic input is returned unchanged.
pub fn morse_perturb(f: &TrigPolynomial, epsilon: f64, seed: u64, tol: &Tolerances) -> Result<TrigPolynomial> {
    if !(epsilon > 0.0) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let is_generic = |g: &TrigPolynomial| {
        let grid = tol.grid_for(g);
        genericity_margins(g, grid).all_positive(tol.margin) && critical_points(g, tol).is_ok()
    };
    if !f.is_constant() && is_generic(f) {
        return Ok(f.clone());
    }
    let degree = f.degree().max(3);
    for attempt in 0..PERTURB_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut cos: Vec<f64> = (0..degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut sin: Vec<f64> = (0..degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let total: f64 = cos.iter().chain(&sin).map(|c| c.abs()).sum();
        let scale = epsilon / total;
        cos.iter_mut().chain(sin.iter_mut()).for_each(|c| *c *= scale);
        let g = f.add(&TrigPolynomial::new(0.0, cos, sin));
        if is_generic(&g) {
            return Ok(g);
        }
    }
    Err(Error::PerturbationFailed { attempts: PERTURB_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sin_t() -> TrigPolynomial {
        TrigPolynomial::new(0.0, vec![0.0], vec![1.0])
    }

    fn two_harmonic(b2: f64) -> TrigPolynomial {
        TrigPolynomial::new(0.0, vec![0.0, 0.0], vec![1.0, b2])
    }

    #[test]
    fn sine_has_one_min_one_max() {
        let p = critical_points(&sin_t(), &Tolerances::default()).unwrap();
        assert_eq!(p.minima_count, 1);
        let max = p.maxima().next().unwrap();
        let min = p.minima().next().unwrap();
        assert_abs_diff_eq!(max.t, FRAC_PI_2, epsilon = 1e-11);
        assert_abs_diff_eq!(min.t, 3.0 * FRAC_PI_2, epsilon = 1e-11);
    }

    #[test]
    fn two_harmonic_has_two_minima() {
        let p = critical_points(&two_harmonic(0.6), &Tolerances::default()).unwrap();
        assert_eq!(p.points.len(), 4);
        assert_eq!(p.minima_count, 2);
        // roots of cos t + 1.2 cos 2t, found by a dense sign-change scan
        let f = two_harmonic(0.6);
        let n = 200_000;
        let scan: Vec<f64> = (0..n)
            .filter_map(|i| {
                let (a, b) = (TAU * i as f64 / n as f64, TAU * (i + 1) as f64 / n as f64);
                ((f.jets(a).d1 > 0.0) != (f.jets(b).d1 > 0.0)).then_some(a)
            })
            .collect();
        assert_eq!(scan.len(), 4);
        for (s, p) in scan.iter().zip(&p.points) {
            assert!((s - p.t).abs() < 1e-4);
        }
    }

    #[test]
    fn tangential_root_is_degenerate() {
        // f' = (2 cos t - 1)(cos t + 1) has a double root at π
        let f = two_harmonic(0.5);
        let j = f.jets(PI);
        assert_abs_diff_eq!(j.d1, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(j.d2, 0.0, epsilon = 1e-14);
        match critical_points(&f, &Tolerances::default()) {
            Err(Error::DegenerateCritical { t, .. }) => assert!((t - PI).abs() < 1e-3),
            other => panic!("expected DegenerateCritical, got {other:?}"),
        }
    }

    #[test]
    fn constant_is_rejected() {
        let f = TrigPolynomial::constant_fn(2.0);
        assert_eq!(critical_points(&f, &Tolerances::default()), Err(Error::ConstantFunction));
    }

    #[test]
    fn margins_of_sine() {
        let m = genericity_margins(&sin_t(), 4096);
        assert_abs_diff_eq!(m.immersion, 1.0, epsilon = 1e-12);
        assert!(m.immersion_lower_bound > 0.99 && m.immersion_lower_bound <= 1.0);
        assert_abs_diff_eq!(m.morse, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.value_gap, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn margins_of_constant_are_zero() {
        let m = genericity_margins(&TrigPolynomial::constant_fn(1.0), 1024);
        assert_eq!(m.immersion, 0.0);
        assert_eq!(m.morse, 0.0);
        assert_eq!(m.value_gap, 0.0);
    }

    #[test]
    fn two_harmonic_immersion_margin_matches_fine_grid() {
        let f = two_harmonic(0.6);
        let m = genericity_margins(&f, 4096);
        let n = 1_000_000;
        let fine = (0..n)
            .map(|i| {
                let j = f.jets(TAU * i as f64 / n as f64);
                j.d1 * j.d1 + j.d2 * j.d2
            })
            .fold(f64::INFINITY, f64::min);
        assert!(fine > 0.0);
        assert!(m.immersion_lower_bound <= fine + 1e-12);
        assert!((m.immersion - fine).abs() < 1e-4);
    }

    #[test]
    fn perturb_keeps_generic_input() {
        let f = two_harmonic(0.6);
        assert_eq!(morse_perturb(&f, 0.1, 7, &Tolerances::default()).unwrap(), f);
    }

    #[test]
    fn perturb_constant_and_degenerate() {
        let tol = Tolerances::default();
        let g = morse_perturb(&TrigPolynomial::constant_fn(0.0), 0.1, 1, &tol).unwrap();
        assert!(critical_points(&g, &tol).unwrap().minima_count >= 1);
        let g = morse_perturb(&two_harmonic(0.5), 0.05, 3, &tol).unwrap();
        let m = genericity_margins(&g, tol.grid_for(&g));
        assert!(m.morse > tol.margin);
        assert!(critical_points(&g, &tol).is_ok());
    }
}
