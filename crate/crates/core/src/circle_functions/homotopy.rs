// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Explicit holonomic regular homotopies between functions with the same
//! number of minima.
//!
//! A homotopy from `g` to `f` has two stages. The first reparameterizes `g` by
//! a family of degree-one circle diffeomorphisms `φ_s` until its critical points
//! sit on those of `f`. The second slides the graph of the aligned function
//! `ĝ` onto the graph of `f` by `ĝ + ρ (f - ĝ)`; when both share critical
//! points and kinds, `f'` and `ĝ'` have the same sign away from them and the
//! family stays immersed.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{critical_points, grid_points, CriticalPoint, Tolerances};
use crate::error::{Error, Result};
use crate::trig::{CircleFunction, TrigPolynomial};

/// `s ↦ Proj(g ∘ φ_s)` with `φ_s(t) = t + s · offset(t)`.
#[derive(Clone, Debug)]
pub struct AlignmentStage {
    pub g: TrigPolynomial,
    pub offset: TrigPolynomial,
    pub degree: usize,
}

/// `ρ ↦ from + ρ (to - from)`.
#[derive(Clone, Debug)]
pub struct FlowStage {
    pub from: TrigPolynomial,
    pub to: TrigPolynomial,
}

#[derive(Clone, Debug)]
pub enum Stage {
    Alignment(AlignmentStage),
    Flow(FlowStage),
}

impl AlignmentStage {
    pub fn diffeo(&self, s: f64, t: f64) -> f64 {
        t + s * self.offset.eval(t)
    }

    pub fn member(&self, s: f64) -> TrigPolynomial {
        if s == 0.0 {
            return self.g.padded(self.degree);
        }
        let n = 16 * self.degree + 64;
        TrigPolynomial::project(|t| self.g.eval(self.diffeo(s, t)), n, self.degree, false)
    }
}

impl Stage {
    pub fn member(&self, s: f64) -> TrigPolynomial {
        match self {
            Stage::Alignment(a) => a.member(s),
            Stage::Flow(fl) => fl.from.lerp(&fl.to, s),
        }
    }

    /// Smallest `f'^2 + f''^2` over an `s_samples x t_samples` grid, with the
    /// location where it occurs.
    pub fn immersion_margin(&self, s_samples: usize, t_samples: usize) -> (f64, f64, f64) {
        (0..s_samples)
            .into_par_iter()
            .map(|i| {
                let s = i as f64 / (s_samples - 1).max(1) as f64;
                let h = self.member(s);
                grid_points(t_samples)
                    .map(|t| {
                        let j = h.jets(t);
                        (j.d1 * j.d1 + j.d2 * j.d2, s, t)
                    })
                    .fold((f64::INFINITY, 0.0, 0.0), |a, b| if b.0 < a.0 { b } else { a })
            })
            .reduce(|| (f64::INFINITY, 0.0, 0.0), |a, b| if b.0 < a.0 { b } else { a })
    }
}

/// Concatenated stages; the path runs from `g` to `f`.
#[derive(Clone, Debug)]
pub struct HomotopyPath {
    pub stages: Vec<Stage>,
    pub sample_grid: usize,
}

impl HomotopyPath {
    pub fn start(&self) -> TrigPolynomial {
        self.stages.first().map(|s| s.member(0.0)).expect("nonempty path")
    }

    pub fn end(&self) -> TrigPolynomial {
        self.stages.last().map(|s| s.member(1.0)).expect("nonempty path")
    }

    /// Largest coefficient mismatch between consecutive stage endpoints.
    pub fn joint_error(&self) -> f64 {
        self.stages
            .windows(2)
            .map(|w| w[0].member(1.0).max_coeff_distance(&w[1].member(0.0)))
            .fold(0.0, f64::max)
    }

    pub fn min_immersion_margin(&self, s_samples: usize, t_samples: usize) -> f64 {
        self.stages
            .iter()
            .map(|st| st.immersion_margin(s_samples, t_samples).0)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fritsch–Carlson monotone cubic through increasing knots.
struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            m[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                let (w1, w2) = (2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]), (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]));
                (w1 + w2) / (w1 / d[i - 1] + w2 / d[i])
            };
        }
        MonotoneCubic { x, y, m }
    }

    fn eval(&self, t: f64) -> f64 {
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= self.x.len() => self.x.len() - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u),
            u * (1.0 - u) * (1.0 - u),
            u * u * (3.0 - 2.0 * u),
            u * u * (u - 1.0),
        );
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }
}

/// Offsets `d_i` with `p_i + d_i` the matched critical parameter of `g`, for
/// the cyclic matching of equal kinds with least squared displacement.
fn match_critical_sets(fp: &[CriticalPoint], gp: &[CriticalPoint]) -> Vec<f64> {
    let n = fp.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..n {
        if gp[r].kind != fp[0].kind {
            continue;
        }
        let mut d: Vec<f64> = (0..n)
            .map(|i| {
                let k = i + r;
                gp[k % n].t + TAU * (k / n) as f64 - fp[i].t
            })
            .collect();
        let mean = d.iter().sum::<f64>() / n as f64;
        let shift = TAU * (mean / TAU).round();
        d.iter_mut().for_each(|x| *x -= shift);
        let cost: f64 = d.iter().map(|x| x * x).sum();
        if best.as_ref().map_or(true, |b| cost < b.0) {
            best = Some((cost, d));
        }
    }
    best.expect("profiles share a kind").1
}

/// Family of reparameterizations carrying the critical set of `g` onto that
/// of `f` with matching kinds.
pub fn align_critical_points(f: &TrigPolynomial, g: &TrigPolynomial, tol: &Tolerances) -> Result<AlignmentStage> {
    let pf = critical_points(f, tol)?;
    let pg = critical_points(g, tol)?;
    if pf.minima_count != pg.minima_count {
        return Err(Error::MismatchedProfiles { left: pf.minima_count, right: pg.minima_count });
    }
    let degree = 4 * f.degree().max(g.degree()).max(1);
    let d = match_critical_sets(&pf.points, &pg.points);
    let n = d.len();
    if d.iter().all(|x| (x - d[0]).abs() < 1e-12) {
        // a rigid rotation is exact
        return Ok(AlignmentStage {
            g: g.clone(),
            offset: TrigPolynomial::constant_fn(d[0]),
            degree: degree.max(g.degree()),
        });
    }
    let mut xs = Vec::with_capacity(n + 4);
    let mut ys = Vec::with_capacity(n + 4);
    for wrap in [-1.0, 0.0, 1.0] {
        for i in 0..n {
            xs.push(pf.points[i].t + wrap * TAU);
            ys.push(pf.points[i].t + d[i] + wrap * TAU);
        }
    }
    let lift = MonotoneCubic::new(xs, ys);
    let samples = 4096;
    let offset_degree = 4 * n + 8;
    let raw = TrigPolynomial::project(|t| lift.eval(t) - t, samples, offset_degree, false);
    // Gaussian damping is convolution with a positive kernel, so φ' stays positive.
    let kc = offset_degree as f64 / 3.0;
    let damp = |k: usize| (-((k as f64 / kc).powi(2))).exp();
    let cos = raw.cos_coeffs().iter().enumerate().map(|(k, c)| c * damp(k + 1)).collect();
    let sin = raw.sin_coeffs().iter().enumerate().map(|(k, c)| c * damp(k + 1)).collect();
    let offset = TrigPolynomial::new(raw.constant(), cos, sin);
    let min_slope = grid_points(4096).map(|t| 1.0 + offset.jets(t).d1).fold(f64::INFINITY, f64::min);
    if min_slope <= 0.0 {
        return Err(Error::Precondition("alignment diffeomorphism is not monotone".into()));
    }
    Ok(AlignmentStage { g: g.clone(), offset, degree })
}

/// Straight-line graph flow from `g_hat` to `f`, verified immersed on a
/// `samples x samples` grid.
pub fn graph_flow(f: &TrigPolynomial, g_hat: &TrigPolynomial, samples: usize, tol: &Tolerances) -> Result<FlowStage> {
    let stage = FlowStage { from: g_hat.clone(), to: f.clone() };
    let (margin, s, t) = Stage::Flow(stage.clone()).immersion_margin(samples, samples);
    if !(margin > tol.margin) {
        return Err(Error::ImmersionLost { s, t });
    }
    Ok(stage)
}

/// Holonomic regular homotopy from `g` to `f`; refuses unequal Whitney index.
pub fn regular_homotopy(f: &TrigPolynomial, g: &TrigPolynomial, samples: usize, tol: &Tolerances) -> Result<HomotopyPath> {
    let align = align_critical_points(f, g, tol)?;
    let g_hat = align.member(1.0);
    let flow = graph_flow(f, &g_hat, samples, tol)?;
    let path = HomotopyPath { stages: vec![Stage::Alignment(align), Stage::Flow(flow)], sample_grid: samples };
    let (margin, s, t) = path.stages[0].immersion_margin(samples, samples);
    if !(margin > tol.margin) {
        return Err(Error::ImmersionLost { s, t });
    }
    Ok(path)
}
