// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Piecewise blueprints for circle functions with prescribed critical values.
//!
//! A [`Design`] runs monotonically between consecutive critical values
//! `v_0 < v_1 > v_2 < ...` (the first value is a minimum). On a piece of
//! length `L` the derivative is
//!
//! `f'(τ) = A sin(πτ/L) (1 + ε cos(2πqτ/L))`
//!
//! with `A` fixed by the value increment. Without a wave (`ε = 0`) and with
//! equal piece lengths every arc of `c = (f, f')` is a half ellipse of one
//! fixed aspect ratio, so two arcs of a family meet exactly once when their
//! spans interleave and never otherwise. [`Design::predicted_crossings`]
//! exploits this. Blueprints are only `C^1` at the junctions and are turned
//! into trigonometric polynomials with [`Design::to_trig`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::diagram::spans_interleave;
use crate::error::{Error, Result};
use crate::trig::{CircleFunction, Jets, TrigPolynomial};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amplitude: f64,
    pub frequency: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Design {
    values: Vec<f64>,
    lengths: Vec<f64>,
    waves: Vec<Wave>,
    starts: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    start: f64,
    value: f64,
    len: f64,
    amp: f64,
    eps: f64,
    w1: f64,
    w2: f64,
}

impl Piece {
    fn jets(&self, tau: f64) -> Jets {
        let a = PI / self.len;
        let (s, c) = (a * tau).sin_cos();
        let mut j = Jets { f: (1.0 - c) / a, d1: s, d2: a * c, d3: -a * a * s };
        if self.eps != 0.0 {
            let h = 0.5 * self.eps;
            for w in [self.w1, self.w2] {
                let (s, c) = (w * tau).sin_cos();
                j.f += h * (1.0 - c) / w;
                j.d1 += h * s;
                j.d2 += h * w * c;
                j.d3 -= h * w * w * s;
            }
        }
        Jets { f: self.value + self.amp * j.f, d1: self.amp * j.d1, d2: self.amp * j.d2, d3: self.amp * j.d3 }
    }
}

impl Design {
    /// Critical values alternate min, max, min, ...; `lengths` sum to 2π.
    pub fn new(values: Vec<f64>, lengths: Vec<f64>, waves: Vec<Wave>) -> Result<Self> {
        let n = values.len();
        if n < 2 || n % 2 != 0 {
            return Err(Error::Precondition(format!("need an even number of critical values, got {n}")));
        }
        if lengths.len() != n || waves.len() != n {
            return Err(Error::Precondition("one length and one wave per piece".into()));
        }
        for j in 0..n {
            let rise = values[(j + 1) % n] - values[j];
            let ok = if j % 2 == 0 { rise > 0.0 } else { rise < 0.0 };
            if !ok {
                return Err(Error::BrokenAlternation);
            }
            if !(lengths[j] > 0.0) {
                return Err(Error::Precondition("piece lengths must be positive".into()));
            }
            if waves[j].amplitude.abs() >= 1.0 || (waves[j].amplitude != 0.0 && waves[j].frequency == 0) {
                return Err(Error::Precondition("wave amplitude must lie in (-1, 1) with positive frequency".into()));
            }
        }
        let total: f64 = lengths.iter().sum();
        let lengths: Vec<f64> = lengths.iter().map(|l| l * TAU / total).collect();
        let mut starts = Vec::with_capacity(n);
        let mut acc = 0.0;
        for l in &lengths {
            starts.push(acc);
            acc += l;
        }
        Ok(Design { values, lengths, waves, starts })
    }

    /// Equal lengths, no waves.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Design::new(values, vec![1.0; n], vec![Wave::default(); n])
    }

    /// Minima `a` and maxima `b`, interleaved as `a_1 b_1 a_2 b_2 ...`.
    pub fn from_extrema(minima: &[f64], maxima: &[f64]) -> Result<Self> {
        if minima.len() != maxima.len() {
            return Err(Error::Precondition("as many minima as maxima".into()));
        }
        Design::from_values(minima.iter().zip(maxima).flat_map(|(a, b)| [*a, *b]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn waves(&self) -> &[Wave] {
        &self.waves
    }

    pub fn minima_count(&self) -> usize {
        self.values.len() / 2
    }

    /// Piece start parameters; piece `j` starts at a critical point.
    pub fn critical_parameters(&self) -> &[f64] {
        &self.starts
    }

    fn piece(&self, j: usize) -> Piece {
        let n = self.values.len();
        let len = self.lengths[j];
        let Wave { amplitude: eps, frequency: q } = self.waves[j];
        let q = q as f64;
        let rise = self.values[(j + 1) % n] - self.values[j];
        let gain = if eps != 0.0 { 1.0 + eps / (1.0 - 4.0 * q * q) } else { 1.0 };
        let amp = rise * PI / (2.0 * len * gain);
        Piece {
            start: self.starts[j],
            value: self.values[j],
            len,
            amp,
            eps,
            w1: PI * (1.0 + 2.0 * q) / len,
            w2: PI * (1.0 - 2.0 * q) / len,
        }
    }

    fn locate(&self, t: f64) -> usize {
        match self.starts.binary_search_by(|s| s.total_cmp(&t)) {
            Ok(j) => j,
            Err(j) => j - 1,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.jets(t).f
    }

    /// Trigonometric projection with Lanczos smoothing.
    pub fn to_trig(&self, degree: usize) -> TrigPolynomial {
        let n = (16 * degree).max(4096);
        TrigPolynomial::project(|t| self.eval(t), n, degree, true).trimmed()
    }

    /// A projection degree that keeps the smoothed corners small relative to
    /// the narrowest piece.
    pub fn default_degree(&self) -> usize {
        let shortest = self.lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let q = self.waves.iter().map(|w| w.frequency).max().unwrap_or(0) as f64;
        ((6.0 * TAU / shortest) * (1.0 + q)).ceil() as usize
    }

    /// Crossing counts of the half-ellipse model, as `(upper pairs, lower
    /// pairs)` of 0-based arc indices counted from the first piece. Only
    /// meaningful for equal lengths and no waves.
    pub fn predicted_crossings(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let m = self.minima_count();
        let v = &self.values;
        let span = |a: f64, b: f64| (a.min(b), a.max(b));
        let x = |i: usize| span(v[2 * i], v[2 * i + 1]);
        let y = |i: usize| span(v[2 * i + 1], v[(2 * i + 2) % v.len()]);
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                if spans_interleave(x(i), x(j)) {
                    upper.push((i, j));
                }
                if spans_interleave(y(i), y(j)) {
                    lower.push((i, j));
                }
            }
        }
        (upper, lower)
    }
}

impl CircleFunction for Design {
    fn jets(&self, t: f64) -> Jets {
        let t = t.rem_euclid(TAU);
        let j = self.locate(t);
        let p = self.piece(j);
        p.jets(t - p.start)
    }

    fn derivative_bounds(&self) -> [f64; 5] {
        let mut b = [0.0f64; 5];
        for j in 0..self.values.len() {
            let p = self.piece(j);
            let a = PI / p.len;
            let h = 0.5 * p.eps.abs();
            let amp = p.amp.abs();
            b[0] = b[0].max(self.values[j].abs());
            for k in 1..5 {
                let kk = (k - 1) as i32;
                let mut s = a.powi(kk);
                if p.eps != 0.0 {
                    s += h * (p.w1.abs().powi(kk) + p.w2.abs().powi(kk));
                }
                b[k] = b[k].max(amp * s);
            }
        }
        b
    }

    fn degree_hint(&self) -> usize {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hits_critical_values() {
        let d = Design::from_values(vec![0.0, 10.0, 5.0, 15.0]).unwrap();
        for (t, v) in d.critical_parameters().iter().zip(d.values()) {
            assert!((d.eval(*t) - v).abs() < 1e-12);
            assert!(d.jets(*t).d1.abs() < 1e-12);
        }
        assert!((d.eval(TAU - 1e-12) - 0.0).abs() < 1e-9);
    }

    #[test]
    fn wave_pieces_integrate_to_increment() {
        let d = Design::new(
            vec![0.0, 3.0, 1.0, 4.0],
            vec![1.0, 2.0, 1.0, 1.5],
            vec![
                Wave { amplitude: 0.4, frequency: 1 },
                Wave::default(),
                Wave { amplitude: -0.3, frequency: 2 },
                Wave::default(),
            ],
        )
        .unwrap();
        let cps = d.critical_parameters().to_vec();
        for (j, t) in cps.iter().enumerate() {
            let end = cps.get(j + 1).copied().unwrap_or(TAU) - 1e-12;
            let next = d.values()[(j + 1) % 4];
            assert!((d.eval(end) - next).abs() < 1e-8, "piece {j}");
            // derivative by central differences
            let s = t + 0.3;
            let fd = (d.eval(s + 1e-6) - d.eval(s - 1e-6)) / 2e-6;
            assert!((fd - d.jets(s).d1).abs() < 1e-5);
            let fd2 = (d.jets(s + 1e-6).d1 - d.jets(s - 1e-6).d1) / 2e-6;
            assert!((fd2 - d.jets(s).d2).abs() < 1e-5);
        }
    }

    #[test]
    fn rejects_broken_alternation() {
        assert_eq!(Design::from_values(vec![0.0, 1.0, 2.0, 3.0]), Err(Error::BrokenAlternation));
    }

    #[test]
    fn predicted_crossings_of_interleaved_pair() {
        let d = Design::from_extrema(&[0.0, 5.0], &[10.0, 15.0]).unwrap();
        let (up, low) = d.predicted_crossings();
        assert_eq!(up, vec![(0, 1)]);
        // Y spans [5,10] and [0,15] nest
        assert!(low.is_empty());
    }
}
