// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Finite trigonometric series on the circle.
//!
//! A [`TrigPolynomial`] is the only source of geometry in the crate: the plane
//! curve `c(t) = (f, f')` and the space curve `C(t) = (f, f', f'')` are both
//! read off its jets, which are computed analytically.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value and first three derivatives of a function at one parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jets {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// A smooth 2π-periodic function with analytic jets.
///
/// The extraction pipeline is generic over this trait so that piecewise
/// constructions can be analyzed before they are projected to a
/// [`TrigPolynomial`].
pub trait CircleFunction: Sync {
    fn jets(&self, t: f64) -> Jets;

    /// Upper bounds on `sup |f^(k)|` for `k = 0..=4`.
    fn derivative_bounds(&self) -> [f64; 5];

    /// Highest harmonic present, used to size sampling grids.
    fn degree_hint(&self) -> usize {
        0
    }
}

/// `f(t) = a0 + Σ_{k=1..K} (a_k cos kt + b_k sin kt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionFile", into = "FunctionFile")]
pub struct TrigPolynomial {
    constant: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

/// On-disk form of a function file.
#[derive(Clone, Serialize, Deserialize)]
struct FunctionFile {
    degree: usize,
    constant: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPolynomial {
    /// Builds a series from its coefficients. The two lists are padded with
    /// zeros to a common length.
    pub fn new(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let mut cos = cos;
        let mut sin = sin;
        let k = cos.len().max(sin.len());
        cos.resize(k, 0.0);
        sin.resize(k, 0.0);
        TrigPolynomial { constant, cos, sin }
    }

    pub fn constant_fn(c: f64) -> Self {
        TrigPolynomial::new(c, vec![], vec![])
    }

    /// `amplitude * sin(k t + phase)`.
    pub fn harmonic(k: usize, amplitude: f64, phase: f64) -> Self {
        assert!(k >= 1);
        let mut cos = vec![0.0; k];
        let mut sin = vec![0.0; k];
        cos[k - 1] = amplitude * phase.sin();
        sin[k - 1] = amplitude * phase.cos();
        TrigPolynomial { constant: 0.0, cos, sin }
    }

    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|c| *c == 0.0)
    }

    pub fn padded(&self, degree: usize) -> Self {
        let mut p = self.clone();
        if degree > p.degree() {
            p.cos.resize(degree, 0.0);
            p.sin.resize(degree, 0.0);
        }
        p
    }

    /// Drops trailing harmonics whose coefficients are exactly zero.
    pub fn trimmed(&self) -> Self {
        let mut k = self.degree();
        while k > 0 && self.cos[k - 1] == 0.0 && self.sin[k - 1] == 0.0 {
            k -= 1;
        }
        TrigPolynomial {
            constant: self.constant,
            cos: self.cos[..k].to_vec(),
            sin: self.sin[..k].to_vec(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        TrigPolynomial {
            constant: self.constant * c,
            cos: self.cos.iter().map(|x| x * c).collect(),
            sin: self.sin.iter().map(|x| x * c).collect(),
        }
    }

    /// `(1 - s) * self + s * other`, coefficientwise.
    pub fn lerp(&self, other: &Self, s: f64) -> Self {
        let k = self.degree().max(other.degree());
        let a = self.padded(k);
        let b = other.padded(k);
        TrigPolynomial {
            constant: (1.0 - s) * a.constant + s * b.constant,
            cos: a.cos.iter().zip(&b.cos).map(|(x, y)| (1.0 - s) * x + s * y).collect(),
            sin: a.sin.iter().zip(&b.sin).map(|(x, y)| (1.0 - s) * x + s * y).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.degree().max(other.degree());
        let a = self.padded(k);
        let b = other.padded(k);
        TrigPolynomial {
            constant: a.constant + b.constant,
            cos: a.cos.iter().zip(&b.cos).map(|(x, y)| x + y).collect(),
            sin: a.sin.iter().zip(&b.sin).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Largest coefficient difference, treating missing harmonics as zero.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        d.cos
            .iter()
            .chain(&d.sin)
            .chain(std::iter::once(&d.constant))
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `f(t + shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        for k in 0..self.degree() {
            let (s, c) = (((k + 1) as f64) * shift).sin_cos();
            let (a, b) = (self.cos[k], self.sin[k]);
            // a cos(k(t+h)) + b sin(k(t+h))
            cos[k] = a * c + b * s;
            sin[k] = b * c - a * s;
        }
        TrigPolynomial { constant: self.constant, cos, sin }
    }

    /// The derivative as a series.
    pub fn derivative(&self) -> Self {
        let n = self.degree();
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 0..n {
            let kf = (k + 1) as f64;
            cos[k] = kf * self.sin[k];
            sin[k] = -kf * self.cos[k];
        }
        TrigPolynomial { constant: 0.0, cos, sin }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.jets(t).f
    }

    /// Jets truncated to `order` (0..=3); unused slots are zero.
    pub fn evaluate_jets(&self, t: f64, order: usize) -> Vec<f64> {
        let j = self.jets(t);
        [j.f, j.d1, j.d2, j.d3][..=order.min(3)].to_vec()
    }

    /// Least-squares projection of a sampled periodic function onto degree
    /// `degree`, with Lanczos sigma factors applied when `smooth` is set.
    ///
    /// `samples[j]` is the value at `t_j = 2πj/N`; `N` must exceed `2 * degree`.
    pub fn from_samples(samples: &[f64], degree: usize, smooth: bool) -> Self {
        let n = samples.len();
        assert!(n > 2 * degree, "need more samples than 2 * degree");
        let nf = n as f64;
        let constant = samples.iter().sum::<f64>() / nf;
        let mut cos = vec![0.0; degree];
        let mut sin = vec![0.0; degree];
        let step = TAU / nf;
        for k in 1..=degree {
            // rotate by k*step each sample
            let (sk, ck) = ((k as f64) * step).sin_cos();
            let (mut c, mut s) = (1.0f64, 0.0f64);
            let (mut ac, mut as_) = (0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                if j % 64 == 0 {
                    let ang = (k as f64) * step * (j as f64);
                    s = ang.sin();
                    c = ang.cos();
                }
                ac += v * c;
                as_ += v * s;
                let nc = c * ck - s * sk;
                s = s * ck + c * sk;
                c = nc;
            }
            let mut sigma = 1.0;
            if smooth {
                let x = std::f64::consts::PI * (k as f64) / ((degree + 1) as f64);
                sigma = x.sin() / x;
            }
            cos[k - 1] = 2.0 * ac / nf * sigma;
            sin[k - 1] = 2.0 * as_ / nf * sigma;
        }
        TrigPolynomial { constant, cos, sin }
    }

    /// Projects any periodic function sampled at `n` points.
    pub fn project<F: Fn(f64) -> f64>(f: F, n: usize, degree: usize, smooth: bool) -> Self {
        let samples: Vec<f64> = (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect();
        TrigPolynomial::from_samples(&samples, degree, smooth)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("function file serializes")
    }

    /// Parses a function file. The declared degree must match both lists and
    /// every coefficient must be finite.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl From<TrigPolynomial> for FunctionFile {
    fn from(f: TrigPolynomial) -> Self {
        FunctionFile { degree: f.degree(), constant: f.constant, cos: f.cos, sin: f.sin }
    }
}

impl TryFrom<FunctionFile> for TrigPolynomial {
    type Error = Error;

    fn try_from(file: FunctionFile) -> Result<Self> {
        if file.cos.len() != file.degree || file.sin.len() != file.degree {
            return Err(Error::Parse(format!(
                "degree {} but {} cos and {} sin coefficients",
                file.degree,
                file.cos.len(),
                file.sin.len()
            )));
        }
        let all = file.cos.iter().chain(&file.sin).chain(std::iter::once(&file.constant));
        if all.clone().any(|c| !c.is_finite()) {
            return Err(Error::Parse("non-finite coefficient".into()));
        }
        Ok(TrigPolynomial { constant: file.constant, cos: file.cos, sin: file.sin })
    }
}

impl CircleFunction for TrigPolynomial {
    fn jets(&self, t: f64) -> Jets {
        let (s1, c1) = t.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut out = Jets { f: self.constant, ..Jets::default() };
        for k in 0..self.degree() {
            if k > 0 && k % 32 == 0 {
                let (ss, cc) = (((k + 1) as f64) * t).sin_cos();
                s = ss;
                c = cc;
            }
            let kf = (k + 1) as f64;
            let (a, b) = (self.cos[k], self.sin[k]);
            let even = a * c + b * s;
            let odd = b * c - a * s;
            out.f += even;
            out.d1 += kf * odd;
            out.d2 -= kf * kf * even;
            out.d3 -= kf * kf * kf * odd;
            let ns = s * c1 + c * s1;
            c = c * c1 - s * s1;
            s = ns;
        }
        out
    }

    fn degree_hint(&self) -> usize {
        self.degree()
    }

    fn derivative_bounds(&self) -> [f64; 5] {
        let mut b = [self.constant.abs(), 0.0, 0.0, 0.0, 0.0];
        for k in 0..self.degree() {
            let amp = self.cos[k].hypot(self.sin[k]);
            let kf = (k + 1) as f64;
            b[0] += amp;
            b[1] += kf * amp;
            b[2] += kf * kf * amp;
            b[3] += kf * kf * kf * amp;
            b[4] += kf * kf * kf * kf * amp;
        }
        b
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sin_t() -> TrigPolynomial {
        TrigPolynomial::new(0.0, vec![0.0], vec![1.0])
    }

    #[test]
    fn jets_of_sine_at_zero() {
        let j = sin_t().evaluate_jets(0.0, 2);
        assert_eq!(j.len(), 3);
        assert_abs_diff_eq!(j[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jets_of_constant() {
        let f = TrigPolynomial::constant_fn(3.0);
        assert_eq!(f.evaluate_jets(1.234, 2), vec![3.0, 0.0, 0.0]);
    }

    #[test]
    fn two_harmonic_jets_match_closed_form() {
        // sin t + 0.6 sin 2t at π/2: f = 1, f' = 1.2 cos π = -1.2, f'' = -1
        let f = TrigPolynomial::new(0.0, vec![0.0, 0.0], vec![1.0, 0.6]);
        let j = f.jets(FRAC_PI_2);
        assert_abs_diff_eq!(j.f, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(j.d1, -1.2, epsilon = 1e-14);
        assert_abs_diff_eq!(j.d2, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn high_degree_recurrence_stays_accurate() {
        let k = 150;
        let f = TrigPolynomial::harmonic(k, 1.0, 0.3);
        for &t in &[0.1, 1.7, 3.3, 6.2] {
            let exact = ((k as f64) * t + 0.3).sin();
            assert_abs_diff_eq!(f.eval(t), exact, epsilon = 1e-11);
        }
    }

    #[test]
    fn shift_matches_evaluation() {
        let f = TrigPolynomial::new(0.5, vec![0.2, -0.4, 0.1], vec![1.0, 0.3, -0.7]);
        let g = f.shifted(0.77);
        for &t in &[0.0, 1.0, 2.5, 5.9] {
            assert_abs_diff_eq!(g.eval(t), f.eval(t + 0.77), epsilon = 1e-13);
        }
    }

    #[test]
    fn projection_recovers_polynomial() {
        let f = TrigPolynomial::new(0.5, vec![0.2, -0.4, 0.1], vec![1.0, 0.3, -0.7]);
        let g = TrigPolynomial::project(|t| f.eval(t), 64, 3, false);
        assert!(f.max_coeff_distance(&g) < 1e-13);
    }

    #[test]
    fn json_rejects_degree_mismatch() {
        let text = r#"{"degree": 2, "constant": 0, "cos": [1], "sin": [0, 1]}"#;
        assert!(matches!(TrigPolynomial::from_json(text), Err(Error::Parse(_))));
    }

    #[test]
    fn json_round_trip() {
        let f = TrigPolynomial::new(0.5, vec![0.2, PI], vec![1.0, -1e-300]);
        assert_eq!(TrigPolynomial::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn periodicity() {
        let f = TrigPolynomial::new(0.1, vec![0.2, -0.4, 0.1], vec![1.0, 0.3, -0.7]);
        for &t in &[0.3, 2.0, 4.4] {
            assert_abs_diff_eq!(f.eval(t), f.eval(t + TAU), epsilon = 1e-13);
        }
    }
}
