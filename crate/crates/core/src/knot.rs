// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Planar diagram codes, the Kauffman bracket, the Jones polynomial and a
//! small identification table.
//!
//! A crossing `X[a, b, c, d]` lists its four edge labels counterclockwise
//! starting from the incoming under-edge `a`, so `c` is the outgoing
//! under-edge. The crossing is positive when the over-strand runs `d → b`.
//! Edges are labelled `1..=2n` in traversal order; edge `k` enters the
//! `k`-th passage.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{Branch, FramedDiagram};
use crate::error::{Error, Result};

/// Largest code the state sum accepts.
pub const MAX_CROSSINGS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdCrossing {
    pub ends: [usize; 4],
    pub sign: i8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingCode {
    pub crossings: Vec<PdCrossing>,
}

impl CrossingCode {
    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    /// Every label in `1..=2n` must occur exactly twice.
    pub fn check(&self) -> Result<()> {
        let n = 2 * self.crossings.len();
        let mut seen = vec![0u8; n + 1];
        for c in &self.crossings {
            for &e in &c.ends {
                if e == 0 || e > n {
                    return Err(Error::Parse(format!("edge label {e} outside 1..={n}")));
                }
                seen[e] += 1;
            }
        }
        if let Some(e) = (1..=n).find(|&e| seen[e] != 2) {
            return Err(Error::Parse(format!("edge label {e} occurs {} times", seen[e])));
        }
        Ok(())
    }

    /// Parses `X[a,b,c,d]` groups, optionally wrapped in `PD[...]`. Signs are
    /// read from the labels of the over-strand.
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.trim();
        let body = body
            .strip_prefix("PD[")
            .and_then(|b| b.strip_suffix(']'))
            .unwrap_or(body);
        let mut raw = Vec::new();
        let mut rest = body;
        loop {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
            if rest.is_empty() {
                break;
            }
            let inner = rest
                .strip_prefix("X[")
                .ok_or_else(|| Error::Parse(format!("expected X[ at {:?}", truncate(rest))))?;
            let close = inner.find(']').ok_or_else(|| Error::Parse("unterminated X[".into()))?;
            let nums: Vec<usize> = inner[..close]
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("{e} in {:?}", s.trim()))))
                .collect::<Result<_>>()?;
            let ends: [usize; 4] = nums
                .try_into()
                .map_err(|v: Vec<usize>| Error::Parse(format!("crossing with {} labels", v.len())))?;
            raw.push(ends);
            rest = &inner[close + 1..];
        }
        let n = 2 * raw.len();
        let unsigned = CrossingCode { crossings: raw.iter().map(|&ends| PdCrossing { ends, sign: 1 }).collect() };
        unsigned.check()?;
        let crossings = raw
            .into_iter()
            .map(|ends| {
                let [a, b, _, d] = ends;
                let positive = if n == 2 { a == b } else { (b + n - d) % n == 1 };
                PdCrossing { ends, sign: if positive { 1 } else { -1 } }
            })
            .collect();
        let code = CrossingCode { crossings };
        Ok(code)
    }
}

fn truncate(s: &str) -> &str {
    match s.char_indices().nth(16) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

impl fmt::Display for CrossingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .crossings
            .iter()
            .map(|c| format!("X[{},{},{},{}]", c.ends[0], c.ends[1], c.ends[2], c.ends[3]))
            .collect();
        write!(f, "PD[{}]", parts.join(", "))
    }
}

/// Reads the code off a diagram by walking the curve from `t = 0`.
pub fn to_crossing_code(d: &FramedDiagram) -> CrossingCode {
    let n = d.crossings.len();
    if n == 0 {
        return CrossingCode::default();
    }
    // (t, crossing, is_over)
    let mut passages: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * n);
    for (k, c) in d.crossings.iter().enumerate() {
        passages.push((c.t_a, k, c.over_branch == Branch::A));
        passages.push((c.t_b, k, c.over_branch == Branch::B));
    }
    passages.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total = 2 * n;
    let mut under = vec![(0usize, 0usize); n];
    let mut over = vec![(0usize, 0usize); n];
    for (p, &(_, k, is_over)) in passages.iter().enumerate() {
        let incoming = if p == 0 { total } else { p };
        let outgoing = p + 1;
        if is_over {
            over[k] = (incoming, outgoing);
        } else {
            under[k] = (incoming, outgoing);
        }
    }
    let crossings = (0..n)
        .map(|k| {
            let sign = d.crossings[k].sign;
            let ((ui, uo), (oi, oo)) = (under[k], over[k]);
            let ends = if sign > 0 { [ui, oo, uo, oi] } else { [ui, oi, uo, oo] };
            PdCrossing { ends, sign }
        })
        .collect();
    CrossingCode { crossings }
}

/// The mirror image: every crossing changes over and under.
pub fn mirror(code: &CrossingCode) -> CrossingCode {
    CrossingCode {
        crossings: code
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.ends;
                PdCrossing { ends: [d, a, b, cc], sign: -c.sign }
            })
            .collect(),
    }
}

/// Integer Laurent polynomial in one variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, i64>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(exp: i64, coeff: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, coeff: i64) {
        let v = self.terms.entry(exp).or_insert(0);
        *v += coeff;
        if *v == 0 {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn coeff(&self, exp: i64) -> i64 {
        self.terms.get(&exp).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in other.terms() {
            p.add_term(e, c);
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                p.add_term(a + b, x * y);
            }
        }
        p
    }

    /// `p(x) ↦ p(1/x)`.
    pub fn invert_variable(&self) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (-e, c)))
    }

    /// Divides every exponent by `k`; `None` unless all are divisible.
    pub fn compress(&self, k: i64) -> Option<Self> {
        if self.terms().any(|(e, _)| e % k != 0) {
            return None;
        }
        Some(Self::from_terms(self.terms().map(|(e, c)| (e / k, c))))
    }

    /// Renders as `-t^-4 + t^-3 + t^-1`, ascending exponents.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            match (e, mag) {
                (0, _) => out.push_str(&mag.to_string()),
                (_, 1) => {}
                _ => out.push_str(&mag.to_string()),
            }
            match e {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{e}")),
            }
        }
        out
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra] = rb;
    }
}

/// State sum `⟨D⟩ = Σ_s A^{a(s) - b(s)} (-A^2 - A^-2)^{|s| - 1}` in the
/// variable `A`. The A-smoothing joins `a` with `b` and `c` with `d`.
pub fn kauffman_bracket(code: &CrossingCode) -> Result<LaurentPolynomial> {
    let n = code.crossings.len();
    if n > MAX_CROSSINGS {
        return Err(Error::TooManyCrossings(n));
    }
    if n == 0 {
        return Ok(LaurentPolynomial::one());
    }
    code.check()?;
    let labels = 2 * n;
    // (A-count minus B-count, loops) -> multiplicity
    let counts: BTreeMap<(i64, usize), i64> = (0u32..(1u32 << n))
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc, state| {
            let mut parent: Vec<usize> = (0..=labels).collect();
            let mut a_minus_b = 0i64;
            for (k, c) in code.crossings.iter().enumerate() {
                let [a, b, cc, d] = c.ends;
                if state >> k & 1 == 0 {
                    union(&mut parent, a, b);
                    union(&mut parent, cc, d);
                    a_minus_b += 1;
                } else {
                    union(&mut parent, a, d);
                    union(&mut parent, b, cc);
                    a_minus_b -= 1;
                }
            }
            let loops = (1..=labels).filter(|&e| find(&mut parent, e) == e).count();
            *acc.entry((a_minus_b, loops)).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut x, y| {
            for (k, v) in y {
                *x.entry(k).or_insert(0) += v;
            }
            x
        });
    let delta = LaurentPolynomial::from_terms([(2, -1), (-2, -1)]);
    let max_loops = counts.keys().map(|k| k.1).max().unwrap_or(1);
    let mut powers = vec![LaurentPolynomial::one()];
    for _ in 1..max_loops {
        let next = powers.last().unwrap().mul(&delta);
        powers.push(next);
    }
    let mut total = LaurentPolynomial::zero();
    for ((amb, loops), mult) in counts {
        let term = LaurentPolynomial::monomial(amb, mult).mul(&powers[loops - 1]);
        total = total.add(&term);
    }
    Ok(total)
}

/// Jones polynomial in `t = A^-4`, normalized by the writhe.
pub fn jones(code: &CrossingCode) -> Result<LaurentPolynomial> {
    let bracket = kauffman_bracket(code)?;
    let w = code.writhe();
    let sign = if w % 2 == 0 { 1 } else { -1 };
    let normalized = bracket.mul(&LaurentPolynomial::monomial(-3 * w, sign));
    normalized
        .compress(-4)
        .ok_or_else(|| Error::Parse("bracket exponents not congruent mod 4".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub name: String,
    pub mirror: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotTableEntry {
    pub name: String,
    pub jones: Vec<(i64, i64)>,
    pub mirror_jones: Vec<(i64, i64)>,
    pub genus: u32,
    pub braid_index: u32,
    pub reference_pd: Option<String>,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

impl KnotTableEntry {
    pub fn jones_poly(&self) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(self.jones.iter().copied())
    }

    pub fn mirror_poly(&self) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(self.mirror_jones.iter().copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotTable {
    pub entries: Vec<KnotTableEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub name: String,
    /// True when the code matches the mirror column.
    pub mirrored: bool,
    pub genus: u32,
    pub braid_index: u32,
    pub jones: String,
}

impl KnotTable {
    pub fn from_json(text: &str) -> Result<Self> {
        let table: KnotTable = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for e in &table.entries {
            for (exp, c) in e.jones.iter().chain(&e.mirror_jones) {
                if *c == 0 || exp.unsigned_abs() > 1 << 20 {
                    return Err(Error::Parse(format!("bad term ({exp}, {c}) in {}", e.name)));
                }
            }
        }
        Ok(table)
    }

    /// The table shipped with the crate.
    pub fn builtin() -> &'static KnotTable {
        static TABLE: OnceLock<KnotTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            KnotTable::from_json(include_str!("../data/knot_table.json")).expect("built-in knot table parses")
        })
    }

    pub fn get(&self, name: &str) -> Option<&KnotTableEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn lookup(&self, v: &LaurentPolynomial) -> Option<Identification> {
        self.entries.iter().find_map(|e| {
            let mirrored = if *v == e.jones_poly() {
                false
            } else if *v == e.mirror_poly() {
                true
            } else {
                return None;
            };
            Some(Identification {
                name: e.name.clone(),
                mirrored,
                genus: e.genus,
                braid_index: e.braid_index,
                jones: v.to_string(),
            })
        })
    }

    /// Recomputes every stored polynomial from reference codes and factor
    /// lists. Returns one line per failed check.
    pub fn self_test(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for e in &self.entries {
            if e.mirror_poly() != e.jones_poly().invert_variable() {
                failures.push(format!("{}: mirror column is not the inverted polynomial", e.name));
            }
            if let Some(pd) = &e.reference_pd {
                match CrossingCode::parse(pd).and_then(|c| Ok((jones(&c)?, jones(&mirror(&c))?))) {
                    Ok((v, mv)) => {
                        if v != e.jones_poly() {
                            failures.push(format!("{}: reference code gives {v}", e.name));
                        }
                        if mv != e.mirror_poly() {
                            failures.push(format!("{}: mirrored reference code gives {mv}", e.name));
                        }
                    }
                    Err(err) => failures.push(format!("{}: {err}", e.name)),
                }
            }
            if !e.factors.is_empty() {
                let mut product = LaurentPolynomial::one();
                for f in &e.factors {
                    match self.get(&f.name) {
                        Some(x) => product = product.mul(&if f.mirror { x.mirror_poly() } else { x.jones_poly() }),
                        None => failures.push(format!("{}: unknown factor {}", e.name, f.name)),
                    }
                }
                if product != e.jones_poly() {
                    failures.push(format!("{}: factor product gives {product}", e.name));
                }
            }
        }
        failures
    }
}

/// Matches the Jones polynomial of `code` against the built-in table.
pub fn identify(code: &CrossingCode) -> Result<Option<Identification>> {
    Ok(KnotTable::builtin().lookup(&jones(code)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(i64, i64)]) -> LaurentPolynomial {
        LaurentPolynomial::from_terms(terms.iter().copied())
    }

    #[test]
    fn empty_code() {
        let c = CrossingCode::default();
        assert_eq!(kauffman_bracket(&c).unwrap(), LaurentPolynomial::one());
        assert_eq!(identify(&c).unwrap().unwrap().name, "unknot");
    }

    #[test]
    fn left_trefoil_reference() {
        let c = CrossingCode::parse("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap();
        assert_eq!(c.writhe(), -3);
        assert_eq!(jones(&c).unwrap(), poly(&[(-4, -1), (-3, 1), (-1, 1)]));
        assert_eq!(jones(&mirror(&c)).unwrap(), poly(&[(1, 1), (3, 1), (4, -1)]));
    }

    #[test]
    fn single_kinks_are_unknots() {
        for text in ["X[1,1,2,2]", "X[2,1,1,2]", "X[1,2,2,1]", "X[2,2,1,1]"] {
            let c = CrossingCode::parse(text).unwrap();
            let b = kauffman_bracket(&c).unwrap();
            assert!(b == poly(&[(3, -1)]) || b == poly(&[(-3, -1)]), "{text}: {b}");
            assert_eq!(jones(&c).unwrap(), LaurentPolynomial::one(), "{text}");
        }
    }

    #[test]
    fn table_self_test() {
        let failures = KnotTable::builtin().self_test();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn parse_errors() {
        assert!(CrossingCode::parse("X[1,2,3]").is_err());
        assert!(CrossingCode::parse("X[1,2,3,4]").is_err());
        assert!(CrossingCode::parse("Y[1,2,3,4]").is_err());
        assert!(CrossingCode::parse("PD[]").unwrap().is_empty());
    }

    #[test]
    fn display_round_trip() {
        let c = CrossingCode::parse("PD[X[4,2,5,1], X[8,6,1,5], X[6,3,7,4], X[2,7,3,8]]").unwrap();
        assert_eq!(CrossingCode::parse(&c.to_string()).unwrap(), c);
        assert_eq!(jones(&c).unwrap().to_string(), "t^-2 - t^-1 + 1 - t + t^2");
    }

    #[test]
    fn too_many_crossings() {
        let c = CrossingCode { crossings: vec![PdCrossing { ends: [1, 1, 1, 1], sign: 1 }; 15] };
        assert_eq!(kauffman_bracket(&c), Err(Error::TooManyCrossings(15)));
    }
}
