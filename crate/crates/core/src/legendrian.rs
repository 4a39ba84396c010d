// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Legendrian fronts attached to a holonomic diagram and the bound checks
//! they feed.
//!
//! Each diagram gives two Legendrian knots `Γ+` and `Γ-`. Their fronts are
//! described only combinatorially: axis points become cusps, and every lower
//! (for `Γ+`) or upper (for `Γ-`) crossing receives a zig-zag.

use serde::{Deserialize, Serialize};

use crate::circle_functions::CriticalKind;
use crate::diagram::{FramedDiagram, HalfPlane};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plus,
    Minus,
}

impl Variant {
    /// Half-plane whose crossings receive zig-zags.
    fn zigzag_half_plane(self) -> HalfPlane {
        match self {
            Variant::Plus => HalfPlane::Lower,
            Variant::Minus => HalfPlane::Upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontCounts {
    #[serde(rename = "Dcu")]
    pub dcu: u64,
    #[serde(rename = "Ucu")]
    pub ucu: u64,
    #[serde(rename = "Lcu")]
    pub lcu: u64,
    #[serde(rename = "Ecr")]
    pub ecr: u64,
    #[serde(rename = "Ocr")]
    pub ocr: u64,
    pub variant: Variant,
}

impl FrontCounts {
    pub fn as_array(&self) -> [u64; 5] {
        [self.dcu, self.ucu, self.lcu, self.ecr, self.ocr]
    }
}

/// Closed-form census from `W` and `H±`.
pub fn front_census(d: &FramedDiagram, variant: Variant) -> FrontCounts {
    census_from(d.m as u64, d.h_plus() as u64, d.h_minus() as u64, variant)
}

fn census_from(m: u64, h_plus: u64, h_minus: u64, variant: Variant) -> FrontCounts {
    let (kept, zigzagged) = match variant {
        Variant::Plus => (h_plus, h_minus),
        Variant::Minus => (h_minus, h_plus),
    };
    FrontCounts { dcu: m + 2 * zigzagged, ucu: m, lcu: m + zigzagged, ecr: kept, ocr: zigzagged, variant }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vertical {
    Down,
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizontal {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XClass {
    Equal,
    Opposite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrontSymbol {
    Cusp { vertical: Vertical, horizontal: Horizontal },
    CrossingEnd { id: usize, x_class: XClass },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialFront {
    pub variant: Variant,
    pub symbols: Vec<FrontSymbol>,
}

impl CombinatorialFront {
    pub fn census(&self) -> FrontCounts {
        let mut c = FrontCounts { dcu: 0, ucu: 0, lcu: 0, ecr: 0, ocr: 0, variant: self.variant };
        for s in &self.symbols {
            match *s {
                FrontSymbol::Cusp { vertical, horizontal } => {
                    match vertical {
                        Vertical::Down => c.dcu += 1,
                        Vertical::Up => c.ucu += 1,
                    }
                    if horizontal == Horizontal::Left {
                        c.lcu += 1;
                    }
                }
                FrontSymbol::CrossingEnd { x_class, .. } => match x_class {
                    XClass::Equal => c.ecr += 1,
                    XClass::Opposite => c.ocr += 1,
                },
            }
        }
        // each crossing was seen twice
        c.ecr /= 2;
        c.ocr /= 2;
        c
    }

    pub fn cusp_count(&self) -> usize {
        self.symbols.iter().filter(|s| matches!(s, FrontSymbol::Cusp { .. })).count()
    }
}

/// Traverses the knot from `t = 0` and emits the front symbols.
pub fn build_front(d: &FramedDiagram, variant: Variant) -> Result<CombinatorialFront> {
    enum Event {
        Axis(CriticalKind),
        Passage(usize, bool),
    }
    let mut events: Vec<(f64, Event)> = Vec::new();
    for arc in &d.arcs {
        let kind = match arc.id.half_plane {
            HalfPlane::Upper => CriticalKind::Min,
            HalfPlane::Lower => CriticalKind::Max,
        };
        events.push((arc.t_start, Event::Axis(kind)));
    }
    for (k, c) in d.crossings.iter().enumerate() {
        let (first, second) = if c.t_a <= c.t_b { (c.t_a, c.t_b) } else { (c.t_b, c.t_a) };
        events.push((first, Event::Passage(k, true)));
        events.push((second, Event::Passage(k, false)));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let zig = variant.zigzag_half_plane();
    let mut symbols = Vec::with_capacity(events.len() + 2 * d.crossings.len());
    for (_, e) in events {
        match e {
            Event::Axis(CriticalKind::Min) => {
                symbols.push(FrontSymbol::Cusp { vertical: Vertical::Up, horizontal: Horizontal::Left })
            }
            Event::Axis(CriticalKind::Max) => {
                symbols.push(FrontSymbol::Cusp { vertical: Vertical::Down, horizontal: Horizontal::Right })
            }
            Event::Passage(k, first) => {
                let zigzag = d.crossings[k].half_plane() == zig;
                let x_class = if zigzag { XClass::Opposite } else { XClass::Equal };
                symbols.push(FrontSymbol::CrossingEnd { id: k, x_class });
                if zigzag && first {
                    symbols.push(FrontSymbol::Cusp { vertical: Vertical::Down, horizontal: Horizontal::Left });
                    symbols.push(FrontSymbol::Cusp { vertical: Vertical::Down, horizontal: Horizontal::Right });
                }
            }
        }
    }
    let front = CombinatorialFront { variant, symbols };
    let constructed = front.census();
    let closed = front_census(d, variant);
    if constructed != closed {
        return Err(Error::CensusMismatch { constructed: constructed.as_array(), closed: closed.as_array() });
    }
    Ok(front)
}

/// `(W_xy, S_xy) = ((Dcu - Ucu)/2, Ecr - Ocr - Lcu)`.
pub fn front_invariants(c: &FrontCounts) -> Result<(i64, i64)> {
    let diff = c.dcu as i64 - c.ucu as i64;
    if diff % 2 != 0 {
        return Err(Error::ParityError);
    }
    Ok((diff / 2, c.ecr as i64 - c.ocr as i64 - c.lcu as i64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub slack: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    fn push(&mut self, name: &str, lhs: i64, rhs: i64) {
        self.entries.push(BoundEntry { name: name.into(), lhs, rhs, slack: rhs - lhs });
    }

    fn finish(self) -> Result<Self> {
        match self.entries.iter().find(|e| e.slack < 0) {
            Some(e) => Err(Error::BoundViolated(format!("{}: {} > {}", e.name, e.lhs, e.rhs))),
            None => Ok(self),
        }
    }

    pub fn slack(&self, name: &str) -> Option<i64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.slack)
    }
}

/// `W ± S ≤ 2g - 1`, their combination, and both Bennequin instances.
pub fn genus_bound_check(d: &FramedDiagram, genus: u32) -> Result<BoundReport> {
    let w = -(d.m as i64);
    let s = d.h_minus() as i64 - d.h_plus() as i64;
    let rhs = 2 * genus as i64 - 1;
    let mut r = BoundReport { entries: Vec::new() };
    r.push("W - S", w - s, rhs);
    r.push("W + S", w + s, rhs);
    r.push("W + |S|", w + s.abs(), rhs);
    for v in [Variant::Plus, Variant::Minus] {
        let (wxy, sxy) = front_invariants(&front_census(d, v))?;
        let name = match v {
            Variant::Plus => "bennequin plus",
            Variant::Minus => "bennequin minus",
        };
        r.push(name, sxy + wxy.abs(), rhs);
    }
    r.finish()
}

/// `W ≤ -braid index`.
pub fn braid_bound_check(d: &FramedDiagram, braid_index: u32) -> Result<BoundReport> {
    let mut r = BoundReport { entries: Vec::new() };
    r.push("W", -(d.m as i64), -(braid_index as i64));
    r.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(census_from(1, 0, 0, Variant::Plus).as_array(), [1, 1, 1, 0, 0]);
        let plus = census_from(4, 3, 2, Variant::Plus);
        let minus = census_from(4, 3, 2, Variant::Minus);
        assert_eq!(plus.as_array(), [8, 4, 6, 3, 2]);
        assert_eq!(minus.as_array(), [10, 4, 7, 2, 3]);
        assert_eq!(front_invariants(&plus).unwrap(), (2, -5));
        assert_eq!(front_invariants(&minus).unwrap(), (3, -8));
        assert_eq!(front_invariants(&census_from(1, 0, 0, Variant::Minus)).unwrap(), (0, -1));
    }

    #[test]
    fn parity_error() {
        let c = FrontCounts { dcu: 2, ucu: 1, lcu: 1, ecr: 0, ocr: 0, variant: Variant::Plus };
        assert_eq!(front_invariants(&c), Err(Error::ParityError));
    }
}
