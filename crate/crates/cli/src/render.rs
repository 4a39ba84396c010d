// Copyright 2026 the Holoknot Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! SVG drawing of the curve `c = (f, f')` with its crossings.

use std::fmt::Write;

use holoknot::diagram::{Branch, FramedDiagram, HalfPlane};
use holoknot::trig::TrigPolynomial;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;
const ARC_SAMPLES: usize = 256;

struct Frame {
    x0_min: f64,
    kx: f64,
    ky: f64,
    axis: f64,
}

impl Frame {
    fn new(f: &TrigPolynomial, scale: f64) -> Self {
        let n = 4096;
        let (mut lo, mut hi, mut top) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for k in 0..n {
            let j = f.evaluate_jets(std::f64::consts::TAU * k as f64 / n as f64, 1);
            lo = lo.min(j[0]);
            hi = hi.max(j[0]);
            top = top.max(j[1].abs());
        }
        let w = (WIDTH - 2.0 * MARGIN) * scale;
        let h = (HEIGHT - 2.0 * MARGIN) * scale;
        Frame {
            x0_min: lo,
            kx: w / (hi - lo).max(1e-12),
            ky: 0.5 * h / top.max(1e-12),
            axis: MARGIN * scale + 0.5 * h,
        }
    }

    fn map(&self, x0: f64, x1: f64, scale: f64) -> (f64, f64) {
        (MARGIN * scale + (x0 - self.x0_min) * self.kx, self.axis - x1 * self.ky)
    }
}

/// Renders the diagram. `metadata` is embedded verbatim (escaped) in a
/// `<metadata>` element.
pub fn svg(f: &TrigPolynomial, d: &FramedDiagram, scale: f64, metadata: &str) -> String {
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    let frame = Frame::new(f, scale);
    let (w, h) = (WIDTH * scale, HEIGHT * scale);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#);
    let _ = writeln!(out, "<metadata>{}</metadata>", escape(metadata));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<line class="axis" x1="0" y1="{y:.3}" x2="{w:.3}" y2="{y:.3}" stroke="#888" stroke-width="{sw:.3}"/>"##,
        y = frame.axis,
        sw = scale
    );
    let _ = writeln!(out, r#"<g class="curve" fill="none" stroke-width="{:.3}">"#, 2.0 * scale);
    for arc in &d.arcs {
        let colour = match arc.id.half_plane {
            HalfPlane::Upper => "#c0392b",
            HalfPlane::Lower => "#2471a3",
        };
        let mut path = String::new();
        for k in 0..=ARC_SAMPLES {
            let t = arc.t_start + (arc.t_end - arc.t_start) * k as f64 / ARC_SAMPLES as f64;
            let j = f.evaluate_jets(t, 1);
            // the arc ends on the axis
            let x1 = if k == 0 || k == ARC_SAMPLES { 0.0 } else { j[1] };
            let (x, y) = frame.map(j[0], x1, scale);
            let _ = write!(path, "{}{x:.3} {y:.3}", if k == 0 { "M" } else { " L" });
        }
        let _ = writeln!(out, r#"<path class="arc" data-arc="{}" stroke="{colour}" d="{path}"/>"#, arc.id.label());
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="crossings" font-family="monospace" font-size="{:.3}">"#, 11.0 * scale);
    for c in &d.crossings {
        let [x0, x1] = c.double_point.point;
        let (x, y) = frame.map(x0, x1, scale);
        let (over, under) = match c.over_branch {
            Branch::A => (c.arc_a, c.arc_b),
            Branch::B => (c.arc_b, c.arc_a),
        };
        let _ = writeln!(
            out,
            r#"<circle class="crossing" data-sign="{sign}" data-over="{o}" data-under="{u}" cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="black"/>"#,
            sign = c.sign,
            o = over.label(),
            u = under.label(),
            r = 3.0 * scale
        );
        let _ = writeln!(
            out,
            r#"<text x="{tx:.3}" y="{ty:.3}">{sign:+} {o}/{u}</text>"#,
            tx = x + 5.0 * scale,
            ty = y - 5.0 * scale,
            sign = c.sign,
            o = over.label(),
            u = under.label()
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
