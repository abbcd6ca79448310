//! SVG drawings at 100 units per matchstick with 4-unit vertex discs.

use std::fmt::Write;

use crate::geom::Point;
use crate::plane_graph::PlaneGraph;
use crate::realizer::layout;

pub const UNIT: f64 = 100.0;
pub const RADIUS: f64 = 4.0;
const MARGIN: f64 = 20.0;
pub const COMBINATORIAL_LABEL: &str = "combinatorial only";

/// Draws `g` at `coords`, or at a Tutte layout labelled as combinatorial when no
/// coordinates are given.
pub fn render(g: &PlaneGraph, coords: Option<&[Point]>) -> String {
    let owned;
    let pts = match coords {
        Some(c) => c,
        None => {
            owned = layout::tutte(g);
            &owned[..]
        }
    };
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let width = (hi.x - lo.x) * UNIT + 2.0 * MARGIN;
    let height = (hi.y - lo.y) * UNIT + 2.0 * MARGIN + if coords.is_none() { MARGIN } else { 0.0 };
    // SVG y grows downwards.
    let map = |p: Point| ((p.x - lo.x) * UNIT + MARGIN, (hi.y - p.y) * UNIT + MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    )
    .unwrap();
    for (u, v) in g.edges() {
        let (a, b) = (map(pts[u]), map(pts[v]));
        writeln!(
            s,
            r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1.5"/>"#,
            a.0, a.1, b.0, b.1
        )
        .unwrap();
    }
    for (v, &p) in pts.iter().enumerate() {
        let (x, y) = map(p);
        writeln!(s, r#"  <circle id="v{v}" cx="{x:.3}" cy="{y:.3}" r="{RADIUS}" fill="black"/>"#).unwrap();
    }
    if coords.is_none() {
        writeln!(
            s,
            r#"  <text x="{MARGIN}" y="{:.3}" font-family="sans-serif" font-size="12">{COMBINATORIAL_LABEL}</text>"#,
            height - MARGIN / 2.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_counts() {
        let g = PlaneGraph::cycle(3);
        let h = 3f64.sqrt() / 2.0;
        let c = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
        let s = render(&g, Some(&c));
        assert_eq!(s.matches("<circle").count(), 3);
        assert_eq!(s.matches("<line").count(), 3);
        assert!(!s.contains(COMBINATORIAL_LABEL));
        assert!(s.contains(r#"x2="120.000""#));
    }

    #[test]
    fn layout_fallback_is_labelled() {
        let s = render(&PlaneGraph::cycle(5), None);
        assert!(s.contains(COMBINATORIAL_LABEL));
        assert_eq!(s.matches("<circle").count(), 5);
    }
}
