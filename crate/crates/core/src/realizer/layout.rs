//! Tutte barycentric layout with the outer face on a regular polygon.

use nalgebra::{DMatrix, DVector};

use crate::geom::Point;
use crate::plane_graph::PlaneGraph;

/// Straight-line layout: outer vertices on a regular polygon with unit sides, every
/// other vertex at the barycentre of its neighbours.
pub fn tutte(g: &PlaneGraph) -> Vec<Point> {
    let n = g.n();
    let mut ring: Vec<usize> = Vec::new();
    for &v in &g.outer_face().boundary {
        if !ring.contains(&v) {
            ring.push(v);
        }
    }
    let k = ring.len();
    let radius = 0.5 / (std::f64::consts::PI / k as f64).sin();
    let mut pos = vec![Point::default(); n];
    let mut fixed = vec![false; n];
    for (i, &v) in ring.iter().enumerate() {
        // The outer walk runs clockwise.
        let a = -std::f64::consts::TAU * i as f64 / k as f64;
        pos[v] = Point::new(radius * a.cos(), radius * a.sin());
        fixed[v] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !fixed[v]).collect();
    if free.is_empty() {
        return pos;
    }
    let mut index = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        index[v] = i;
    }
    let m = free.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut bx = DVector::<f64>::zeros(m);
    let mut by = DVector::<f64>::zeros(m);
    for (i, &v) in free.iter().enumerate() {
        a[(i, i)] = g.degree(v) as f64;
        for &w in g.rotation(v) {
            if fixed[w] {
                bx[i] += pos[w].x;
                by[i] += pos[w].y;
            } else {
                a[(i, index[w])] -= 1.0;
            }
        }
    }
    let lu = a.lu();
    if let (Some(x), Some(y)) = (lu.solve(&bx), lu.solve(&by)) {
        for (i, &v) in free.iter().enumerate() {
            pos[v] = Point::new(x[i], y[i]);
        }
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_regular() {
        let g = PlaneGraph::cycle(6);
        let p = tutte(&g);
        for (u, v) in g.edges() {
            assert!((p[u].dist(p[v]) - 1.0).abs() < 1e-12);
        }
    }
}
