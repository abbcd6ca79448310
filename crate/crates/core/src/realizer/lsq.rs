//! Least-squares search for unit edge lengths: Levenberg-Marquardt from a Tutte layout
//! with seeded random restarts.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_embedding, layout, RealizeOptions};
use crate::geom::Point;
use crate::plane_graph::PlaneGraph;

/// `sum (|p_u - p_v| - 1)^2` over `edges`, with `x` holding interleaved coordinates.
pub fn objective(edges: &[(usize, usize)], x: &[f64]) -> f64 {
    edges
        .iter()
        .map(|&(u, v)| {
            let r = (x[2 * u] - x[2 * v]).hypot(x[2 * u + 1] - x[2 * v + 1]) - 1.0;
            r * r
        })
        .sum()
}

pub fn gradient(edges: &[(usize, usize)], x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for &(u, v) in edges {
        let dx = x[2 * u] - x[2 * v];
        let dy = x[2 * u + 1] - x[2 * v + 1];
        let l = dx.hypot(dy);
        if l == 0.0 {
            continue;
        }
        let s = 2.0 * (l - 1.0) / l;
        g[2 * u] += s * dx;
        g[2 * u + 1] += s * dy;
        g[2 * v] -= s * dx;
        g[2 * v + 1] -= s * dy;
    }
    g
}

fn flatten(p: &[Point]) -> Vec<f64> {
    p.iter().flat_map(|q| [q.x, q.y]).collect()
}

fn unflatten(x: &[f64]) -> Vec<Point> {
    x.chunks(2).map(|c| Point::new(c[0], c[1])).collect()
}

fn max_residual(edges: &[(usize, usize)], x: &[f64]) -> f64 {
    edges
        .iter()
        .map(|&(u, v)| ((x[2 * u] - x[2 * v]).hypot(x[2 * u + 1] - x[2 * v + 1]) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Levenberg-Marquardt on the edge residuals.
pub fn polish(g: &PlaneGraph, start: &[Point], max_iter: usize) -> Vec<Point> {
    let edges = g.edges();
    let dim = 2 * g.n();
    let mut x = flatten(start);
    let mut cost = objective(&edges, &x);
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        if max_residual(&edges, &x) < 1e-14 {
            break;
        }
        let mut j = DMatrix::<f64>::zeros(edges.len(), dim);
        let mut r = DVector::<f64>::zeros(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            let dx = x[2 * u] - x[2 * v];
            let dy = x[2 * u + 1] - x[2 * v + 1];
            let l = dx.hypot(dy).max(1e-12);
            r[i] = l - 1.0;
            j[(i, 2 * u)] = dx / l;
            j[(i, 2 * u + 1)] = dy / l;
            j[(i, 2 * v)] = -dx / l;
            j[(i, 2 * v + 1)] = -dy / l;
        }
        let jt = j.transpose();
        let jtj = &jt * &j;
        let rhs = -(&jt * &r);
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for d in 0..dim {
                a[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&rhs)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let c = objective(&edges, &trial);
            if c < cost {
                x = trial;
                cost = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    unflatten(&x)
}

/// FNV-1a, used to derive restart seeds from canonical codes.
pub(crate) fn seed_from(bytes: &[u8], extra: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ extra
}

fn mirrored(p: &[Point]) -> Vec<Point> {
    p.iter().map(|q| Point::new(-q.x, q.y)).collect()
}

/// Seeded restarts from perturbed Tutte layouts. Returns verified coordinates.
pub fn search(g: &PlaneGraph, opts: &RealizeOptions) -> Option<Vec<Point>> {
    let base = layout::tutte(g);
    let edges = g.edges();
    let mean = edges.iter().map(|&(u, v)| base[u].dist(base[v])).sum::<f64>() / edges.len().max(1) as f64;
    let scale = if mean > 1e-12 { 1.0 / mean } else { 1.0 };
    let base: Vec<Point> = base.iter().map(|&p| p * scale).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(g.canonical_code().as_bytes(), opts.seed));
    for attempt in 0..opts.restarts.max(1) {
        let amp = 0.05 * attempt as f64;
        let start: Vec<Point> =
            base.iter().map(|&p| p + Point::new(rng.gen_range(-amp..=amp), rng.gen_range(-amp..=amp))).collect();
        let x = polish(g, &start, 200);
        for cand in [x.clone(), mirrored(&x)] {
            if check_embedding(g, &cand, opts.tol).is_ok() {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_stretched_edge() {
        let e = [(0, 1)];
        let x = [0.0, 0.0, 2.0, 0.0];
        assert_eq!(objective(&e, &x), 1.0);
        assert_eq!(gradient(&e, &x), vec![-2.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn square_is_found() {
        let g = PlaneGraph::cycle(4);
        let p = search(&g, &RealizeOptions::default()).unwrap();
        assert!(check_embedding(&g, &p, 1e-9).is_ok());
    }
}
