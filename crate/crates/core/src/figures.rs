//! Graphs transcribed from the drawings of the non-realizable candidates, the 20-vertex
//! example with `tau = 4`, and the small-`k` classification lists.
//!
//! Coordinates are drawing coordinates, not unit embeddings. Rotations follow the drawn
//! angles, with curved edges oriented by their control points.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use crate::geom::{Motion, Point};
use crate::plane_graph::PlaneGraph;
use crate::realizer::{FlexSystem, LinearConstraint};

#[derive(Clone, Debug, Deserialize)]
pub struct FigureGraph {
    pub name: String,
    pub transcribed: bool,
    pub coords: Vec<[f64; 2]>,
    pub rotation: Vec<Vec<usize>>,
    pub outer_hint: [usize; 2],
    /// Edges drawn dotted.
    pub dotted: Vec<[usize; 2]>,
    /// Vertices drawn as hollow circles; they are left out of the rigid subgraph.
    pub hollow: Vec<usize>,
    pub labels: BTreeMap<String, usize>,
    pub n: usize,
    pub k: usize,
    pub tau: i64,
    pub faces: usize,
}

impl FigureGraph {
    pub fn graph(&self) -> PlaneGraph {
        PlaneGraph::from_rotation_system(self.rotation.clone(), (self.outer_hint[0], self.outer_hint[1]))
            .unwrap_or_else(|e| panic!("figure {} is malformed: {e}", self.name))
    }

    pub fn label(&self, key: &str) -> usize {
        self.labels[key]
    }

    pub fn drawn(&self) -> Vec<Point> {
        self.coords.iter().map(|c| Point::new(c[0], c[1])).collect()
    }

    /// The graph with the listed edges deleted. The outer face is re-anchored on a
    /// surviving outer dart.
    pub fn without_edges(&self, cut: &[[usize; 2]]) -> PlaneGraph {
        let gone = |u: usize, v: usize| cut.iter().any(|e| (e[0] == u && e[1] == v) || (e[0] == v && e[1] == u));
        let rot: Vec<Vec<usize>> = self
            .rotation
            .iter()
            .enumerate()
            .map(|(u, r)| r.iter().copied().filter(|&v| !gone(u, v)).collect())
            .collect();
        let g = self.graph();
        let hint = g
            .outer_face()
            .darts
            .iter()
            .map(|&d| (g.tail(d), g.head(d)))
            .find(|&(u, v)| !gone(u, v))
            .expect("outer face keeps an edge");
        PlaneGraph::from_rotation_system(rot, hint).expect("deleting edges keeps a plane graph")
    }

    /// The subgraph induced by the filled vertices, relabelled in increasing order, with
    /// the map from old labels.
    pub fn filled_subgraph(&self) -> (PlaneGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.n];
        let mut next = 0;
        for (v, m) in map.iter_mut().enumerate() {
            if !self.hollow.contains(&v) {
                *m = Some(next);
                next += 1;
            }
        }
        let rot: Vec<Vec<usize>> = (0..self.n)
            .filter(|v| map[*v].is_some())
            .map(|v| self.rotation[v].iter().filter_map(|&w| map[w]).collect())
            .collect();
        let g = self.graph();
        let hint = g
            .faces()
            .iter()
            .flat_map(|f| f.darts.iter())
            .map(|&d| (g.tail(d), g.head(d)))
            .filter_map(|(u, v)| Some((map[u]?, map[v]?)))
            .find(|&(u, v)| {
                // a dart whose left side is unbounded after the deletion
                let p = self.drawn();
                let (a, b) = (self.inverse(&map, u), self.inverse(&map, v));
                let mid = (p[a] + p[b]) * 0.5;
                let normal = (p[b] - p[a]).perp();
                let probe = mid + normal * 1e-3;
                !self.filled_faces_contain(&map, probe)
            })
            .expect("filled subgraph has an outer dart");
        (PlaneGraph::from_rotation_system(rot, hint).expect("filled subgraph is a plane graph"), map)
    }

    fn inverse(&self, map: &[Option<usize>], x: usize) -> usize {
        map.iter().position(|m| *m == Some(x)).unwrap()
    }

    fn filled_faces_contain(&self, map: &[Option<usize>], p: Point) -> bool {
        let g = self.graph();
        let pts = self.drawn();
        g.faces().iter().filter(|f| !f.is_outer && f.boundary.iter().all(|&v| map[v].is_some())).any(|f| {
            let poly: Vec<Point> = f.boundary.iter().map(|&v| pts[v]).collect();
            contains(&poly, p)
        })
    }
}

fn contains(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            inside = !inside;
        }
    }
    inside
}

#[derive(Deserialize)]
struct ListFile {
    graphs: Vec<FigureGraph>,
}

fn parse(src: &str) -> FigureGraph {
    serde_json::from_str(src).expect("figure data parses")
}

fn parse_list(src: &str) -> Vec<FigureGraph> {
    serde_json::from_str::<ListFile>(src).expect("figure list parses").graphs
}

macro_rules! figure_fn {
    ($(#[$m:meta])* $name:ident, $file:literal) => {
        $(#[$m])*
        pub fn $name() -> &'static FigureGraph {
            static F: OnceLock<FigureGraph> = OnceLock::new();
            F.get_or_init(|| parse(include_str!(concat!("../data/figures/", $file))))
        }
    };
}

figure_fn!(
    /// Rigid once the dotted edge is removed; the dotted pair is then not at unit distance.
    fig2_left,
    "fig2_left.json"
);
figure_fn!(
    /// The filled vertices force the labelled pair to a distance other than 2.
    fig2_right,
    "fig2_right.json"
);
figure_fn!(fig3_left, "fig3_left.json");
figure_fn!(fig3_right, "fig3_right.json");
figure_fn!(
    /// The flexible candidate with angle labels `alpha` and `beta`.
    fig4,
    "fig4.json"
);
figure_fn!(
    /// 20 vertices, `tau = 4`.
    fig7,
    "fig7.json"
);

/// The five candidates that survive the combinatorial filters up to 16 vertices.
pub fn five_graphs() -> [&'static FigureGraph; 5] {
    [fig2_left(), fig2_right(), fig3_left(), fig3_right(), fig4()]
}

/// Drawn classification lists: `3` and `4` share one list.
pub fn classification_list(k: usize) -> &'static [FigureGraph] {
    static K34: OnceLock<Vec<FigureGraph>> = OnceLock::new();
    static K5: OnceLock<Vec<FigureGraph>> = OnceLock::new();
    static K6: OnceLock<Vec<FigureGraph>> = OnceLock::new();
    match k {
        3 | 4 => K34.get_or_init(|| parse_list(include_str!("../data/figures/list_k34.json"))),
        5 => K5.get_or_init(|| parse_list(include_str!("../data/figures/list_k5.json"))),
        6 => K6.get_or_init(|| parse_list(include_str!("../data/figures/list_k6.json"))),
        _ => &[],
    }
}

/// Two-angle model of the flexible candidate. The upper strip is fixed with its end
/// vertices at `(0, 0)` and `(2, 0)`; the side fans turn about them, carrying `x` and `y`
/// on unit arms that start along the strip base. `alpha` and `beta` are the arm angles
/// below the base, tied by the parallelogram linkage of the centre. The objective is
/// `|xy|`, which the centre bar needs to equal 1.
pub fn fig4_flex_system() -> FlexSystem {
    let third = std::f64::consts::FRAC_PI_3;
    let (pa, pb, pm) = (Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(1.0, 0.0));
    let objective = move |p: &[f64]| {
        let px = Motion::about(pa, -p[0]).apply(pm);
        let py = Motion::about(pb, p[1]).apply(pm);
        px.dist(py)
    };
    FlexSystem {
        params: vec!["alpha".into(), "beta".into()],
        domain: vec![(0.0, third), (0.0, third)],
        constraint: Some(LinearConstraint { coeffs: vec![1.0, 1.0], rhs: third }),
        objective: Arc::new(objective),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figures_load_with_expected_profiles() {
        for f in five_graphs().into_iter().chain([fig7()]) {
            let g = f.graph();
            let p = g.face_profile();
            assert_eq!((p.n as usize, p.k as usize, p.tau, p.faces as usize), (f.n, f.k, f.tau, f.faces), "{}", f.name);
            assert!(g.satisfies_degree_constraints(), "{}", f.name);
            assert!(f.transcribed);
        }
    }

    #[test]
    fn fig7_profile() {
        let p = fig7().graph().face_profile();
        assert_eq!((p.n, p.tau, p.faces), (20, 4, 20));
    }
}
