//! Triangle/quadrangle configurations around an inner degree-4 vertex.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::plane_graph::PlaneGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternTemplate {
    pub name: String,
    pub ring: Vec<usize>,
    pub shared_edges: Vec<[usize; 2]>,
    pub angle_slots: u32,
}

#[derive(Deserialize)]
struct TemplateFile {
    templates: Vec<PatternTemplate>,
}

pub fn templates() -> &'static [PatternTemplate] {
    static T: OnceLock<Vec<PatternTemplate>> = OnceLock::new();
    T.get_or_init(|| {
        serde_json::from_str::<TemplateFile>(include_str!("../../data/fig1_templates.json"))
            .expect("template data parses")
            .templates
    })
}

/// One match: the centre vertex, the template index, and the face indices it covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub centre: usize,
    pub template: usize,
    pub faces: [usize; 4],
}

fn ring_matches(ring: &[usize], pattern: &[usize]) -> bool {
    let m = ring.len();
    if m != pattern.len() {
        return false;
    }
    (0..m).any(|s| {
        (0..m).all(|i| ring[(s + i) % m] == pattern[i]) || (0..m).all(|i| ring[(s + m - i) % m] == pattern[i])
    })
}

pub fn occurrences(g: &PlaneGraph) -> Vec<Occurrence> {
    let mut out = Vec::new();
    let outer = g.outer_index();
    for v in g.inner_vertices() {
        if g.degree(v) != 4 {
            continue;
        }
        let mut faces = [0usize; 4];
        for (i, &w) in g.rotation(v).iter().enumerate() {
            faces[i] = g.face_of(g.dart(v, w).unwrap());
        }
        if faces.contains(&outer) {
            continue;
        }
        let mut distinct = faces;
        distinct.sort_unstable();
        if distinct.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let ring: Vec<usize> = faces.iter().map(|&f| g.faces()[f].size()).collect();
        if let Some(t) = templates().iter().position(|t| ring_matches(&ring, &t.ring)) {
            out.push(Occurrence { centre: v, template: t, faces: distinct });
        }
    }
    out
}

fn disjoint(a: &Occurrence, b: &Occurrence) -> bool {
    a.faces.iter().all(|f| !b.faces.contains(f))
}

/// Maximum number of pairwise face-disjoint occurrences, by branch and bound.
pub fn max_disjoint(occ: &[Occurrence]) -> usize {
    fn go(occ: &[Occurrence], chosen: &mut Vec<usize>, i: usize, best: &mut usize) {
        if chosen.len() + (occ.len() - i) <= *best {
            return;
        }
        if i == occ.len() {
            *best = chosen.len();
            return;
        }
        if chosen.iter().all(|&c| disjoint(&occ[c], &occ[i])) {
            chosen.push(i);
            go(occ, chosen, i + 1, best);
            chosen.pop();
        }
        go(occ, chosen, i + 1, best);
    }
    let mut best = 0;
    go(occ, &mut Vec::new(), 0, &mut best);
    best
}

pub fn count_disjoint_fig1(g: &PlaneGraph) -> usize {
    max_disjoint(&occurrences(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_load() {
        let t = templates();
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|t| t.angle_slots == 15 && t.ring.len() == 4));
    }

    #[test]
    fn ring_symmetry() {
        assert!(ring_matches(&[4, 3, 4, 3], &[3, 4, 3, 4]));
        assert!(ring_matches(&[4, 4, 3, 3], &[3, 3, 4, 4]));
        assert!(ring_matches(&[4, 4, 3, 4], &[3, 4, 4, 4]));
        assert!(!ring_matches(&[3, 3, 3, 4], &[3, 4, 4, 4]));
    }
}
