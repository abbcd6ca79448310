//! Combinatorial plane graphs given by a rotation system and a designated outer face.
//!
//! Rotations list neighbours counter-clockwise. A dart `u -> v` has its face on the
//! left; the successor of `u -> v` along that face is `v -> w` where `w` precedes `u`
//! in the rotation at `v`. Inner faces are therefore traced counter-clockwise and the
//! outer face clockwise.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

use crate::canon::{self, CanonicalCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph has {0} vertices; at least 2 are required")]
    TooSmall(usize),
    #[error("graph has {0} vertices; at most 255 are supported")]
    TooLarge(usize),
    #[error("vertex {v} lists neighbour {w}, which does not exist")]
    NeighborOutOfRange { v: usize, w: usize },
    #[error("vertex {v} lists itself")]
    SelfLoop { v: usize },
    #[error("vertex {u} lists neighbour {v} more than once")]
    MultiEdge { u: usize, v: usize },
    #[error("{u} lists {v} but {v} does not list {u}")]
    AsymmetricRotation { u: usize, v: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("rotation system has Euler characteristic {0}, not 2")]
    NonzeroGenus(i64),
    #[error("outer hint {u}->{v} is not a dart")]
    BadOuterHint { u: usize, v: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub boundary: Vec<usize>,
    pub darts: Vec<usize>,
    pub is_outer: bool,
}

impl Face {
    pub fn size(&self) -> usize {
        self.boundary.len()
    }
}

/// Integer census of a plane graph. `census[i]` counts the `i`-gons, outer face included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceProfile {
    pub n: i64,
    pub edges: i64,
    pub faces: i64,
    pub k: i64,
    pub tau: i64,
    pub census: BTreeMap<usize, i64>,
}

impl FaceProfile {
    pub fn a(&self, i: usize) -> i64 {
        self.census.get(&i).copied().unwrap_or(0)
    }

    /// Number of odd faces of size at least 3.
    pub fn odd_faces(&self) -> i64 {
        self.census.iter().filter(|(i, _)| *i % 2 == 1).map(|(_, c)| c).sum()
    }

    pub fn weighted_sum(&self) -> i64 {
        self.census.iter().map(|(&i, &c)| i as i64 * c).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Connectivity {
    One,
    Two,
    ThreePlus,
}

impl Connectivity {
    pub fn level(self) -> u8 {
        match self {
            Connectivity::One => 1,
            Connectivity::Two => 2,
            Connectivity::ThreePlus => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadComponent {
    /// Indices into [`PlaneGraph::faces`].
    pub quad_faces: Vec<usize>,
    pub q: usize,
    pub boundary_length: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadDecomposition {
    pub components: Vec<QuadComponent>,
}

#[derive(Clone, Debug)]
pub struct PlaneGraph {
    rotation: Vec<Vec<usize>>,
    offset: Vec<usize>,
    tail: Vec<usize>,
    head: Vec<usize>,
    twin: Vec<usize>,
    next: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Face>,
    outer: usize,
    on_outer: Vec<bool>,
}

impl PartialEq for PlaneGraph {
    fn eq(&self, other: &Self) -> bool {
        self.rotation == other.rotation && self.outer_hint() == other.outer_hint()
    }
}

impl PlaneGraph {
    /// Builds a plane graph; `outer_hint` is a dart `(u, v)` on the unbounded face.
    pub fn from_rotation_system(
        rotation: Vec<Vec<usize>>,
        outer_hint: (usize, usize),
    ) -> Result<Self, GraphError> {
        let n = rotation.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if n > 255 {
            return Err(GraphError::TooLarge(n));
        }
        for (v, nb) in rotation.iter().enumerate() {
            for (i, &w) in nb.iter().enumerate() {
                if w >= n {
                    return Err(GraphError::NeighborOutOfRange { v, w });
                }
                if w == v {
                    return Err(GraphError::SelfLoop { v });
                }
                if nb[..i].contains(&w) {
                    return Err(GraphError::MultiEdge { u: v, v: w });
                }
            }
        }
        for (v, nb) in rotation.iter().enumerate() {
            for &w in nb {
                if !rotation[w].contains(&v) {
                    return Err(GraphError::AsymmetricRotation { u: v, v: w });
                }
            }
        }

        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for nb in &rotation {
            offset.push(offset.last().unwrap() + nb.len());
        }
        let darts = offset[n];
        let mut tail = vec![0; darts];
        let mut head = vec![0; darts];
        for v in 0..n {
            for (i, &w) in rotation[v].iter().enumerate() {
                tail[offset[v] + i] = v;
                head[offset[v] + i] = w;
            }
        }
        let pos = |v: usize, w: usize| rotation[v].iter().position(|&x| x == w).unwrap();
        let mut twin = vec![0; darts];
        let mut next = vec![0; darts];
        for d in 0..darts {
            let (u, v) = (tail[d], head[d]);
            let j = pos(v, u);
            twin[d] = offset[v] + j;
            let deg = rotation[v].len();
            next[d] = offset[v] + (j + deg - 1) % deg;
        }

        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &rotation[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != n {
            return Err(GraphError::Disconnected);
        }

        let mut face_of = vec![usize::MAX; darts];
        let mut faces = Vec::new();
        for start in 0..darts {
            if face_of[start] != usize::MAX {
                continue;
            }
            let id = faces.len();
            let mut ds = Vec::new();
            let mut d = start;
            loop {
                face_of[d] = id;
                ds.push(d);
                d = next[d];
                if d == start {
                    break;
                }
            }
            faces.push(Face { boundary: ds.iter().map(|&d| tail[d]).collect(), darts: ds, is_outer: false });
        }

        let euler = n as i64 - (darts / 2) as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(GraphError::NonzeroGenus(euler));
        }

        let (hu, hv) = outer_hint;
        let hint = (hu < n)
            .then(|| rotation[hu].iter().position(|&x| x == hv))
            .flatten()
            .ok_or(GraphError::BadOuterHint { u: hu, v: hv })?;
        let outer = face_of[offset[hu] + hint];
        faces[outer].is_outer = true;
        let mut on_outer = vec![false; n];
        for &v in &faces[outer].boundary {
            on_outer[v] = true;
        }
        // Store the outer walk starting at the hint dart so that `outer_hint` round-trips.
        let f = &mut faces[outer];
        let s = f.darts.iter().position(|&d| d == offset[hu] + hint).unwrap();
        f.darts.rotate_left(s);
        f.boundary.rotate_left(s);

        Ok(PlaneGraph { rotation, offset, tail, head, twin, next, face_of, faces, outer, on_outer })
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.tail.len() / 2
    }

    pub fn dart_count(&self) -> usize {
        self.tail.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn dart(&self, u: usize, v: usize) -> Option<usize> {
        self.rotation.get(u)?.iter().position(|&x| x == v).map(|i| self.offset[u] + i)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.dart(u, v).is_some()
    }

    pub fn tail(&self, d: usize) -> usize {
        self.tail[d]
    }

    pub fn head(&self, d: usize) -> usize {
        self.head[d]
    }

    pub fn twin(&self, d: usize) -> usize {
        self.twin[d]
    }

    /// Successor of `d` along its face.
    pub fn next(&self, d: usize) -> usize {
        self.next[d]
    }

    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn outer_index(&self) -> usize {
        self.outer
    }

    pub fn outer_face(&self) -> &Face {
        &self.faces[self.outer]
    }

    /// The first dart of the stored outer walk.
    pub fn outer_hint(&self) -> (usize, usize) {
        let d = self.faces[self.outer].darts[0];
        (self.tail[d], self.head[d])
    }

    pub fn is_outer_vertex(&self, v: usize) -> bool {
        self.on_outer[v]
    }

    /// Number of distinct vertices on the outer face.
    pub fn k(&self) -> usize {
        self.on_outer.iter().filter(|&&b| b).count()
    }

    pub fn inner_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(|&v| !self.on_outer[v])
    }

    pub fn inner_vertex_count(&self) -> usize {
        self.n() - self.k()
    }

    /// Edges as `(u, v)` with `u < v`, in dart order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.dart_count())
            .filter(|&d| self.tail[d] < self.head[d])
            .map(|d| (self.tail[d], self.head[d]))
            .collect()
    }

    /// Degree constraints of an incomplete 4-regular matchstick graph.
    pub fn satisfies_degree_constraints(&self) -> bool {
        (0..self.n()).all(|v| {
            let d = self.degree(v);
            if self.on_outer[v] {
                d <= 4
            } else {
                d == 4
            }
        })
    }

    pub fn face_profile(&self) -> FaceProfile {
        let mut census = BTreeMap::new();
        for f in &self.faces {
            *census.entry(f.size()).or_insert(0) += 1;
        }
        let k = self.k() as i64;
        let outer_deg: i64 = (0..self.n()).filter(|&v| self.on_outer[v]).map(|v| self.degree(v) as i64).sum();
        FaceProfile {
            n: self.n() as i64,
            edges: self.edge_count() as i64,
            faces: self.faces.len() as i64,
            k,
            tau: 4 * k - outer_deg,
            census,
        }
    }

    fn connected_without(&self, removed: &[usize]) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        for &r in removed {
            seen[r] = true;
        }
        let Some(start) = (0..n).find(|&v| !seen[v]) else {
            return true;
        };
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 1 + removed.len();
        while let Some(v) = stack.pop() {
            for &w in &self.rotation[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == n
    }

    /// Exhaustive cut-vertex and cut-pair test.
    pub fn connectivity_level(&self) -> Result<Connectivity, GraphError> {
        let n = self.n();
        if n < 2 {
            return Err(GraphError::TooSmall(n));
        }
        if (0..n).any(|v| !self.connected_without(&[v])) {
            return Ok(Connectivity::One);
        }
        for u in 0..n {
            for v in u + 1..n {
                if !self.connected_without(&[u, v]) {
                    return Ok(Connectivity::Two);
                }
            }
        }
        Ok(Connectivity::ThreePlus)
    }

    pub fn is_two_connected(&self) -> bool {
        self.n() >= 3 && (0..self.n()).all(|v| self.connected_without(&[v]))
    }

    /// Components of inner quadrangles under edge-sharing adjacency.
    pub fn quadrangle_decomposition(&self) -> QuadDecomposition {
        let nf = self.faces.len();
        let is_quad: Vec<bool> = self.faces.iter().map(|f| !f.is_outer && f.size() == 4).collect();
        let mut comp = vec![usize::MAX; nf];
        let mut components = Vec::new();
        for s in 0..nf {
            if !is_quad[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let f = members[i];
                i += 1;
                for &d in &self.faces[f].darts {
                    let g = self.face_of[self.twin[d]];
                    if is_quad[g] && comp[g] == usize::MAX {
                        comp[g] = id;
                        members.push(g);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }

        let components = components
            .into_iter()
            .enumerate()
            .map(|(id, members)| {
                // Flood the remaining faces from the outer face without crossing component edges.
                let in_comp = |f: usize| comp[f] == id;
                let mut region = vec![false; nf];
                region[self.outer] = true;
                let mut stack = vec![self.outer];
                while let Some(f) = stack.pop() {
                    for &d in &self.faces[f].darts {
                        let g = self.face_of[self.twin[d]];
                        if !in_comp(g) && !region[g] {
                            region[g] = true;
                            stack.push(g);
                        }
                    }
                }
                let boundary_length = members
                    .iter()
                    .flat_map(|&f| self.faces[f].darts.iter())
                    .filter(|&&d| region[self.face_of[self.twin[d]]])
                    .count();
                QuadComponent { q: members.len(), quad_faces: members, boundary_length }
            })
            .collect();
        QuadDecomposition { components }
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        canon::canonical_code(self)
    }

    /// Applies `perm` (old label -> new label).
    pub fn relabel(&self, perm: &[usize]) -> PlaneGraph {
        let n = self.n();
        let mut rot = vec![Vec::new(); n];
        for v in 0..n {
            rot[perm[v]] = self.rotation[v].iter().map(|&w| perm[w]).collect();
        }
        let (u, v) = self.outer_hint();
        PlaneGraph::from_rotation_system(rot, (perm[u], perm[v])).expect("relabelling preserves validity")
    }

    /// Mirror image: every rotation reversed.
    pub fn mirror(&self) -> PlaneGraph {
        let rot = self.rotation.iter().map(|r| r.iter().rev().copied().collect()).collect();
        let (u, v) = self.outer_hint();
        PlaneGraph::from_rotation_system(rot, (v, u)).expect("mirroring preserves validity")
    }

    /// Cycle `C_m` with vertices `0..m` in counter-clockwise order.
    pub fn cycle(m: usize) -> PlaneGraph {
        let rot = (0..m).map(|i| vec![(i + 1) % m, (i + m - 1) % m]).collect();
        PlaneGraph::from_rotation_system(rot, (1, 0)).expect("cycle is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> PlaneGraph {
        PlaneGraph::from_rotation_system(vec![vec![1, 2], vec![2, 0], vec![0, 1]], (0, 1)).unwrap()
    }

    /// Rhombus 0,1,2,3 with short diagonal 0-2; 0 at the origin, 2 at (1,0).
    pub(crate) fn rhombus() -> PlaneGraph {
        // 1 above, 3 below the diagonal.
        PlaneGraph::from_rotation_system(
            vec![vec![3, 2, 1], vec![0, 2], vec![1, 0, 3], vec![2, 0]],
            (0, 1),
        )
        .unwrap()
    }

    #[test]
    fn triangle_has_two_faces() {
        let g = triangle();
        assert_eq!(g.faces().len(), 2);
        assert_eq!(g.edge_count(), 3);
        let p = g.face_profile();
        assert_eq!((p.n, p.k, p.tau, p.a(3)), (3, 3, 6, 2));
    }

    #[test]
    fn five_cycle() {
        let g = PlaneGraph::cycle(5);
        assert_eq!(g.faces().len(), 2);
        assert!(g.faces().iter().all(|f| f.size() == 5));
        assert_eq!(g.face_profile().tau, 10);
    }

    #[test]
    fn asymmetric_rotation_rejected() {
        let err = PlaneGraph::from_rotation_system(vec![vec![1, 2], vec![2], vec![0, 1]], (0, 1)).unwrap_err();
        assert_eq!(err, GraphError::AsymmetricRotation { u: 0, v: 1 });
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(
            PlaneGraph::from_rotation_system(vec![vec![1, 1], vec![0]], (0, 1)).unwrap_err(),
            GraphError::MultiEdge { u: 0, v: 1 }
        );
        assert_eq!(
            PlaneGraph::from_rotation_system(vec![vec![1], vec![0], vec![3], vec![2]], (0, 1)).unwrap_err(),
            GraphError::Disconnected
        );
        // K4 with a non-planar rotation.
        let err = PlaneGraph::from_rotation_system(
            vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]],
            (0, 1),
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::NonzeroGenus(_)));
        assert_eq!(triangle().dart(0, 0), None);
        assert!(matches!(
            PlaneGraph::from_rotation_system(vec![vec![1, 2], vec![2, 0], vec![0, 1]], (0, 0)),
            Err(GraphError::BadOuterHint { .. })
        ));
    }

    #[test]
    fn outer_walk_is_clockwise_and_starts_at_hint() {
        let g = rhombus();
        assert_eq!(g.outer_hint(), (0, 1));
        assert_eq!(g.outer_face().boundary, vec![0, 1, 2, 3]);
        assert_eq!(g.k(), 4);
    }

    #[test]
    fn connectivity_examples() {
        // Two triangles sharing vertex 0.
        let bowtie = PlaneGraph::from_rotation_system(
            vec![vec![3, 2, 1, 4], vec![0, 2], vec![1, 0], vec![0, 4], vec![3, 0]],
            (0, 1),
        )
        .unwrap();
        assert_eq!(bowtie.connectivity_level(), Ok(Connectivity::One));
        assert_eq!(rhombus().connectivity_level(), Ok(Connectivity::Two));
        assert_eq!(triangle().connectivity_level(), Ok(Connectivity::ThreePlus));
        let octa = octahedron();
        assert_eq!(octa.face_profile().a(3), 8);
        assert_eq!(octa.connectivity_level(), Ok(Connectivity::ThreePlus));
        let single = PlaneGraph::from_rotation_system(vec![vec![]], (0, 0));
        assert!(single.is_err());
    }

    pub(crate) fn octahedron() -> PlaneGraph {
        // Outer triangle 0,1,2 (ccw), inner triangle 3,4,5 with 3 near edge 01.
        PlaneGraph::from_rotation_system(
            vec![
                vec![1, 3, 5, 2],
                vec![2, 4, 3, 0],
                vec![0, 5, 4, 1],
                vec![0, 1, 4, 5],
                vec![3, 1, 2, 5],
                vec![4, 2, 0, 3],
            ],
            (0, 2),
        )
        .unwrap()
    }

    #[test]
    fn quadrangles() {
        assert!(triangle().quadrangle_decomposition().components.is_empty());
        let sq = PlaneGraph::cycle(4);
        // The only 4-gons of C4 are one inner and the outer face.
        let d = sq.quadrangle_decomposition();
        assert_eq!(d.components.len(), 1);
        assert_eq!((d.components[0].q, d.components[0].boundary_length), (1, 4));
    }
}
