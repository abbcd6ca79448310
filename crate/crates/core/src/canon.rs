//! Canonical byte codes for plane graphs with a designated outer face.
//!
//! The code is the lexicographic minimum of breadth-first codes taken over every dart of
//! the outer face, in both orientations. A code is `n` followed by, for each vertex in
//! discovery order, the labels of its neighbours in rotation order and a `0` terminator.
//! Labels start at 1.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::plane_graph::{GraphError, PlaneGraph};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalCode(pub Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if s.len() % 2 != 0 {
            return None;
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(s.get(i..i + 2)?, 16).ok())
            .collect::<Option<Vec<u8>>>()
            .map(CanonicalCode)
    }

    /// Rebuilds the graph the code describes. Vertex `i` of the result carries label `i + 1`.
    pub fn decode(&self) -> Result<PlaneGraph, GraphError> {
        let b = &self.0;
        let n = *b.first().ok_or(GraphError::Empty)? as usize;
        let mut rot = vec![Vec::new(); n];
        let mut i = 1;
        for r in rot.iter_mut() {
            loop {
                let x = *b.get(i).ok_or(GraphError::Empty)? as usize;
                i += 1;
                if x == 0 {
                    break;
                }
                r.push(x - 1);
            }
        }
        let first = *rot.first().and_then(|r| r.first()).ok_or(GraphError::Empty)?;
        PlaneGraph::from_rotation_system(rot, (0, first))
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

/// Rotation system in compressed rows: the neighbours of `v` are
/// `adj[start[v]..start[v + 1]]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlatRotation {
    pub start: Vec<u32>,
    pub adj: Vec<u32>,
}

impl FlatRotation {
    pub fn from_rows(rot: &[Vec<usize>]) -> Self {
        let mut start = Vec::with_capacity(rot.len() + 1);
        let mut adj = Vec::with_capacity(rot.iter().map(Vec::len).sum());
        start.push(0);
        for r in rot {
            adj.extend(r.iter().map(|&w| w as u32));
            start.push(adj.len() as u32);
        }
        FlatRotation { start, adj }
    }

    pub fn n(&self) -> usize {
        self.start.len() - 1
    }

    pub fn row(&self, v: usize) -> &[u32] {
        &self.adj[self.start[v] as usize..self.start[v + 1] as usize]
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n()).map(|v| self.row(v).iter().map(|&w| w as usize).collect()).collect()
    }
}

/// Buffers reused across minimisations.
#[derive(Default)]
pub struct Scratch {
    label: Vec<u8>,
    order: Vec<usize>,
    parent: Vec<usize>,
    out: Vec<u8>,
    best: Vec<u8>,
}

/// Breadth-first code from the dart `u -> v`. With `mirror`, rotations are read clockwise.
/// Stores the code and returns `true` when it is smaller than the best so far; stops as
/// soon as the partial code exceeds it.
fn bfs_code(rot: &FlatRotation, u: usize, v: usize, mirror: bool, sc: &mut Scratch) -> bool {
    let n = rot.n();
    sc.label.clear();
    sc.label.resize(n, 0);
    sc.parent.clear();
    sc.parent.resize(n, usize::MAX);
    sc.order.clear();
    sc.out.clear();
    sc.out.reserve(1 + n + rot.adj.len());
    let Scratch { label, order, parent, out, best } = sc;
    let mut tight = !best.is_empty();
    let mut push = |out: &mut Vec<u8>, x: u8| -> bool {
        out.push(x);
        if tight {
            match x.cmp(&best[out.len() - 1]) {
                Ordering::Less => tight = false,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        true
    };
    if !push(out, n as u8) {
        return false;
    }
    label[u] = 1;
    order.push(u);
    parent[u] = v;
    let mut qi = 0;
    while qi < order.len() {
        let x = order[qi];
        qi += 1;
        let r = rot.row(x);
        let deg = r.len();
        let s = r.iter().position(|&w| w as usize == parent[x]).unwrap();
        for i in 0..deg {
            let y = if mirror { r[(s + deg - i) % deg] } else { r[(s + i) % deg] } as usize;
            if label[y] == 0 {
                order.push(y);
                label[y] = order.len() as u8;
                parent[y] = x;
            }
            if !push(out, label[y]) {
                return false;
            }
        }
        if !push(out, 0) {
            return false;
        }
    }
    if tight {
        return false;
    }
    std::mem::swap(out, best);
    true
}

/// Canonical code of the plane graph given by `rot` whose outer face is traced by the
/// closed vertex walk `walk`.
pub fn code_from_walk(rot: &FlatRotation, walk: &[usize]) -> CanonicalCode {
    code_from_walk_in(rot, walk, &mut Scratch::default())
}

/// [`code_from_walk`] with caller-owned buffers.
pub fn code_from_walk_in(rot: &FlatRotation, walk: &[usize], sc: &mut Scratch) -> CanonicalCode {
    sc.best.clear();
    let len = walk.len();
    // The first two rows of a code have the lengths of the first two degrees, and a
    // shorter row sorts first, so only darts with the least degree pair can win.
    let deg = |v: usize| rot.row(v).len();
    let key = |i: usize| (deg(walk[i]), deg(walk[(i + 1) % len]));
    let fwd = (0..len).map(key).min().expect("outer face has at least one dart");
    let bwd = (0..len).map(|i| (key(i).1, key(i).0)).min().unwrap();
    let best = fwd.min(bwd);
    for i in 0..len {
        let (u, v) = (walk[i], walk[(i + 1) % len]);
        if (deg(u), deg(v)) == best {
            bfs_code(rot, u, v, false, sc);
        }
        if (deg(v), deg(u)) == best {
            bfs_code(rot, v, u, true, sc);
        }
    }
    CanonicalCode(sc.best.clone())
}

pub fn canonical_code(g: &PlaneGraph) -> CanonicalCode {
    code_from_walk(&FlatRotation::from_rows(g.rotations()), &g.outer_face().boundary)
}
