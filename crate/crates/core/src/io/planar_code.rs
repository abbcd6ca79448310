//! The 8-bit planar_code format: an ASCII header, then per graph a vertex count byte and,
//! for every vertex, its 1-based neighbours in rotation order followed by `0`.
//!
//! The format carries no outer face. Records written here put a dart of the outer face
//! first in the row of vertex 1, and reading takes the face of that dart as outer.

use std::io::{Read, Write};
use thiserror::Error;

use crate::plane_graph::{GraphError, PlaneGraph};

pub const HEADER: &[u8] = b">>planar_code<<";

#[derive(Debug, Error)]
pub enum PlanarCodeError {
    #[error("stream does not start with >>planar_code<<")]
    BadHeader,
    #[error("record {0} is truncated")]
    TruncatedRecord(usize),
    #[error("record {record}: neighbour {value} out of range for {n} vertices")]
    VertexOutOfRange { record: usize, value: u8, n: usize },
    #[error("record {record}: {source}")]
    Graph { record: usize, source: GraphError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Record bytes for `g`. Labels are kept when vertex 0 lies on the outer face; otherwise
/// it swaps labels with the tail of the outer hint.
pub fn encode(g: &PlaneGraph) -> Vec<u8> {
    let g = if g.is_outer_vertex(0) {
        g.clone()
    } else {
        let t = g.outer_hint().0;
        let perm: Vec<usize> = (0..g.n()).map(|v| if v == 0 { t } else if v == t { 0 } else { v }).collect();
        g.relabel(&perm)
    };
    let first = g
        .outer_face()
        .darts
        .iter()
        .find(|&&d| g.tail(d) == 0)
        .map(|&d| g.head(d))
        .expect("vertex 0 is on the outer face");
    let mut out = Vec::with_capacity(1 + g.n() + g.dart_count());
    out.push(g.n() as u8);
    for v in 0..g.n() {
        let r = g.rotation(v);
        let s = if v == 0 { r.iter().position(|&w| w == first).unwrap() } else { 0 };
        out.extend((0..r.len()).map(|i| (r[(s + i) % r.len()] + 1) as u8));
        out.push(0);
    }
    out
}

/// Parses one record from the front of `bytes`, returning the graph and the bytes used.
pub fn decode(bytes: &[u8], record: usize) -> Result<(PlaneGraph, usize), PlanarCodeError> {
    let n = *bytes.first().ok_or(PlanarCodeError::TruncatedRecord(record))? as usize;
    let mut rot = vec![Vec::new(); n];
    let mut i = 1;
    for r in rot.iter_mut() {
        loop {
            let x = *bytes.get(i).ok_or(PlanarCodeError::TruncatedRecord(record))?;
            i += 1;
            if x == 0 {
                break;
            }
            if x as usize > n {
                return Err(PlanarCodeError::VertexOutOfRange { record, value: x, n });
            }
            r.push(x as usize - 1);
        }
    }
    let first = rot
        .first()
        .and_then(|r| r.first())
        .copied()
        .ok_or(PlanarCodeError::Graph { record, source: GraphError::Empty })?;
    let g = PlaneGraph::from_rotation_system(rot, (0, first)).map_err(|source| PlanarCodeError::Graph { record, source })?;
    Ok((g, i))
}

pub fn to_bytes<'a>(graphs: impl IntoIterator<Item = &'a PlaneGraph>) -> Vec<u8> {
    let mut out = HEADER.to_vec();
    for g in graphs {
        out.extend(encode(g));
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<Vec<PlaneGraph>, PlanarCodeError> {
    let mut rest = bytes.strip_prefix(HEADER).ok_or(PlanarCodeError::BadHeader)?;
    let mut out = Vec::new();
    while !rest.is_empty() {
        let (g, used) = decode(rest, out.len())?;
        out.push(g);
        rest = &rest[used..];
    }
    Ok(out)
}

pub fn write<'a>(graphs: impl IntoIterator<Item = &'a PlaneGraph>, w: &mut impl Write) -> Result<(), PlanarCodeError> {
    w.write_all(&to_bytes(graphs))?;
    Ok(())
}

pub fn read(r: &mut impl Read) -> Result<Vec<PlaneGraph>, PlanarCodeError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    from_bytes(&buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> PlaneGraph {
        PlaneGraph::from_rotation_system(vec![vec![1, 2], vec![0, 2], vec![0, 1]], (0, 1)).unwrap()
    }

    #[test]
    fn triangle_bytes() {
        let b = to_bytes([&triangle()]);
        assert_eq!(&b[..HEADER.len()], HEADER);
        assert_eq!(&b[HEADER.len()..], &[3, 2, 3, 0, 1, 3, 0, 1, 2, 0]);
    }

    #[test]
    fn empty_after_header() {
        assert!(from_bytes(HEADER).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(from_bytes(b">>planar_cod<<"), Err(PlanarCodeError::BadHeader)));
        let mut b = HEADER.to_vec();
        b.extend([3, 2, 4, 0, 1, 3, 0, 1, 2, 0]);
        assert!(matches!(from_bytes(&b), Err(PlanarCodeError::VertexOutOfRange { value: 4, n: 3, .. })));
        let mut b = HEADER.to_vec();
        b.extend([3, 2, 3, 0, 1, 3]);
        assert!(matches!(from_bytes(&b), Err(PlanarCodeError::TruncatedRecord(0))));
    }

    #[test]
    fn inner_vertex_zero_is_relabelled() {
        // Wheel-like graph whose vertex 0 is the hub.
        let rot = vec![vec![1, 2, 3], vec![2, 0, 3], vec![3, 0, 1], vec![1, 0, 2]];
        let g = PlaneGraph::from_rotation_system(rot, (1, 3)).unwrap();
        assert!(!g.is_outer_vertex(0));
        let back = from_bytes(&to_bytes([&g])).unwrap();
        assert_eq!(back[0].canonical_code(), g.canonical_code());
    }
}
