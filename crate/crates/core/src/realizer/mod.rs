//! Numerical realizability of plane graphs as matchstick graphs.
//!
//! The pipeline in [`solve`]: rigid-body propagation over clusters of forced vertices,
//! a one-parameter hinge scan when exactly one degree of freedom remains, and a
//! least-squares search with restarts otherwise. Refutations always carry a witness and
//! the numeric gap that separates it from a valid configuration.

mod engine;
pub mod flex;
pub mod layout;
pub mod lsq;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::criteria::{Rule, Verdict};
use crate::geom::{self, Point};
use crate::plane_graph::PlaneGraph;

pub use engine::{rigid_propagate, PartialPlacement};
pub use flex::{flex_scan, FlexExtrema, FlexSystem, LinearConstraint};

/// Distances closer than this to their target count as equal.
pub const MATCH_TOL: f64 = 1e-9;
/// Segments closer than this without sharing an endpoint count as crossing.
pub const CROSSING_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizeOptions {
    /// Largest accepted edge-length error for a realization.
    pub tol: f64,
    pub restarts: usize,
    /// Samples of the hinge angle over a full turn.
    pub flex_samples: usize,
    /// Largest number of hinges tried before falling back to least squares.
    pub flex_budget: usize,
    /// Smallest gap accepted as a refutation.
    pub gap_tol: f64,
    /// Extra entropy mixed into the restart seed.
    pub seed: u64,
}

impl Default for RealizeOptions {
    fn default() -> Self {
        RealizeOptions { tol: 1e-9, restarts: 64, flex_samples: 720, flex_budget: 8, gap_tol: 1e-6, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub coords: Vec<Point>,
    pub max_edge_error: f64,
    pub crossing_free: bool,
    /// Absolute shoelace area of the outer boundary walk.
    pub outer_area: f64,
}

impl Realization {
    pub fn from_coords(g: &PlaneGraph, coords: Vec<Point>) -> Self {
        let max_edge_error = max_edge_error(g, &coords);
        let crossing_free = first_crossing(g, &coords).is_none();
        let walk: Vec<Point> = g.outer_face().boundary.iter().map(|&v| coords[v]).collect();
        let outer_area = geom::signed_area(&walk).abs();
        Realization { coords, max_edge_error, crossing_free, outer_area }
    }

    /// Outer area in units of the unit equilateral triangle.
    pub fn area_ratio(&self) -> f64 {
        self.outer_area / (3f64.sqrt() / 4.0)
    }
}

/// Evidence that no valid configuration exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The forced distance between `u` and `v` differs from the required one.
    Distance { u: usize, v: usize, measured: f64, required: f64 },
    /// Two edges without a common endpoint are forced to cross.
    Crossing { e: (usize, usize), f: (usize, usize) },
    /// The neighbours of `vertex` are forced into the wrong cyclic order.
    Rotation { vertex: usize },
    /// An inner face is forced to clockwise orientation.
    FaceOrientation { face: usize },
    /// `u` is forced onto `v`, or onto an edge at `v`.
    Coincident { u: usize, v: usize },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Distance { u, v, measured, required } => {
                write!(f, "|{u}-{v}| = {measured:.12} but must be {required:.12}")
            }
            Witness::Crossing { e, f: g } => write!(f, "edges {}-{} and {}-{} cross", e.0, e.1, g.0, g.1),
            Witness::Rotation { vertex } => write!(f, "neighbours of {vertex} out of rotation order"),
            Witness::FaceOrientation { face } => write!(f, "face {face} is clockwise"),
            Witness::Coincident { u, v } => write!(f, "vertex {u} is forced onto {v} or an edge at {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RealizeVerdict {
    Realizable(Realization),
    Infeasible { witness: Witness, gap: f64 },
    /// A one-parameter family whose unit-length configurations are all degenerate.
    Flexible { summary: String, min_residual: f64, degenerate_roots: Vec<f64> },
    Unknown { reason: String },
}

impl RealizeVerdict {
    pub fn is_realizable(&self) -> bool {
        matches!(self, RealizeVerdict::Realizable(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            RealizeVerdict::Realizable(_) => "realizable",
            RealizeVerdict::Infeasible { .. } => "infeasible",
            RealizeVerdict::Flexible { .. } => "flexible",
            RealizeVerdict::Unknown { .. } => "unknown",
        }
    }

    /// Separation from the nearest valid configuration, when the verdict is a refutation.
    pub fn gap(&self) -> Option<f64> {
        match self {
            RealizeVerdict::Infeasible { gap, .. } => Some(*gap),
            RealizeVerdict::Flexible { min_residual, .. } => Some(*min_residual),
            _ => None,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            RealizeVerdict::Realizable(r) => format!("realizable, max edge error {:.3e}", r.max_edge_error),
            RealizeVerdict::Infeasible { witness, gap } => format!("infeasible: {witness} (gap {gap:.3e})"),
            RealizeVerdict::Flexible { summary, .. } => format!("flexible: {summary}"),
            RealizeVerdict::Unknown { reason } => format!("unknown: {reason}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("circle intersection near vertex {0} is numerically degenerate")]
    NumericallyDegenerate(usize),
    #[error("forced conflict: {0}")]
    Conflict(Witness),
    #[error("({0}, {1}) is not an edge")]
    BadBase(usize, usize),
    #[error("empty parameter domain")]
    EmptyDomain,
    #[error("need at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("unsupported flex system: {0}")]
    Unsupported(String),
}

pub(crate) fn max_edge_error(g: &PlaneGraph, coords: &[Point]) -> f64 {
    g.edges().iter().map(|&(u, v)| (coords[u].dist(coords[v]) - 1.0).abs()).fold(0.0, f64::max)
}

/// First pair of edges without a common endpoint closer than [`CROSSING_TOL`], plus
/// overlapping edges at a shared endpoint.
pub(crate) fn first_crossing(g: &PlaneGraph, coords: &[Point]) -> Option<((usize, usize), (usize, usize))> {
    let edges = g.edges();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            let shared = a == c || a == d || b == c || b == d;
            if !shared {
                if geom::segment_distance(coords[a], coords[b], coords[c], coords[d]) < CROSSING_TOL {
                    return Some(((a, b), (c, d)));
                }
            } else {
                let (o, x, y) = if a == c {
                    (a, b, d)
                } else if a == d {
                    (a, b, c)
                } else if b == c {
                    (b, a, d)
                } else {
                    (b, a, c)
                };
                let (px, py) = (coords[x] - coords[o], coords[y] - coords[o]);
                if px.cross(py).abs() < CROSSING_TOL && px.dot(py) > 0.0 {
                    return Some(((a, b), (c, d)));
                }
            }
        }
    }
    None
}

/// Full embedding check: unit edges, no crossings, distinct vertices, rotation order and
/// face orientation consistent with the plane graph.
pub(crate) fn check_embedding(g: &PlaneGraph, coords: &[Point], tol: f64) -> Result<(), String> {
    if coords.len() != g.n() {
        return Err(format!("{} coordinates for {} vertices", coords.len(), g.n()));
    }
    if coords.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    for (u, v) in g.edges() {
        let l = coords[u].dist(coords[v]);
        if (l - 1.0).abs() > tol {
            return Err(format!("edge {u}-{v} has length {l:.12}"));
        }
    }
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if coords[u].dist(coords[v]) < CROSSING_TOL {
                return Err(format!("vertices {u} and {v} coincide"));
            }
        }
    }
    if let Some((e, f)) = first_crossing(g, coords) {
        return Err(format!("edges {}-{} and {}-{} cross", e.0, e.1, f.0, f.1));
    }
    for v in 0..g.n() {
        let ring: Vec<Point> = g.rotation(v).iter().map(|&w| coords[w]).collect();
        if !geom::ccw_cyclic_order(coords[v], &ring) {
            return Err(format!("rotation at {v} violated"));
        }
    }
    for (i, f) in g.faces().iter().enumerate() {
        let poly: Vec<Point> = f.boundary.iter().map(|&v| coords[v]).collect();
        let a = geom::signed_area(&poly);
        let ok = if f.is_outer { a < 0.0 } else { a > 0.0 };
        if !ok {
            return Err(format!("face {i} has signed area {a:.3e}"));
        }
    }
    Ok(())
}

/// Checks that `coords` is a matchstick embedding of `g` within `tol`.
pub fn verify_realization(g: &PlaneGraph, coords: &[Point], tol: f64) -> Verdict {
    match check_embedding(g, coords, tol) {
        Ok(()) => Verdict {
            passed: true,
            rule: Rule::Realizable,
            witness: format!("max edge error {:.3e} <= {tol:e}", max_edge_error(g, coords)),
        },
        Err(w) => Verdict { passed: false, rule: Rule::Realizable, witness: w },
    }
}

/// Rigid-propagation refutation only. `Some` when every branch of the forced placement
/// ends in a conflict with gap above `opts.gap_tol`.
pub fn refute(g: &PlaneGraph, opts: &RealizeOptions) -> Option<RealizeVerdict> {
    engine::strict_refutation(g, None, opts).map(|(witness, gap)| RealizeVerdict::Infeasible { witness, gap })
}

/// Decides realizability of `g`.
pub fn solve(g: &PlaneGraph, opts: &RealizeOptions) -> RealizeVerdict {
    engine::solve(g, opts)
}
