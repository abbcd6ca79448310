//! Enumeration and realizability checking for 4-regular matchstick graphs: plane graphs
//! with unit-length, pairwise non-crossing straight edges in which every vertex off the
//! outer face has degree four.

pub mod canon;
pub mod criteria;
pub mod figures;
pub mod generator;
pub mod geom;
pub mod io;
pub mod par;
pub mod plane_graph;
pub mod realizer;

pub use canon::CanonicalCode;
pub use plane_graph::{Connectivity, Face, FaceProfile, GraphError, PlaneGraph, QuadDecomposition};
