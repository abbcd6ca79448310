//! Combinatorial criteria for incomplete 4-regular matchstick graphs. Each check returns
//! a [`Verdict`] whose witness spells out the instantiated inequality.

pub mod bounds;
pub mod patterns;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::plane_graph::{FaceProfile, PlaneGraph};
pub use bounds::{
    a4_upper_bound, area_upper, bounds_row, cut_decomposition_bound, f4_upper_bound, quad_boundary_bound,
    tau0_k10_exclusion, BoundError, BoundsRow, ExclusionTrace, BOUNDS_TABLE,
};
pub use patterns::{count_disjoint_fig1, PatternTemplate};

/// Slack granted to floating-point area comparisons, always in favour of passing.
pub const AREA_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    TauParity,
    EdgeSum,
    VertexSum,
    FaceCount,
    FaceWeight,
    TriangleBound,
    TauBounds,
    CorollaryBounds,
    AreaArgument,
    Degree2Triangle,
    QuadComponents,
    Realizable,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::TauParity => "tau_parity",
            Rule::EdgeSum => "edge_sum",
            Rule::VertexSum => "vertex_sum",
            Rule::FaceCount => "face_count",
            Rule::FaceWeight => "face_weight",
            Rule::TriangleBound => "triangle_bound",
            Rule::TauBounds => "tau_bounds",
            Rule::CorollaryBounds => "corollary_bounds",
            Rule::AreaArgument => "area_argument",
            Rule::Degree2Triangle => "degree2_triangle",
            Rule::QuadComponents => "quad_components",
            Rule::Realizable => "realizable",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub rule: Rule,
    pub witness: String,
}

impl Verdict {
    fn new(passed: bool, rule: Rule, witness: String) -> Self {
        Verdict { passed, rule, witness }
    }
}

pub fn euler_relations_check(p: &FaceProfile) -> Verdict {
    let s: i64 = p.weighted_sum();
    let w: i64 = p.census.iter().map(|(&i, &c)| (4 - i as i64) * c).sum();
    if p.tau % 2 != 0 || p.tau < 0 {
        return Verdict::new(false, Rule::TauParity, format!("tau = {} is not a non-negative even integer", p.tau));
    }
    if w != 8 - p.tau {
        return Verdict::new(false, Rule::FaceWeight, format!("sum (4-i)*A_i = {} != 8 - tau = {}", w, 8 - p.tau));
    }
    if 2 * p.edges != s {
        return Verdict::new(false, Rule::EdgeSum, format!("2|E| = {} != sum i*A_i = {}", 2 * p.edges, s));
    }
    if 4 * p.n != s + p.tau {
        return Verdict::new(
            false,
            Rule::VertexSum,
            format!("4n = {} != sum i*A_i + tau = {} + {}", 4 * p.n, s, p.tau),
        );
    }
    if 2 * p.n != 2 * p.faces - 4 + p.tau {
        return Verdict::new(
            false,
            Rule::FaceCount,
            format!("n = {} != |F| - 2 + tau/2 = {} - 2 + {}/2", p.n, p.faces, p.tau),
        );
    }
    Verdict::new(true, Rule::FaceWeight, format!("sum (4-i)*A_i = {} = 8 - {}", w, p.tau))
}

pub fn triangle_lower_bound(p: &FaceProfile) -> Verdict {
    let need = 4 + p.k - p.tau;
    let a3 = p.a(3);
    let rel = if a3 >= need { ">=" } else { "<" };
    Verdict::new(
        a3 >= need,
        Rule::TriangleBound,
        format!("A_3 = {a3} {rel} 4 + k - tau = 4 + {} - {} = {need}", p.k, p.tau),
    )
}

pub fn corollary_bounds_check(p: &FaceProfile, has_inner: bool) -> Verdict {
    if !has_inner {
        return Verdict::new(true, Rule::CorollaryBounds, "no inner vertices".into());
    }
    let Ok(area) = area_upper(p.k) else {
        return Verdict::new(false, Rule::CorollaryBounds, format!("k = {} < 3", p.k));
    };
    if 2 * p.n < 10 + 2 * p.k - p.tau {
        return Verdict::new(
            false,
            Rule::CorollaryBounds,
            format!("n = {} < 5 + k - tau/2 = 5 + {} - {}/2", p.n, p.k, p.tau),
        );
    }
    let need = 6 + p.k - p.tau;
    if area + AREA_MARGIN < need as f64 {
        return Verdict::new(
            false,
            Rule::CorollaryBounds,
            format!("area_upper({}) = {area:.6} < 6 + k - tau = {need}", p.k),
        );
    }
    Verdict::new(
        true,
        Rule::CorollaryBounds,
        format!("n = {} >= {}/2 and area_upper({}) = {area:.6} >= {need}", p.n, 10 + 2 * p.k - p.tau, p.k),
    )
}

/// Area bound against odd faces plus two per disjoint configuration.
pub fn area_argument_check(g: &PlaneGraph) -> Verdict {
    area_argument_from(&g.face_profile(), count_disjoint_fig1(g))
}

pub fn area_argument_from(p: &FaceProfile, configurations: usize) -> Verdict {
    let Ok(area) = area_upper(p.k) else {
        return Verdict::new(false, Rule::AreaArgument, format!("k = {} < 3", p.k));
    };
    let odd = p.odd_faces();
    let need = odd + 2 * configurations as i64;
    let ok = area + AREA_MARGIN >= need as f64;
    let rel = if ok { ">=" } else { "<" };
    Verdict::new(
        ok,
        Rule::AreaArgument,
        format!("area_upper({}) = {area:.6} {rel} odd faces {odd} + 2*{configurations} = {need}", p.k),
    )
}

pub fn tau_bounds_check(p: &FaceProfile) -> Result<Verdict, BoundError> {
    let row = bounds_row(p.tau)?;
    if row.single_vertex_allowed && p.n == 1 {
        return Ok(Verdict::new(true, Rule::TauBounds, "single vertex".into()));
    }
    let a3 = p.a(3);
    let checks = [
        (p.k >= row.min_k, format!("k = {} vs {}", p.k, row.min_k)),
        (a3 >= row.min_a3, format!("A_3 = {a3} vs {}", row.min_a3)),
        (p.n >= row.min_n, format!("n = {} vs {}", p.n, row.min_n)),
    ];
    for (ok, what) in &checks {
        if !ok {
            return Ok(Verdict::new(false, Rule::TauBounds, format!("tau = {}: {what} required", p.tau)));
        }
    }
    Ok(Verdict::new(
        true,
        Rule::TauBounds,
        format!("tau = {}: k = {}, A_3 = {a3}, n = {} meet the row", p.tau, p.k, p.n),
    ))
}

/// Fails when an outer vertex of degree 2 lies on an inner triangle.
pub fn degree2_inner_triangle_check(g: &PlaneGraph) -> Verdict {
    let outer = g.outer_index();
    for v in 0..g.n() {
        if !g.is_outer_vertex(v) || g.degree(v) != 2 {
            continue;
        }
        for &w in g.rotation(v) {
            let f = g.face_of(g.dart(v, w).unwrap());
            if f != outer && g.faces()[f].size() == 3 {
                return Verdict::new(
                    false,
                    Rule::Degree2Triangle,
                    format!("outer vertex {v} has degree 2 and lies on inner triangle {:?}", g.faces()[f].boundary),
                );
            }
        }
    }
    Verdict::new(true, Rule::Degree2Triangle, "no degree-2 outer vertex on an inner triangle".into())
}

pub fn quad_component_check(g: &PlaneGraph) -> Verdict {
    let p = g.face_profile();
    if p.k < 5 {
        return Verdict::new(true, Rule::QuadComponents, format!("k = {} < 5, not applicable", p.k));
    }
    let d = g.quadrangle_decomposition();
    let inner_quads = g.faces().iter().filter(|f| !f.is_outer && f.size() == 4).count();
    let total_q: usize = d.components.iter().map(|c| c.q).sum();
    if total_q != inner_quads {
        return Verdict::new(
            false,
            Rule::QuadComponents,
            format!("sum q_i = {total_q} != A_4 = {inner_quads}"),
        );
    }
    let lhs: i64 = 3 * p.a(3) + (5..=p.k as usize).map(|i| i as i64 * p.a(i)).sum::<i64>();
    let rhs: i64 = d.components.iter().map(|c| quad_boundary_bound(c.q) as i64).sum();
    let rel = if lhs >= rhs { ">=" } else { "<" };
    Verdict::new(
        lhs >= rhs,
        Rule::QuadComponents,
        format!("3*A_3 + sum_(i=5..k) i*A_i = {lhs} {rel} sum 2*ceil(2*sqrt(q_i)) = {rhs}"),
    )
}

/// Criteria selectable in a search. Monotone ones may cut partial graphs; final ones
/// only judge complete candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filter {
    /// Inner vertices can only accumulate, so their count is capped by `max_n - k_min`.
    InnerBudget,
    /// Inner faces are permanent; their weighted size excess is capped by the face identities.
    FaceBudget,
    /// Partial graphs refuted by the realizer are not expanded.
    RigidPrune,
    Euler,
    TriangleBound,
    TauBounds,
    Corollary,
    AreaArgument,
    Degree2Triangle,
    QuadComponents,
    Realize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Monotone,
    Final,
}

impl Filter {
    pub const ALL: [Filter; 11] = [
        Filter::InnerBudget,
        Filter::FaceBudget,
        Filter::RigidPrune,
        Filter::Euler,
        Filter::TriangleBound,
        Filter::TauBounds,
        Filter::Corollary,
        Filter::AreaArgument,
        Filter::Degree2Triangle,
        Filter::QuadComponents,
        Filter::Realize,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Filter::InnerBudget => "inner_budget",
            Filter::FaceBudget => "face_budget",
            Filter::RigidPrune => "rigid_prune",
            Filter::Euler => "euler",
            Filter::TriangleBound => "triangle",
            Filter::TauBounds => "tau_bounds",
            Filter::Corollary => "corollary",
            Filter::AreaArgument => "area",
            Filter::Degree2Triangle => "degree2",
            Filter::QuadComponents => "quad",
            Filter::Realize => "realize",
        }
    }

    pub fn stage(self) -> Stage {
        match self {
            Filter::InnerBudget | Filter::FaceBudget | Filter::RigidPrune => Stage::Monotone,
            _ => Stage::Final,
        }
    }

    /// Position in the evaluation pipeline: integer checks, then pattern and area
    /// checks, then the realizer.
    pub fn cost_rank(self) -> u8 {
        match self {
            Filter::InnerBudget | Filter::FaceBudget => 0,
            Filter::Euler => 1,
            Filter::TriangleBound => 2,
            Filter::TauBounds => 3,
            Filter::Corollary => 4,
            Filter::Degree2Triangle => 5,
            Filter::QuadComponents => 6,
            Filter::AreaArgument => 7,
            Filter::RigidPrune => 8,
            Filter::Realize => 9,
        }
    }

    /// The combinatorial criteria used for the minimum-graph search.
    pub fn default_set() -> Vec<Filter> {
        vec![
            Filter::InnerBudget,
            Filter::FaceBudget,
            Filter::Euler,
            Filter::TriangleBound,
            Filter::TauBounds,
            Filter::Corollary,
            Filter::AreaArgument,
            Filter::Degree2Triangle,
            Filter::QuadComponents,
        ]
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Filter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Filter::ALL.iter().copied().find(|f| f.id() == s).ok_or_else(|| format!("unknown filter `{s}`"))
    }
}

/// Evaluates the final-stage combinatorial filters in pipeline order. With `accumulate`,
/// every filter runs; otherwise evaluation stops at the first failure.
pub fn evaluate_final(g: &PlaneGraph, filters: &[Filter], accumulate: bool) -> Vec<Verdict> {
    let p = g.face_profile();
    let has_inner = g.inner_vertex_count() > 0;
    let mut ordered: Vec<Filter> = filters.iter().copied().filter(|f| f.stage() == Stage::Final).collect();
    ordered.sort_by_key(|f| f.cost_rank());
    ordered.dedup();
    let mut out = Vec::new();
    for f in ordered {
        let v = match f {
            Filter::Euler => euler_relations_check(&p),
            Filter::TriangleBound => triangle_lower_bound(&p),
            Filter::TauBounds => tau_bounds_check(&p).unwrap_or_else(|e| Verdict::new(false, Rule::TauBounds, e.to_string())),
            Filter::Corollary => corollary_bounds_check(&p, has_inner),
            Filter::AreaArgument => {
                if has_inner {
                    area_argument_check(g)
                } else {
                    Verdict::new(true, Rule::AreaArgument, "no inner vertices".into())
                }
            }
            Filter::Degree2Triangle => degree2_inner_triangle_check(g),
            Filter::QuadComponents => quad_component_check(g),
            _ => continue,
        };
        let failed = !v.passed;
        out.push(v);
        if failed && !accumulate {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn profile(n: i64, e: i64, f: i64, k: i64, tau: i64, census: &[(usize, i64)]) -> FaceProfile {
        FaceProfile { n, edges: e, faces: f, k, tau, census: census.iter().copied().collect::<BTreeMap<_, _>>() }
    }

    #[test]
    fn euler_examples() {
        assert!(euler_relations_check(&PlaneGraph::cycle(3).face_profile()).passed);
        let odd = profile(3, 3, 2, 3, 3, &[(3, 2)]);
        assert_eq!(euler_relations_check(&odd).rule, Rule::TauParity);
        let lone = profile(0, 0, 1, 0, 0, &[(3, 1)]);
        let v = euler_relations_check(&lone);
        assert!(!v.passed);
        assert_eq!(v.rule, Rule::FaceWeight);
        assert!(v.witness.contains("= 1 != 8 - tau = 8"));
    }

    #[test]
    fn later_identities_are_named() {
        // A lone 4-gon at tau = 8 balances the face weights.
        let p = profile(1, 0, 1, 0, 8, &[(4, 1)]);
        assert_eq!(euler_relations_check(&p).rule, Rule::EdgeSum);
        let p = profile(1, 2, 1, 0, 8, &[(4, 1)]);
        assert_eq!(euler_relations_check(&p).rule, Rule::VertexSum);
        let p = profile(3, 2, 2, 0, 8, &[(4, 1)]);
        assert_eq!(euler_relations_check(&p).rule, Rule::FaceCount);
    }

    #[test]
    fn triangle_bound_examples() {
        assert!(triangle_lower_bound(&PlaneGraph::cycle(3).face_profile()).passed);
        let p = profile(0, 0, 0, 11, 0, &[(3, 14)]);
        assert!(!triangle_lower_bound(&p).passed);
        assert!(triangle_lower_bound(&PlaneGraph::cycle(5).face_profile()).passed);
    }

    #[test]
    fn area_examples() {
        let tri = PlaneGraph::cycle(3);
        assert!(!area_argument_check(&tri).passed);
        let p = profile(0, 0, 0, 11, 0, &[(3, 17)]);
        assert!(area_argument_from(&p, 0).passed);
        let p = profile(0, 0, 0, 10, 0, &[(3, 16)]);
        assert!(!area_argument_from(&p, 1).passed);
    }

    #[test]
    fn corollary_examples() {
        let p = profile(11, 0, 0, 8, 4, &[]);
        assert!(corollary_bounds_check(&p, true).passed);
        let p = profile(20, 0, 0, 9, 0, &[]);
        assert!(!corollary_bounds_check(&p, true).passed);
        assert!(corollary_bounds_check(&p, false).passed);
    }

    #[test]
    fn tau_bounds_examples() {
        let p = profile(33, 0, 0, 12, 0, &[(3, 16)]);
        assert!(tau_bounds_check(&p).unwrap().passed);
        let p = profile(20, 0, 0, 8, 2, &[(3, 20)]);
        assert!(!tau_bounds_check(&p).unwrap().passed);
        let p = profile(1, 0, 1, 1, 4, &[]);
        assert!(tau_bounds_check(&p).unwrap().passed);
        let p = profile(1, 0, 1, 1, 6, &[]);
        assert_eq!(tau_bounds_check(&p), Err(BoundError::UnsupportedTau(6)));
    }

    #[test]
    fn filter_ids_roundtrip() {
        for f in Filter::ALL {
            assert_eq!(f.id().parse::<Filter>(), Ok(f));
        }
        assert!("bogus".parse::<Filter>().is_err());
    }
}
