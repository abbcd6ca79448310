//! Exhaustive enumeration by face gluing.
//!
//! Every move glues one new inner face onto the outer boundary, so all graphs on a level
//! share their inner-face count and deduplication within a level is global. Levels are
//! processed in canonical-code order, which makes the output independent of scheduling.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};
use thiserror::Error;

use crate::canon::{self, CanonicalCode, FlatRotation};
use crate::criteria::{self, bounds_row, Filter, Rule, Stage, Verdict};
use crate::par;
use crate::plane_graph::PlaneGraph;
use crate::realizer::{self, RealizeOptions, RealizeVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Candidates with this outer deficiency.
    Tau(i64),
    /// Candidates with exactly this many outer vertices.
    ClassifyK(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub target: Target,
    pub max_n: usize,
    pub max_k: Option<usize>,
    pub require_two_connected: bool,
    pub filters: Vec<Filter>,
    /// Worker count; 0 uses every available thread, 1 runs sequentially.
    pub parallel_width: usize,
    pub s_max: usize,
    pub node_limit: Option<u64>,
    pub realize: RealizeOptions,
    /// Accumulate every verdict instead of stopping at the first failure.
    pub accumulate: bool,
}

impl SearchConfig {
    pub fn tau(tau: i64, max_n: usize) -> Self {
        SearchConfig {
            target: Target::Tau(tau),
            max_n,
            max_k: None,
            require_two_connected: true,
            filters: Filter::default_set(),
            parallel_width: 0,
            s_max: 12,
            node_limit: None,
            realize: RealizeOptions::default(),
            accumulate: false,
        }
    }

    pub fn classify(k: usize, max_n: usize, two_connected: bool) -> Self {
        SearchConfig {
            target: Target::ClassifyK(k),
            max_n,
            max_k: Some(k),
            require_two_connected: two_connected,
            filters: vec![Filter::InnerBudget, Filter::FaceBudget, Filter::Euler, Filter::RigidPrune, Filter::Realize],
            parallel_width: 0,
            s_max: 12,
            node_limit: None,
            realize: RealizeOptions::default(),
            accumulate: true,
        }
    }

    pub fn unfiltered(max_n: usize) -> Self {
        SearchConfig {
            target: Target::Tau(-1),
            max_n,
            max_k: None,
            require_two_connected: false,
            filters: Vec::new(),
            parallel_width: 0,
            s_max: max_n,
            node_limit: None,
            realize: RealizeOptions::default(),
            accumulate: false,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.max_n < 3 {
            return Err(SearchError::InvalidConfig(format!("max_n = {} is below 3", self.max_n)));
        }
        if self.max_n > 255 {
            return Err(SearchError::InvalidConfig(format!("max_n = {} exceeds 255", self.max_n)));
        }
        if self.s_max < 3 {
            return Err(SearchError::InvalidConfig(format!("s_max = {} is below 3", self.s_max)));
        }
        match self.target {
            Target::Tau(t) if t >= 0 && t % 2 != 0 => {
                Err(SearchError::InvalidConfig(format!("tau = {t} is odd")))
            }
            Target::ClassifyK(k) if k < 3 => Err(SearchError::InvalidConfig(format!("k = {k} is below 3"))),
            _ => Ok(()),
        }
    }

    fn has(&self, f: Filter) -> bool {
        self.filters.contains(&f)
    }

    /// Smallest outer size a complete candidate can have.
    fn k_min(&self) -> usize {
        match self.target {
            Target::ClassifyK(k) => k,
            Target::Tau(t) => bounds_row(t)
                .ok()
                .filter(|_| self.has(Filter::TauBounds))
                .map_or(3, |r| r.min_k as usize),
        }
    }

    fn inner_budget(&self) -> usize {
        self.max_n.saturating_sub(self.k_min())
    }

    /// Upper bound on the sum of `(s - 3)` over inner faces of size `s >= 4`.
    fn face_budget(&self) -> i64 {
        let k = self.k_min() as i64;
        let tau_max = match self.target {
            Target::Tau(t) if t >= 0 => t,
            _ => 2 * self.max_k.map_or(self.max_n as i64, |k| k as i64),
        };
        self.max_n as i64 - k - 3 + tau_max / 2
    }
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    pub graph: PlaneGraph,
    /// Faces glued since the seed cycle.
    pub depth: usize,
    pub code: CanonicalCode,
}

impl SearchNode {
    pub fn new(graph: PlaneGraph) -> Self {
        let depth = graph.faces().len() - 2;
        let code = graph.canonical_code();
        SearchNode { graph, depth, code }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnumStats {
    pub expanded: u64,
    pub pruned: BTreeMap<String, u64>,
    pub survivors: u64,
    pub interior: u64,
    pub candidates: u64,
    pub unknown: u64,
    pub levels: Vec<u64>,
    pub wall_time: Duration,
    pub budget_exceeded: bool,
}

impl EnumStats {
    pub fn pruned_total(&self) -> u64 {
        self.pruned.values().sum()
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("node budget exceeded after {} nodes", .0.expanded)]
    BudgetExceeded(Box<EnumStats>),
}

/// A complete candidate together with everything that was decided about it.
#[derive(Clone, Debug)]
pub struct Survivor {
    pub node: SearchNode,
    pub verdicts: Vec<Verdict>,
    pub realize: Option<RealizeVerdict>,
}

impl Survivor {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Receives candidates that passed the combinatorial filters and, of those, the
/// survivors of every filter including the realizer.
pub trait Sink {
    /// Every expanded node, before its verdict is reported.
    fn visited(&mut self, _code: &CanonicalCode) {}
    /// A node cut by `rule`, whether partial or complete.
    fn pruned(&mut self, _code: &CanonicalCode, _rule: &str) {}
    fn candidate(&mut self, _s: &Survivor) {}
    fn survivor(&mut self, s: Survivor);
}

impl Sink for Vec<Survivor> {
    fn survivor(&mut self, s: Survivor) {
        self.push(s);
    }
}

/// Collects both streams.
#[derive(Default)]
pub struct Streams {
    pub candidates: Vec<Survivor>,
    pub matchstick: Vec<Survivor>,
}

impl Sink for Streams {
    fn candidate(&mut self, s: &Survivor) {
        self.candidates.push(s.clone());
    }
    fn survivor(&mut self, s: Survivor) {
        self.matchstick.push(s);
    }
}

/// The triangle, the starting graph of every minimum-graph search.
pub fn seed() -> SearchNode {
    SearchNode::new(PlaneGraph::cycle(3))
}

/// Seed cycles `C_3 .. C_smax`.
pub fn seeds(config: &SearchConfig) -> Vec<SearchNode> {
    (3..=config.s_max.min(config.max_n)).map(|m| SearchNode::new(PlaneGraph::cycle(m))).collect()
}

/// Glues a face of size `s` along the `p` outer darts starting at position `j` of the
/// outer walk. Returns `None` when the move is not allowed.
pub fn glue(g: &PlaneGraph, j: usize, p: usize, s: usize) -> Option<PlaneGraph> {
    let plan = plan_glue(g, j, p, s)?;
    let h = PlaneGraph::from_rotation_system(plan.rotation.to_rows(), plan.hint).ok()?;
    h.satisfies_degree_constraints().then_some(h)
}

/// Rotation system and outer walk of a gluing, before the graph is built.
struct GluePlan {
    rotation: FlatRotation,
    hint: (usize, usize),
    walk: Vec<usize>,
}

/// Copies `g`'s rotations with each edit `(v, anchor, new, after)` inserting `new` into
/// the row of `v` next to `anchor`, then appends the `tail` rows.
fn spliced(g: &PlaneGraph, edits: &[(usize, usize, usize, bool)], tail: &[[usize; 2]]) -> FlatRotation {
    let n = g.n();
    let mut start = Vec::with_capacity(n + tail.len() + 1);
    let mut adj = Vec::with_capacity(2 * g.edge_count() + 2 * tail.len() + 2);
    start.push(0u32);
    for v in 0..n {
        for &w in g.rotation(v) {
            for &(_, anchor, new, after) in edges_at(edits, v) {
                if anchor == w && !after {
                    adj.push(new as u32);
                }
            }
            adj.push(w as u32);
            for &(_, anchor, new, after) in edges_at(edits, v) {
                if anchor == w && after {
                    adj.push(new as u32);
                }
            }
        }
        start.push(adj.len() as u32);
    }
    for t in tail {
        adj.push(t[0] as u32);
        adj.push(t[1] as u32);
        start.push(adj.len() as u32);
    }
    FlatRotation { start, adj }
}

fn edges_at(edits: &[(usize, usize, usize, bool)], v: usize) -> impl Iterator<Item = &(usize, usize, usize, bool)> {
    edits.iter().filter(move |e| e.0 == v)
}

fn plan_glue(g: &PlaneGraph, j: usize, p: usize, s: usize) -> Option<GluePlan> {
    let walk = &g.outer_face().boundary;
    let len = walk.len();
    if p >= len || s < 3 || s < p + 1 {
        return None;
    }
    let n = g.n();
    let x = |i: usize| walk[(j + i) % len];
    let u = x(0);
    if p == 0 {
        let m = s - 1;
        if g.degree(u) + 2 > 4 {
            return None;
        }
        let after = x(1);
        // Both new edges go right after `after`, the last one first.
        let edits = [(u, after, n, true), (u, after, n + m - 1, true)];
        let tail: Vec<[usize; 2]> = (0..m)
            .map(|i| [if i == 0 { u } else { n + i - 1 }, if i + 1 == m { u } else { n + i + 1 }])
            .collect();
        let rotation = spliced(g, &edits, &tail);
        let mut new_walk = vec![u];
        new_walk.extend((n..n + m).rev());
        new_walk.extend((0..len).map(x));
        return Some(GluePlan { rotation, hint: (u, n + m - 1), walk: new_walk });
    }
    let mut path = [0usize; 256];
    for i in 0..=p {
        path[i] = x(i);
        if path[..i].contains(&path[i]) {
            return None;
        }
    }
    let path = &path[..=p];
    let w = path[p];
    if g.degree(u) >= 4 || g.degree(w) >= 4 {
        return None;
    }
    let m = s - p - 1;
    if m == 0 && (p < 2 || g.adjacent(u, w)) {
        return None;
    }
    for &v in &path[1..p] {
        if g.degree(v) != 4 && walk.iter().filter(|&&z| z == v).count() == 1 {
            return None;
        }
    }
    let first = if m > 0 { n } else { u };
    let last = if m > 0 { n + m - 1 } else { w };
    let edits = [(w, path[p - 1], first, false), (u, path[1], last, true)];
    let tail: Vec<[usize; 2]> = (0..m)
        .map(|i| [if i == 0 { w } else { n + i - 1 }, if i + 1 == m { u } else { n + i + 1 }])
        .collect();
    let rotation = spliced(g, &edits, &tail);
    let mut new_walk = vec![u];
    new_walk.extend((n..n + m).rev());
    new_walk.extend((p..len).map(x));
    Some(GluePlan { rotation, hint: (u, last), walk: new_walk })
}

/// All children of `node` within the vertex and face-size budgets, deduplicated and
/// sorted by canonical code.
pub fn expansions(node: &SearchNode, config: &SearchConfig) -> Vec<SearchNode> {
    let mut plans = BTreeMap::new();
    for_each_child(&node.graph, config, |code, plan| {
        plans.entry(code).or_insert(plan);
    });
    plans
        .into_iter()
        .filter_map(|(code, plan)| {
            let graph = PlaneGraph::from_rotation_system(plan.rotation.to_rows(), plan.hint).ok()?;
            graph.satisfies_degree_constraints().then(|| SearchNode { graph, depth: node.depth + 1, code })
        })
        .collect()
}

fn for_each_child(g: &PlaneGraph, config: &SearchConfig, mut emit: impl FnMut(CanonicalCode, GluePlan)) {
    let len = g.outer_face().size();
    let n = g.n();
    let min_p = if config.require_two_connected { 1 } else { 0 };
    let walk = &g.outer_face().boundary;
    // Budgets applied before gluing; a child over either budget would be cut on its visit.
    let excess = config.has(Filter::FaceBudget).then(|| (face_excess(g), config.face_budget()));
    let inner = config.has(Filter::InnerBudget).then(|| (g.inner_vertex_count(), config.inner_budget()));
    let mut scratch = canon::Scratch::default();
    for j in 0..len {
        for p in min_p..len {
            if let Some((have, cap)) = inner {
                let buried = (1..p)
                    .map(|i| walk[(j + i) % len])
                    .filter(|&v| walk.iter().filter(|&&z| z == v).count() == 1)
                    .count();
                if have + buried > cap {
                    break;
                }
            }
            for s in (p + 1).max(3)..=config.s_max {
                let m = if p == 0 { s - 1 } else { s - p - 1 };
                if n + m > config.max_n {
                    break;
                }
                if excess.is_some_and(|(have, cap)| have + s as i64 - 3 > cap) {
                    break;
                }
                if let Some(plan) = plan_glue(g, j, p, s) {
                    emit(canon::code_from_walk_in(&plan.rotation, &plan.walk, &mut scratch), plan);
                }
            }
        }
    }
}

fn face_excess(g: &PlaneGraph) -> i64 {
    g.faces().iter().filter(|f| !f.is_outer && f.size() >= 4).map(|f| f.size() as i64 - 3).sum()
}

fn is_candidate(g: &PlaneGraph, config: &SearchConfig) -> bool {
    let on_target = match config.target {
        Target::Tau(t) => t < 0 || g.face_profile().tau == t,
        Target::ClassifyK(k) => g.k() == k,
    };
    on_target && (!config.require_two_connected || g.is_two_connected())
}

/// Pipeline of checks in evaluation order: cheap integer checks first, then pattern and
/// area checks, the realizer last.
pub fn prune_order(config: &SearchConfig) -> Vec<Filter> {
    let mut f = config.filters.clone();
    f.sort_by_key(|f| f.cost_rank());
    f.dedup();
    f
}

enum Outcome {
    Pruned(&'static str),
    Interior,
    Candidate(Survivor, bool),
}

struct Visit {
    outcome: Outcome,
    expand: bool,
}

fn visit(node: &SearchNode, config: &SearchConfig) -> Visit {
    let g = &node.graph;
    let mut expand = true;
    let mut monotone_cut = None;

    if config.has(Filter::InnerBudget) && g.inner_vertex_count() > config.inner_budget() {
        monotone_cut = Some(Filter::InnerBudget);
    } else if config.has(Filter::FaceBudget) && face_excess(g) > config.face_budget() {
        monotone_cut = Some(Filter::FaceBudget);
    }
    if monotone_cut.is_some() {
        expand = false;
    }
    let candidate = monotone_cut.is_none() && is_candidate(g, config);
    let mut rigid: Option<RealizeVerdict> = None;
    if monotone_cut.is_none() && config.has(Filter::RigidPrune) {
        let v = realizer::refute(g, &config.realize);
        if let Some(v) = v {
            expand = false;
            if !candidate {
                return Visit { outcome: Outcome::Pruned(Filter::RigidPrune.id()), expand };
            }
            rigid = Some(v);
        }
    }
    if let Some(f) = monotone_cut {
        return Visit { outcome: Outcome::Pruned(f.id()), expand };
    }
    if !candidate {
        return Visit { outcome: Outcome::Interior, expand };
    }

    let finals: Vec<Filter> =
        prune_order(config).into_iter().filter(|f| f.stage() == Stage::Final && *f != Filter::Realize).collect();
    let verdicts = criteria::evaluate_final(g, &finals, config.accumulate);
    let combinatorial_ok = verdicts.iter().all(|v| v.passed);
    let mut s = Survivor { node: node.clone(), verdicts, realize: None };
    if combinatorial_ok && config.has(Filter::Realize) {
        let rv = rigid.unwrap_or_else(|| realizer::solve(g, &config.realize));
        s.verdicts.push(Verdict {
            passed: rv.is_realizable(),
            rule: Rule::Realizable,
            witness: rv.summary(),
        });
        s.realize = Some(rv);
    }
    Visit { outcome: Outcome::Candidate(s, combinatorial_ok), expand }
}

/// Runs the search and streams candidates and survivors to `sink` in deterministic order.
pub fn enumerate(config: &SearchConfig, sink: &mut dyn Sink) -> Result<EnumStats, SearchError> {
    config.validate()?;
    let start = Instant::now();
    let mut stats = EnumStats::default();
    let mut level: Vec<CanonicalCode> = {
        let mut s: Vec<CanonicalCode> = seeds(config).into_iter().map(|n| n.code).collect();
        s.sort();
        s
    };
    while !level.is_empty() {
        stats.levels.push(level.len() as u64);
        let visits = par::map_ordered(&level, config.parallel_width, |code| {
            let graph = code.decode().expect("level codes decode");
            let node = SearchNode { depth: graph.faces().len() - 2, graph, code: code.clone() };
            let v = visit(&node, config);
            let mut children = BTreeSet::new();
            if v.expand {
                for_each_child(&node.graph, config, |code, _| {
                    children.insert(code);
                });
            }
            (v, children)
        });
        let mut next: BTreeSet<CanonicalCode> = BTreeSet::new();
        for (code, (v, children)) in level.iter().zip(visits) {
            stats.expanded += 1;
            sink.visited(code);
            match v.outcome {
                Outcome::Pruned(rule) => {
                    *stats.pruned.entry(rule.to_string()).or_insert(0) += 1;
                    sink.pruned(code, rule);
                }
                Outcome::Interior => stats.interior += 1,
                Outcome::Candidate(s, combinatorial_ok) => {
                    if combinatorial_ok {
                        stats.candidates += 1;
                        sink.candidate(&s);
                    }
                    if matches!(s.realize, Some(RealizeVerdict::Unknown { .. })) {
                        stats.unknown += 1;
                    }
                    match s.verdicts.iter().find(|v| !v.passed) {
                        Some(f) => {
                            *stats.pruned.entry(f.rule.id().to_string()).or_insert(0) += 1;
                            sink.pruned(code, f.rule.id());
                        }
                        None => {
                            stats.survivors += 1;
                            sink.survivor(s);
                        }
                    }
                }
            }
            next.extend(children);
        }
        if config.node_limit.is_some_and(|l| stats.expanded >= l) && !next.is_empty() {
            stats.budget_exceeded = true;
            stats.wall_time = start.elapsed();
            return Err(SearchError::BudgetExceeded(Box::new(stats)));
        }
        level = next.into_iter().collect();
    }
    stats.wall_time = start.elapsed();
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_triangle() {
        let s = seed();
        assert_eq!(s.graph.n(), 3);
        assert_eq!(s.graph.face_profile().tau, 6);
        assert_eq!(s.depth, 0);
        assert_eq!(s.code, seed().code);
    }

    #[test]
    fn triangle_on_edge_gives_rhombus() {
        let cfg = SearchConfig::unfiltered(4);
        let kids = expansions(&seed(), &cfg);
        assert_eq!(kids.len(), 1);
        let g = &kids[0].graph;
        assert_eq!((g.n(), g.edge_count()), (4, 5));
    }

    #[test]
    fn children_respect_degree_bound() {
        let mut cfg = SearchConfig::unfiltered(12);
        cfg.s_max = 6;
        let mut level = vec![seed()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for n in &level {
                for c in expansions(n, &cfg) {
                    assert!(c.graph.satisfies_degree_constraints());
                    next.push(c);
                }
            }
            level = next;
        }
        assert!(!level.is_empty());
    }

    #[test]
    fn planned_codes_match_built_graphs() {
        let cfg = SearchConfig::unfiltered(9);
        let mut level = vec![seed()];
        for _ in 0..4 {
            level = level.iter().flat_map(|n| expansions(n, &cfg)).collect();
            for c in &level {
                assert_eq!(c.code, c.graph.canonical_code());
                assert_eq!(c.code.decode().unwrap().canonical_code(), c.code);
            }
        }
    }

    #[test]
    fn mirror_gluings_collapse() {
        // Gluing a triangle on either free edge of the rhombus gives mirror images.
        let cfg = SearchConfig::unfiltered(5);
        let rh = expansions(&seed(), &cfg).remove(0);
        let g = &rh.graph;
        let len = g.outer_face().size();
        let codes: Vec<_> = (0..len).filter_map(|j| glue(g, j, 1, 3)).map(|h| h.canonical_code()).collect();
        assert_eq!(codes.len(), 4);
        assert!(codes.iter().all(|c| *c == codes[0]));
        let kids = expansions(&rh, &cfg);
        let tri_kids = kids.iter().filter(|k| k.graph.n() == 5 && k.graph.face_profile().a(3) == 3).count();
        assert_eq!(tri_kids, 1);
    }

    #[test]
    fn invalid_configs() {
        let mut c = SearchConfig::tau(4, 2);
        assert!(c.validate().is_err());
        c.max_n = 10;
        c.target = Target::Tau(3);
        assert!(c.validate().is_err());
    }
}
