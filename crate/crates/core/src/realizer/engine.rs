//! Rigid-body propagation.
//!
//! Each inner triangle is a rigid cluster and every other edge a two-vertex bar. Two
//! clusters sharing two or more vertices merge, after a consistency check on the shared
//! distances. Three clusters pairwise sharing single distinct vertices close a triangle of
//! bodies: the third corner follows from a circle intersection, and both mirror choices
//! are kept when each respects the rotation system. When propagation stalls with exactly
//! one degree of freedom left, a hinge angle between two clusters is scanned.

use super::flex::{golden_min, REFINE_WIDTH};
use super::{check_embedding, lsq, RealizeError, RealizeOptions, RealizeVerdict, Realization, Witness, MATCH_TOL};
use crate::geom::{self, CircleHit, Motion, Point};
use crate::plane_graph::PlaneGraph;

const MAX_LEAVES: usize = 256;
const AREA_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    /// Conflicts end a branch.
    Strict,
    /// Conflicts are recorded as residuals and propagation continues.
    Scan,
}

#[derive(Clone, Debug)]
struct Cluster {
    members: Vec<usize>,
    pos: Vec<Point>,
}

impl Cluster {
    fn from_pairs(mut pairs: Vec<(usize, Point)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        pairs.dedup_by_key(|p| p.0);
        Cluster { members: pairs.iter().map(|p| p.0).collect(), pos: pairs.iter().map(|p| p.1).collect() }
    }

    fn get(&self, v: usize) -> Option<Point> {
        self.members.binary_search(&v).ok().map(|i| self.pos[i])
    }

    fn at(&self, v: usize) -> Point {
        self.get(v).expect("vertex in cluster")
    }

    fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    fn shared(&self, o: &Cluster) -> Vec<usize> {
        let (mut i, mut j, mut out) = (0, 0, Vec::new());
        while i < self.members.len() && j < o.members.len() {
            match self.members[i].cmp(&o.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.members[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// `self` keeps its coordinates; the other clusters contribute their remaining
    /// vertices after the given motions.
    fn absorb(&self, others: &[(&Cluster, Motion)]) -> Cluster {
        let mut pairs: Vec<(usize, Point)> = self.members.iter().copied().zip(self.pos.iter().copied()).collect();
        for (c, m) in others {
            for (&v, &p) in c.members.iter().zip(&c.pos) {
                if !self.contains(v) {
                    pairs.push((v, m.apply(p)));
                }
            }
        }
        // first occurrence wins in dedup, and `self` comes first
        let mut seen = vec![false; pairs.iter().map(|p| p.0 + 1).max().unwrap_or(0)];
        pairs.retain(|p| !std::mem::replace(&mut seen[p.0], true));
        Cluster::from_pairs(pairs)
    }
}

struct Ctx<'a> {
    g: &'a PlaneGraph,
    skip: Option<(usize, usize)>,
    mode: Mode,
    gap_tol: f64,
    /// Inner faces not touching the skipped edge.
    faces: Vec<usize>,
}

impl<'a> Ctx<'a> {
    fn new(g: &'a PlaneGraph, skip: Option<(usize, usize)>, mode: Mode, gap_tol: f64) -> Self {
        let faces = (0..g.faces().len())
            .filter(|&i| {
                let f = &g.faces()[i];
                !f.is_outer
                    && skip.map_or(true, |(a, b)| {
                        let m = f.boundary.len();
                        (0..m).all(|j| {
                            let (x, y) = (f.boundary[j], f.boundary[(j + 1) % m]);
                            !((x == a && y == b) || (x == b && y == a))
                        })
                    })
            })
            .collect();
        Ctx { g, skip, mode, gap_tol, faces }
    }

    fn active(&self, u: usize, v: usize) -> bool {
        self.skip != Some((u, v)) && self.skip != Some((v, u))
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.g.edges().into_iter().filter(|&(u, v)| self.active(u, v)).collect()
    }
}

#[derive(Clone, Debug)]
struct State {
    clusters: Vec<Cluster>,
    /// Largest distance mismatch absorbed in scan mode.
    residual: f64,
    worst: Option<Witness>,
    /// A mismatch between `MATCH_TOL` and the gap tolerance was absorbed.
    marginal: bool,
    /// A tangency, coincidence or touching segment was met.
    degenerate: Option<usize>,
    /// Definite validity violation with the largest margin met in scan mode.
    invalid: Option<(Witness, f64)>,
}

enum Step {
    Progress,
    Fixpoint,
    Conflict(Witness, f64),
    Branch(Vec<State>),
}

enum Leaf {
    Done(State),
    Conflict(Witness, f64),
}

fn initial(ctx: &Ctx) -> State {
    let g = ctx.g;
    let h = 3f64.sqrt() / 2.0;
    let mut used = std::collections::BTreeSet::new();
    let mut clusters = Vec::new();
    for &fi in &ctx.faces {
        let f = &g.faces()[fi];
        if f.size() != 3 {
            continue;
        }
        let b = &f.boundary;
        clusters.push(Cluster::from_pairs(vec![
            (b[0], Point::new(0.0, 0.0)),
            (b[1], Point::new(1.0, 0.0)),
            (b[2], Point::new(0.5, h)),
        ]));
        for j in 0..3 {
            let (x, y) = (b[j], b[(j + 1) % 3]);
            used.insert((x.min(y), x.max(y)));
        }
    }
    for (u, v) in ctx.edges() {
        if !used.contains(&(u, v)) {
            clusters.push(Cluster::from_pairs(vec![(u, Point::new(0.0, 0.0)), (v, Point::new(1.0, 0.0))]));
        }
    }
    State { clusters, residual: 0.0, worst: None, marginal: false, degenerate: None, invalid: None }
}

/// Definite violations inside one cluster, or `None`. Ambiguous cases set the
/// degenerate marker instead.
fn validate(ctx: &Ctx, cl: &Cluster, degenerate: &mut Option<usize>) -> Option<(Witness, f64)> {
    let g = ctx.g;
    for i in 0..cl.members.len() {
        for j in i + 1..cl.members.len() {
            if cl.pos[i].dist(cl.pos[j]) < super::CROSSING_TOL {
                degenerate.get_or_insert(cl.members[i]);
            }
        }
    }
    for (&v, &pv) in cl.members.iter().zip(&cl.pos) {
        let ring: Vec<Point> =
            g.rotation(v).iter().filter(|&&w| ctx.active(v, w)).filter_map(|&w| cl.get(w)).collect();
        if ring.len() >= 3 && !geom::ccw_cyclic_order(pv, &ring) {
            let mut angles: Vec<f64> = ring.iter().map(|&p| (p - pv).angle()).collect();
            angles.sort_by(f64::total_cmp);
            let m = angles.len();
            let sep = (0..m)
                .map(|i| {
                    let d = if i + 1 < m { angles[i + 1] - angles[i] } else { angles[0] + std::f64::consts::TAU - angles[i] };
                    d
                })
                .fold(f64::INFINITY, f64::min);
            if sep > ANGLE_TOL {
                return Some((Witness::Rotation { vertex: v }, sep));
            }
            degenerate.get_or_insert(v);
        }
    }
    for &fi in &ctx.faces {
        let f = &g.faces()[fi];
        if !f.boundary.iter().all(|&v| cl.contains(v)) {
            continue;
        }
        let poly: Vec<Point> = f.boundary.iter().map(|&v| cl.at(v)).collect();
        let a = geom::signed_area(&poly);
        if a < -AREA_TOL {
            return Some((Witness::FaceOrientation { face: fi }, -a));
        }
        if a <= AREA_TOL {
            degenerate.get_or_insert(f.boundary[0]);
        }
    }
    let edges: Vec<(usize, usize)> =
        ctx.edges().into_iter().filter(|&(u, v)| cl.contains(u) && cl.contains(v)).collect();
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let (pa, pb, pc, pd) = (cl.at(a), cl.at(b), cl.at(c), cl.at(d));
            if geom::segment_distance(pa, pb, pc, pd) >= super::CROSSING_TOL {
                continue;
            }
            let depth = geom::point_segment_dist2(pa, pc, pd)
                .min(geom::point_segment_dist2(pb, pc, pd))
                .min(geom::point_segment_dist2(pc, pa, pb))
                .min(geom::point_segment_dist2(pd, pa, pb))
                .sqrt();
            let proper = geom::orient(pa, pb, pc) * geom::orient(pa, pb, pd) < 0.0
                && geom::orient(pc, pd, pa) * geom::orient(pc, pd, pb) < 0.0;
            if proper && depth > super::CROSSING_TOL {
                return Some((Witness::Crossing { e: (a, b), f: (c, d) }, depth));
            }
            degenerate.get_or_insert(a);
        }
    }
    None
}

impl State {
    fn replace(&self, remove: &[usize], merged: Cluster) -> State {
        let mut s = self.clone();
        let mut clusters: Vec<Cluster> =
            s.clusters.drain(..).enumerate().filter(|(i, _)| !remove.contains(i)).map(|(_, c)| c).collect();
        let at = remove.iter().copied().min().unwrap_or(0).min(clusters.len());
        clusters.insert(at, merged);
        s.clusters = clusters;
        s
    }

    /// Applies validity and distance bookkeeping to a freshly merged cluster.
    fn accept(&mut self, ctx: &Ctx, idx: usize) -> Result<(), (Witness, f64)> {
        let mut deg = self.degenerate;
        let bad = validate(ctx, &self.clusters[idx], &mut deg);
        self.degenerate = deg;
        match (bad, ctx.mode) {
            (None, _) => Ok(()),
            (Some(b), Mode::Strict) => Err(b),
            (Some(b), Mode::Scan) => {
                if self.invalid.as_ref().map_or(true, |w| b.1 > w.1) {
                    self.invalid = Some(b);
                }
                Ok(())
            }
        }
    }

    fn absorb_mismatch(&mut self, ctx: &Ctx, w: Witness, amount: f64) -> Option<(Witness, f64)> {
        match ctx.mode {
            Mode::Strict => {
                if amount > ctx.gap_tol {
                    return Some((w, amount));
                }
                if amount > MATCH_TOL {
                    self.marginal = true;
                }
            }
            Mode::Scan => {
                if amount > self.residual {
                    self.residual = amount;
                    self.worst = Some(w);
                }
            }
        }
        None
    }
}

fn merge_pair(ctx: &Ctx, st: &mut State, i: usize, j: usize) -> Step {
    let (a, b) = if st.clusters[j].members.len() > st.clusters[i].members.len() { (j, i) } else { (i, j) };
    let (ca, cb) = (&st.clusters[a], &st.clusters[b]);
    let shared = ca.shared(cb);
    let src: Vec<Point> = shared.iter().map(|&v| cb.at(v)).collect();
    let dst: Vec<Point> = shared.iter().map(|&v| ca.at(v)).collect();
    let m = Motion::fit(&src, &dst);
    let mut worst: Option<(Witness, f64)> = None;
    for x in 0..shared.len() {
        for y in x + 1..shared.len() {
            let (da, db) = (dst[x].dist(dst[y]), src[x].dist(src[y]));
            let gap = (da - db).abs();
            if worst.as_ref().map_or(true, |w| gap > w.1) {
                worst = Some((Witness::Distance { u: shared[x], v: shared[y], measured: da, required: db }, gap));
            }
        }
    }
    // Equal pairwise distances with opposite orientation leave a large fit residual.
    let point_res = src.iter().zip(&dst).map(|(&p, &q)| m.apply(p).dist(q)).fold(0.0, f64::max);
    let (mut w, mut amount) = worst.expect("two shared vertices");
    if point_res > 2.0 * amount {
        let k = (0..shared.len()).max_by(|&x, &y| m.apply(src[x]).dist(dst[x]).total_cmp(&m.apply(src[y]).dist(dst[y])));
        w = Witness::Rotation { vertex: shared[k.unwrap()] };
        amount = point_res;
    }
    let merged = ca.absorb(&[(cb, m)]);
    if let Some(c) = st.absorb_mismatch(ctx, w, amount) {
        return Step::Conflict(c.0, c.1);
    }
    let mut next = st.replace(&[a, b], merged);
    let idx = a.min(b);
    if let Err((w, g)) = next.accept(ctx, idx) {
        return Step::Conflict(w, g);
    }
    *st = next;
    Step::Progress
}

/// Closes the triangle of bodies `big`, `x`, `y` where `big` meets `x` at `a`, `big` meets
/// `y` at `b` and `x` meets `y` at `q`. `None` when the corners coincide in `big`.
fn merge_triple(ctx: &Ctx, st: &State, big: usize, x: usize, y: usize, a: usize, b: usize, q: usize) -> Option<Step> {
    let (cb, cx, cy) = (&st.clusters[big], &st.clusters[x], &st.clusters[y]);
    let (pa, pb) = (cb.at(a), cb.at(b));
    if pa.dist(pb) < MATCH_TOL {
        return None;
    }
    let dx = cx.at(a).dist(cx.at(q));
    let dy = cy.at(b).dist(cy.at(q));
    let mut base = st.clone();
    let options: Vec<Point> = match geom::circle_intersection(pa, dx, pb, dy, MATCH_TOL) {
        CircleHit::Two { left, right } => vec![left, right],
        CircleHit::Tangent(p) => {
            base.degenerate.get_or_insert(q);
            vec![p]
        }
        CircleHit::Disjoint(s) => {
            let d = pa.dist(pb);
            let required = if d > dx + dy { dx + dy } else { (dx - dy).abs() };
            let w = Witness::Distance { u: a, v: b, measured: d, required };
            if let Some(c) = base.absorb_mismatch(ctx, w, -s) {
                return Some(Step::Conflict(c.0, c.1));
            }
            base.degenerate.get_or_insert(q);
            let dir = (pb - pa) * (1.0 / d);
            let t = if d > dx + dy { dx * d / (dx + dy) } else if dx > dy { dx } else { -dx };
            vec![pa + dir * t]
        }
    };
    let mut branches = Vec::new();
    let mut failures = Vec::new();
    for qp in options {
        let mx = Motion::fit(&[cx.at(a), cx.at(q)], &[pa, qp]);
        let my = Motion::fit(&[cy.at(b), cy.at(q)], &[pb, qp]);
        let merged = cb.absorb(&[(cx, mx), (cy, my)]);
        let mut next = base.replace(&[big, x, y], merged);
        let idx = big.min(x).min(y);
        match next.accept(ctx, idx) {
            Ok(()) => branches.push(next),
            Err(f) => failures.push(f),
        }
    }
    if ctx.mode == Mode::Scan && branches.len() == 2 {
        let valid: Vec<State> = branches.iter().filter(|s| s.invalid.is_none()).cloned().collect();
        if !valid.is_empty() {
            branches = valid;
        }
    }
    Some(match branches.len() {
        0 => {
            let f = failures.into_iter().min_by(|p, q| p.1.total_cmp(&q.1)).expect("at least one option");
            Step::Conflict(f.0, f.1)
        }
        1 => Step::Branch(branches),
        _ => Step::Branch(branches),
    })
}

fn step(ctx: &Ctx, st: &mut State) -> Step {
    let c = st.clusters.len();
    let n = ctx.g.n();
    let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, cl) in st.clusters.iter().enumerate() {
        for &v in &cl.members {
            incidence[v].push(i);
        }
    }
    let mut count = vec![0u32; c * c];
    let mut one = vec![usize::MAX; c * c];
    for (v, inc) in incidence.iter().enumerate() {
        for x in 0..inc.len() {
            for y in x + 1..inc.len() {
                let k = inc[x] * c + inc[y];
                count[k] += 1;
                one[k] = v;
            }
        }
    }
    for i in 0..c {
        for j in i + 1..c {
            if count[i * c + j] >= 2 {
                return merge_pair(ctx, st, i, j);
            }
        }
    }
    for i in 0..c {
        for j in i + 1..c {
            if count[i * c + j] != 1 {
                continue;
            }
            for l in j + 1..c {
                if count[j * c + l] != 1 || count[i * c + l] != 1 {
                    continue;
                }
                let (ij, jl, il) = (one[i * c + j], one[j * c + l], one[i * c + l]);
                if ij == jl || jl == il || ij == il {
                    continue;
                }
                // Keep the largest body fixed.
                let sizes = [st.clusters[i].members.len(), st.clusters[j].members.len(), st.clusters[l].members.len()];
                let r = if sizes[0] >= sizes[1] && sizes[0] >= sizes[2] {
                    merge_triple(ctx, st, i, j, l, ij, il, jl)
                } else if sizes[1] >= sizes[2] {
                    merge_triple(ctx, st, j, i, l, ij, jl, il)
                } else {
                    merge_triple(ctx, st, l, i, j, il, jl, ij)
                };
                match r {
                    Some(Step::Branch(mut b)) if b.len() == 1 => {
                        *st = b.pop().unwrap();
                        return Step::Progress;
                    }
                    Some(s) => return s,
                    None => continue,
                }
            }
        }
    }
    Step::Fixpoint
}

fn explore(ctx: &Ctx, start: State) -> (Vec<Leaf>, bool) {
    fn go(ctx: &Ctx, mut st: State, leaves: &mut Vec<Leaf>, truncated: &mut bool) {
        loop {
            if leaves.len() >= MAX_LEAVES {
                *truncated = true;
                return;
            }
            match step(ctx, &mut st) {
                Step::Progress => {}
                Step::Fixpoint => {
                    leaves.push(Leaf::Done(st));
                    return;
                }
                Step::Conflict(w, g) => {
                    leaves.push(Leaf::Conflict(w, g));
                    return;
                }
                Step::Branch(bs) => {
                    for b in bs {
                        go(ctx, b, leaves, truncated);
                    }
                    return;
                }
            }
        }
    }
    let mut leaves = Vec::new();
    let mut truncated = false;
    go(ctx, start, &mut leaves, &mut truncated);
    (leaves, truncated)
}

fn min_conflict(leaves: &[Leaf]) -> Option<(Witness, f64)> {
    leaves
        .iter()
        .filter_map(|l| match l {
            Leaf::Conflict(w, g) => Some((w.clone(), *g)),
            Leaf::Done(_) => None,
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

pub(super) fn strict_refutation(
    g: &PlaneGraph,
    skip: Option<(usize, usize)>,
    opts: &RealizeOptions,
) -> Option<(Witness, f64)> {
    let ctx = Ctx::new(g, skip, Mode::Strict, opts.gap_tol);
    let (leaves, truncated) = explore(&ctx, initial(&ctx));
    if truncated || leaves.iter().any(|l| matches!(l, Leaf::Done(_))) {
        return None;
    }
    min_conflict(&leaves)
}

/// Looks for an edge `uv` whose removal leaves `|uv|` forced, and away from 1, in every
/// branch. Returns the edge with the largest such gap.
fn edge_witness(g: &PlaneGraph, opts: &RealizeOptions) -> Option<(Witness, f64)> {
    let mut best: Option<(Witness, f64)> = None;
    for (u, v) in g.edges() {
        let ctx = Ctx::new(g, Some((u, v)), Mode::Strict, opts.gap_tol);
        let (leaves, truncated) = explore(&ctx, initial(&ctx));
        if truncated || leaves.is_empty() {
            continue;
        }
        let mut worst: Option<(f64, f64)> = None;
        let mut ok = true;
        for l in &leaves {
            let Leaf::Done(st) = l else {
                ok = false;
                break;
            };
            let Some(cl) = st.clusters.iter().find(|c| c.contains(u) && c.contains(v)) else {
                ok = false;
                break;
            };
            let d = cl.at(u).dist(cl.at(v));
            let gap = (d - 1.0).abs();
            if worst.map_or(true, |w| gap < w.1) {
                worst = Some((d, gap));
            }
        }
        let Some((d, gap)) = worst.filter(|_| ok) else { continue };
        if gap > opts.gap_tol && best.as_ref().map_or(true, |b| gap > b.1) {
            best = Some((Witness::Distance { u, v, measured: d, required: 1.0 }, gap));
        }
    }
    best
}

/// Placement of the vertices forced relative to one base edge.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialPlacement {
    /// Coordinates with the base edge from `(0, 0)` to `(1, 0)`.
    pub placed: Vec<Option<Point>>,
    /// Unplaced vertices adjacent to placed ones, in breadth-first order.
    pub frontier: Vec<usize>,
    /// Non-adjacent placed pairs that also belong to other rigid bodies, with their
    /// forced distance.
    pub forced_pairs: Vec<(usize, usize, f64)>,
}

impl PartialPlacement {
    pub fn placed_count(&self) -> usize {
        self.placed.iter().filter(|p| p.is_some()).count()
    }

    pub fn distance(&self, u: usize, v: usize) -> Option<f64> {
        Some(self.placed[u]?.dist(self.placed[v]?))
    }
}

/// Places every vertex forced relative to the directed edge `base`.
pub fn rigid_propagate(g: &PlaneGraph, base: (usize, usize)) -> Result<PartialPlacement, RealizeError> {
    let (u, v) = base;
    if u >= g.n() || v >= g.n() || !g.adjacent(u, v) {
        return Err(RealizeError::BadBase(u, v));
    }
    let ctx = Ctx::new(g, None, Mode::Strict, RealizeOptions::default().gap_tol);
    let (leaves, _) = explore(&ctx, initial(&ctx));
    let Some(st) = leaves.iter().find_map(|l| match l {
        Leaf::Done(s) => Some(s),
        Leaf::Conflict(..) => None,
    }) else {
        let (w, _) = min_conflict(&leaves).expect("some leaf");
        return Err(RealizeError::Conflict(w));
    };
    if let Some(x) = st.degenerate {
        return Err(RealizeError::NumericallyDegenerate(x));
    }
    let cl = st.clusters.iter().find(|c| c.contains(u) && c.contains(v)).expect("every edge lies in a cluster");
    let m = Motion::fit(&[cl.at(u), cl.at(v)], &[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
    let mut placed = vec![None; g.n()];
    for (&w, &p) in cl.members.iter().zip(&cl.pos) {
        placed[w] = Some(m.apply(p));
    }
    let mut frontier = Vec::new();
    let mut seen = vec![false; g.n()];
    let mut queue: std::collections::VecDeque<usize> = cl.members.iter().copied().collect();
    for &w in &cl.members {
        seen[w] = true;
    }
    while let Some(x) = queue.pop_front() {
        for &y in g.rotation(x) {
            if !seen[y] {
                seen[y] = true;
                if placed[x].is_some() {
                    frontier.push(y);
                }
            }
        }
    }
    let junction: Vec<usize> = cl
        .members
        .iter()
        .copied()
        .filter(|&w| st.clusters.iter().filter(|c| c.contains(w)).count() > 1)
        .collect();
    let mut forced_pairs = Vec::new();
    for (i, &a) in junction.iter().enumerate() {
        for &b in &junction[i + 1..] {
            if !g.adjacent(a, b) {
                forced_pairs.push((a, b, placed[a].unwrap().dist(placed[b].unwrap())));
            }
        }
    }
    Ok(PartialPlacement { placed, frontier, forced_pairs })
}

fn single_cover(st: &State, n: usize) -> Option<Vec<Point>> {
    match st.clusters.as_slice() {
        [c] if c.members.len() == n => Some(c.pos.clone()),
        _ => None,
    }
}

enum FlexOutcome {
    Root(Vec<Point>),
    Refuted(Witness, f64),
    Degenerate { roots: Vec<f64>, min_residual: f64 },
    Inconclusive(String),
    NoHinge,
}

struct Hinge {
    fixed: usize,
    moving: usize,
    pivot: usize,
}

impl Hinge {
    fn apply(&self, st: &State, theta: f64) -> State {
        let (a, b) = (&st.clusters[self.fixed], &st.clusters[self.moving]);
        let pa = a.at(self.pivot);
        let pb = b.at(self.pivot);
        let rot = Motion::about(pb, theta);
        let m = Motion { shift: rot.shift + (pa - pb), ..rot };
        let merged = a.absorb(&[(b, m)]);
        st.replace(&[self.fixed, self.moving], merged)
    }
}

/// Valid zero-residual samples tried directly before root refinement.
const FLAT_TRIES: usize = 8;

struct Sample {
    /// Larger of the distance residual and the margin of the worst validity violation.
    f: f64,
    valid: bool,
    state: Option<State>,
}

impl State {
    fn score(&self) -> f64 {
        self.residual.max(self.invalid.as_ref().map_or(0.0, |b| b.1))
    }
}

fn hinge_eval(ctx: &Ctx, st: &State, h: &Hinge, theta: f64) -> Sample {
    let mut s = h.apply(st, theta);
    let idx = h.fixed.min(h.moving);
    let _ = s.accept(ctx, idx);
    let (leaves, _) = explore(ctx, s);
    let n = ctx.g.n();
    // Smallest score; among equal scores, non-degenerate first.
    let better = |s: &State, b: &State| {
        let (x, y) = (s.score(), b.score());
        if (x - y).abs() > MATCH_TOL {
            return x < y;
        }
        match (s.degenerate.is_some(), b.degenerate.is_some()) {
            (false, true) => true,
            (true, false) => false,
            _ => x < y,
        }
    };
    let mut best: Option<State> = None;
    for l in leaves {
        if let Leaf::Done(s) = l {
            if single_cover(&s, n).is_some() && best.as_ref().map_or(true, |b| better(&s, b)) {
                best = Some(s);
            }
        }
    }
    match best {
        Some(s) => Sample { f: s.score(), valid: s.invalid.is_none(), state: Some(s) },
        None => Sample { f: f64::INFINITY, valid: false, state: None },
    }
}

fn flex_analyze(g: &PlaneGraph, st: &State, opts: &RealizeOptions) -> FlexOutcome {
    let ctx = Ctx::new(g, None, Mode::Scan, opts.gap_tol);
    let c = st.clusters.len();
    let mut hinges = Vec::new();
    for i in 0..c {
        for j in i + 1..c {
            let s = st.clusters[i].shared(&st.clusters[j]);
            if s.len() == 1 {
                let (fixed, moving) =
                    if st.clusters[j].members.len() > st.clusters[i].members.len() { (j, i) } else { (i, j) };
                hinges.push(Hinge { fixed, moving, pivot: s[0] });
            }
        }
    }
    hinges.sort_by_key(|h| std::cmp::Reverse(st.clusters[h.fixed].members.len() + st.clusters[h.moving].members.len()));
    let Some(h) = hinges
        .into_iter()
        .take(opts.flex_budget)
        .find(|h| [0.7, 2.9].iter().any(|&t| hinge_eval(&ctx, st, h, t).state.is_some()))
    else {
        return FlexOutcome::NoHinge;
    };
    let samples = opts.flex_samples.max(8);
    let step = std::f64::consts::TAU / samples as f64;
    let evals: Vec<Sample> = (0..samples).map(|i| hinge_eval(&ctx, st, &h, step * i as f64)).collect();
    // Unit lengths on a whole interval: any valid sample inside it is a realization.
    let flat: Vec<usize> = (0..samples)
        .filter(|&i| {
            let e = &evals[i];
            e.valid && e.f <= MATCH_TOL && e.state.as_ref().is_some_and(|s| s.degenerate.is_none())
        })
        .collect();
    let stride = (flat.len() / FLAT_TRIES).max(1);
    for &i in flat.iter().skip(stride / 2).step_by(stride).take(FLAT_TRIES) {
        let coords = evals[i].state.as_ref().and_then(|s| single_cover(s, g.n())).expect("covering leaf");
        let polished = lsq::polish(g, &coords, 100);
        match check_embedding(g, &polished, opts.tol) {
            Ok(()) => return FlexOutcome::Root(polished),
            Err(_) => continue,
        }
    }
    let vals: Vec<f64> = evals.into_iter().map(|s| s.f).collect();
    let mut minima = Vec::new();
    for i in 0..samples {
        let (p, q) = (vals[(i + samples - 1) % samples], vals[(i + 1) % samples]);
        if vals[i].is_finite() && vals[i] < p && vals[i] <= q {
            minima.push(i);
        }
    }
    if minima.is_empty() {
        if let Some(i) = (0..samples).min_by(|&a, &b| vals[a].total_cmp(&vals[b])) {
            minima.push(i);
        }
    }
    let mut refined = Vec::new();
    for i in minima {
        let centre = step * i as f64;
        let (t, f) = golden_min(&mut |t| hinge_eval(&ctx, st, &h, t).f, centre - step, centre + step, REFINE_WIDTH);
        let (t, f) = if vals[i] < f { (centre, vals[i]) } else { (t, f) };
        refined.push((t, f));
    }
    refined.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut degenerate_roots = Vec::new();
    let mut min_residual = f64::INFINITY;
    let mut inconclusive = None;
    for &(t, f) in &refined {
        min_residual = min_residual.min(f);
        if f > opts.gap_tol {
            continue;
        }
        let sample = hinge_eval(&ctx, st, &h, t);
        let Some(s) = sample.state else { continue };
        let coords = single_cover(&s, g.n()).expect("covering leaf");
        let polished = lsq::polish(g, &coords, 100);
        if check_embedding(g, &polished, opts.tol).is_ok() {
            return FlexOutcome::Root(polished);
        }
        let moved = coords.iter().zip(&polished).map(|(a, b)| a.dist(*b)).fold(0.0, f64::max);
        if s.degenerate.is_some() || check_embedding(g, &coords, opts.gap_tol).is_err() {
            degenerate_roots.push(t);
        } else if inconclusive.is_none() {
            inconclusive = Some(format!("near-root at hinge angle {t:.12} did not polish (moved {moved:.2e})"));
        }
    }
    if let Some(r) = inconclusive {
        return FlexOutcome::Inconclusive(r);
    }
    if !degenerate_roots.is_empty() {
        return FlexOutcome::Degenerate { roots: degenerate_roots, min_residual };
    }
    match refined.first() {
        Some(&(t, _)) => {
            let s = hinge_eval(&ctx, st, &h, t);
            match s.state {
                Some(state) if s.f > opts.gap_tol => {
                    let w = match state.invalid {
                        Some((w, m)) if m >= state.residual => w,
                        _ => state.worst.unwrap_or(Witness::Rotation { vertex: h.pivot }),
                    };
                    FlexOutcome::Refuted(w, s.f)
                }
                Some(_) => FlexOutcome::Inconclusive(format!("smallest hinge score {:.3e} at angle {t:.9} is a near-miss", s.f)),
                None => FlexOutcome::Inconclusive("hinge scan found no covering configuration".into()),
            }
        }
        None => FlexOutcome::Inconclusive("hinge scan found no covering configuration".into()),
    }
}

/// Coinciding vertices or a vertex resting on a non-incident edge in a fully forced
/// placement. Such contacts are exact, so they refute without a numeric gap.
fn rigid_contact(g: &PlaneGraph, coords: &[Point]) -> Option<Witness> {
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            if coords[u].dist(coords[v]) < super::CROSSING_TOL {
                return Some(Witness::Coincident { u, v });
            }
        }
    }
    for (a, b) in g.edges() {
        for w in 0..g.n() {
            if w != a && w != b && geom::point_segment_dist2(coords[w], coords[a], coords[b]).sqrt() < super::CROSSING_TOL {
                return Some(Witness::Coincident { u: w, v: a });
            }
        }
    }
    None
}

pub(super) fn solve(g: &PlaneGraph, opts: &RealizeOptions) -> RealizeVerdict {
    let ctx = Ctx::new(g, None, Mode::Strict, opts.gap_tol);
    let (leaves, truncated) = explore(&ctx, initial(&ctx));
    let done: Vec<&State> = leaves
        .iter()
        .filter_map(|l| match l {
            Leaf::Done(s) => Some(s),
            Leaf::Conflict(..) => None,
        })
        .collect();
    if done.is_empty() && !truncated {
        let (witness, gap) = edge_witness(g, opts).or_else(|| min_conflict(&leaves)).expect("conflict leaf");
        return RealizeVerdict::Infeasible { witness, gap };
    }
    let mut refutations: Vec<(Witness, f64)> = min_conflict(&leaves).into_iter().collect();
    let mut degenerate: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut unknown: Option<String> = truncated.then(|| "branch limit reached".to_string());
    let mut needs_lsq = false;
    for st in done {
        if let Some(coords) = single_cover(st, g.n()) {
            let coords = if st.marginal || st.degenerate.is_some() { lsq::polish(g, &coords, 100) } else { coords };
            match check_embedding(g, &coords, opts.tol) {
                Ok(()) => return RealizeVerdict::Realizable(Realization::from_coords(g, coords)),
                Err(e) => match rigid_contact(g, &coords) {
                    Some(w) if !st.marginal => refutations.push((w, 0.0)),
                    _ => {
                        unknown.get_or_insert(format!("forced configuration is not an embedding: {e}"));
                    }
                },
            }
            continue;
        }
        match flex_analyze(g, st, opts) {
            FlexOutcome::Root(c) => return RealizeVerdict::Realizable(Realization::from_coords(g, c)),
            FlexOutcome::Refuted(w, gap) => refutations.push((w, gap)),
            FlexOutcome::Degenerate { roots, min_residual } => degenerate.push((roots, min_residual)),
            FlexOutcome::Inconclusive(r) => {
                unknown.get_or_insert(r);
            }
            FlexOutcome::NoHinge => needs_lsq = true,
        }
    }
    if needs_lsq {
        if let Some(c) = lsq::search(g, opts) {
            return RealizeVerdict::Realizable(Realization::from_coords(g, c));
        }
        unknown.get_or_insert(format!("no embedding found in {} least-squares restarts", opts.restarts.max(1)));
    }
    if let Some(reason) = unknown {
        return RealizeVerdict::Unknown { reason };
    }
    if !degenerate.is_empty() {
        let mut roots: Vec<f64> = degenerate.iter().flat_map(|d| d.0.iter().copied()).collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let min_residual = degenerate.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
        let summary = format!(
            "unit lengths reached only at degenerate hinge angles {:?}",
            roots.iter().map(|t| format!("{t:.9}")).collect::<Vec<_>>()
        );
        return RealizeVerdict::Flexible { summary, min_residual, degenerate_roots: roots };
    }
    match refutations.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
        Some((witness, gap)) => RealizeVerdict::Infeasible { witness, gap },
        None => RealizeVerdict::Unknown { reason: "no branch decided".into() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rhombus() -> PlaneGraph {
        PlaneGraph::from_rotation_system(vec![vec![3, 2, 1], vec![0, 2], vec![1, 0, 3], vec![2, 0]], (0, 1)).unwrap()
    }

    #[test]
    fn rhombus_apexes() {
        let p = rigid_propagate(&rhombus(), (0, 2)).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let a = p.placed[1].unwrap();
        let b = p.placed[3].unwrap();
        assert!((a.x - 0.5).abs() < 1e-15 && (a.y.abs() - h).abs() < 1e-15);
        assert!((b.x - 0.5).abs() < 1e-15 && (b.y + a.y).abs() < 1e-15);
        assert_eq!(p.placed_count(), 4);
    }

    #[test]
    fn bad_base() {
        assert_eq!(rigid_propagate(&rhombus(), (1, 3)).unwrap_err(), RealizeError::BadBase(1, 3));
    }
}
