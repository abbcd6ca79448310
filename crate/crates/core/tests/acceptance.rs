//! Acceptance suite: one line per criterion.
//!
//! Known failures are pinned to their observed values. The process exits nonzero when a
//! criterion fails in an unrecorded way, or when a recorded failure changes.
//! `ACCEPTANCE_EXTENDED=1` adds the long k = 7 classification.

use std::process::ExitCode;
use std::time::Instant;

use matchstick::criteria::bounds::{
    a4_upper_bound, area_upper, cut_decomposition_bound, f4_upper_bound, quad_boundary_bound, tau0_k10_exclusion,
};
use matchstick::figures;
use matchstick::generator::{enumerate, SearchConfig, Sink, Survivor};
use matchstick::io::planar_code;
use matchstick::realizer::{self, RealizeOptions};
use matchstick::{CanonicalCode, PlaneGraph};

const EDGE_TOL: f64 = 1e-9;
const GAP_TOL: f64 = 1e-6;
const AREA_TOL: f64 = 1e-12;
const QUAD_MAX_N: usize = 14;
const SEARCH_MAX_N: usize = 16;
const EULER_MIN_GRAPHS: u64 = 10_000;

enum Status {
    Pass,
    Fail,
    /// A recorded failure reproduced exactly.
    Known,
    Skip,
}

struct Report {
    unexpected: usize,
}

impl Report {
    fn line(&mut self, id: &str, status: Status, detail: String) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => {
                self.unexpected += 1;
                "FAIL"
            }
            Status::Known => "FAIL (known, see ledger)",
            Status::Skip => "SKIP",
        };
        println!("criterion {id}: {tag}: {detail}");
    }

    fn check(&mut self, id: &str, ok: bool, detail: String) {
        self.line(id, if ok { Status::Pass } else { Status::Fail }, detail);
    }
}

fn classify_max_n(k: usize) -> usize {
    (2 * k).max(12)
}

fn classify(k: usize, two_connected: bool) -> Vec<Survivor> {
    let mut out = Vec::new();
    enumerate(&SearchConfig::classify(k, classify_max_n(k), two_connected), &mut out).unwrap();
    out
}

/// Checks every expanded node of a search as it streams past.
#[derive(Default)]
struct Audit {
    candidates: Vec<CanonicalCode>,
    visited: u64,
    euler_violations: Vec<String>,
    quad_components: u64,
    quad_violations: Vec<String>,
    round_trip_failures: Vec<String>,
}

impl Audit {
    fn inspect(&mut self, code: &CanonicalCode, g: &PlaneGraph) {
        self.visited += 1;
        let p = g.face_profile();
        let weight: i64 = p.census.iter().map(|(&i, &c)| (4 - i as i64) * c).sum();
        if weight != 8 - p.tau || 2 * p.n != 2 * p.faces - 4 + p.tau {
            self.euler_violations.push(code.to_hex());
        }
        if g.n() <= QUAD_MAX_N {
            for c in g.quadrangle_decomposition().components {
                self.quad_components += 1;
                if c.boundary_length < quad_boundary_bound(c.q) {
                    self.quad_violations.push(format!("{} q={} len={}", code.to_hex(), c.q, c.boundary_length));
                }
            }
        }
        let bytes = planar_code::encode(g);
        let ok = match planar_code::decode(&bytes, 0) {
            Ok((h, used)) => used == bytes.len() && planar_code::encode(&h) == bytes && h.canonical_code() == *code,
            Err(_) => false,
        };
        if !ok {
            self.round_trip_failures.push(code.to_hex());
        }
    }
}

impl Sink for Audit {
    fn visited(&mut self, code: &CanonicalCode) {
        let g = code.decode().expect("visited codes decode");
        self.inspect(code, &g);
    }
    fn candidate(&mut self, s: &Survivor) {
        self.candidates.push(s.node.code.clone());
    }
    fn survivor(&mut self, _: Survivor) {}
}

fn criterion_1(r: &mut Report) {
    let t = Instant::now();
    let k3 = classify(3, false).len();
    let k4 = classify(4, false).len();
    let k5 = classify(5, true).len();
    let k6 = classify(6, true).len();
    let detail = format!("k3+k4 = {k3}+{k4} (want 4), k5 = {k5} (want 3), k6 = {k6} (want 10), {:.1?}", t.elapsed());
    let status = if (k3 + k4, k5, k6) == (4, 3, 10) {
        Status::Pass
    } else if (k3, k4, k5, k6) == (1, 2, 3, 11) {
        Status::Known
    } else {
        Status::Fail
    };
    r.line("1", status, detail);
}

fn criterion_2(r: &mut Report) {
    if std::env::var("ACCEPTANCE_EXTENDED").as_deref() != Ok("1") {
        r.line("2", Status::Skip, "k = 7 classification runs with ACCEPTANCE_EXTENDED=1".into());
        return;
    }
    let t = Instant::now();
    let list = classify(7, true);
    let max_inner = list.iter().map(|s| s.node.graph.inner_vertex_count()).max().unwrap_or(0);
    r.check(
        "2",
        list.len() == 34 && max_inner <= 2,
        format!("k7 = {} (want 34), max inner vertices {max_inner} (want <= 2), {:.1?}", list.len(), t.elapsed()),
    );
}

fn criterion_3(r: &mut Report, audits: &[(i64, Audit)]) {
    let opts = RealizeOptions::default();
    let mut found = 0;
    let mut gaps_ok = 0;
    let mut parts = Vec::new();
    let mut fig4_known = false;
    for f in figures::five_graphs() {
        let g = f.graph();
        let code = g.canonical_code();
        let hit = audits.iter().any(|(_, a)| a.candidates.contains(&code));
        found += hit as usize;
        let v = realizer::solve(&g, &opts);
        let gap = v.gap().unwrap_or(0.0);
        let ok = !v.is_realizable() && gap > GAP_TOL;
        gaps_ok += ok as usize;
        if !ok && f.name == "fig4" && v.tag() == "flexible" {
            fig4_known = true;
        }
        parts.push(format!("{} found={} {} gap={gap:.3e}", f.name, hit, v.tag()));
    }
    let counts: Vec<String> = audits.iter().map(|(tau, a)| format!("tau={tau}: {} candidates", a.candidates.len())).collect();
    let detail = format!("{}; {}", counts.join(", "), parts.join(", "));
    let status = if found == 5 && gaps_ok == 5 {
        Status::Pass
    } else if found == 5 && gaps_ok == 4 && fig4_known {
        Status::Known
    } else {
        Status::Fail
    };
    r.line("3", status, detail);
}

fn criterion_4(r: &mut Report) {
    let g = figures::fig7().graph();
    let p = g.face_profile();
    match realizer::solve(&g, &RealizeOptions::default()) {
        realizer::RealizeVerdict::Realizable(real) => {
            let v = realizer::verify_realization(&g, &real.coords, EDGE_TOL);
            r.check(
                "4",
                v.passed && real.max_edge_error < EDGE_TOL && real.crossing_free && (p.n, p.tau, p.faces) == (20, 4, 20),
                format!(
                    "max edge error {:.3e}, crossing free {}, n={} tau={} faces={}",
                    real.max_edge_error, real.crossing_free, p.n, p.tau, p.faces
                ),
            );
        }
        other => r.check("4", false, other.summary()),
    }
}

fn criterion_5(r: &mut Report, audits: &[(i64, Audit)]) {
    let graphs: u64 = audits.iter().map(|(_, a)| a.visited).sum();
    let bad: usize = audits.iter().map(|(_, a)| a.euler_violations.len()).sum();
    r.check(
        "5",
        graphs >= EULER_MIN_GRAPHS && bad == 0,
        format!("{graphs} generated graphs, {bad} violations"),
    );
}

fn criterion_6(r: &mut Report) {
    let c = tau0_k10_exclusion().constants();
    r.check("6", c == [23, 15, 10, 10, 4], format!("constants {c:?}"));
}

fn criterion_7(r: &mut Report) {
    let (a3, a9, a10) = (area_upper(3).unwrap(), area_upper(9).unwrap(), area_upper(10).unwrap());
    let (f7, a4) = (f4_upper_bound(7), a4_upper_bound(4));
    r.check(
        "7",
        (a3 - 1.0).abs() <= AREA_TOL && a9 < 15.0 && 15.0 <= a10 && f7 == 630 && a4 == 64,
        format!("area_upper(3)={a3}, area_upper(9)={a9:.6}, area_upper(10)={a10:.6}, f4(7)={f7}, a4(4)={a4}"),
    );
}

/// Five rhombi around an equilateral triangle: one quadrangle component with q = 5 and an
/// outer boundary of 9 edges.
const RHOMBUS_RING: &str = "0b020300010405000106040002030708000208000309070004060a080004070b0500060a0007090b00080a00";
const KNOWN_QUAD_VIOLATIONS: usize = 2906;

fn criterion_8(r: &mut Report, audits: &[(i64, Audit)]) {
    let comps: u64 = audits.iter().map(|(_, a)| a.quad_components).sum();
    let bad: usize = audits.iter().map(|(_, a)| a.quad_violations.len()).sum();
    let ring = CanonicalCode::from_hex(RHOMBUS_RING).unwrap().decode().unwrap();
    let c = &ring.quadrangle_decomposition().components[0];
    let realizable = realizer::solve(&ring, &RealizeOptions::default()).is_realizable();
    let detail = format!(
        "{comps} quadrangle components up to n = {QUAD_MAX_N}, {bad} violations; \
         realizable ring q={} boundary={} < {}: {realizable}",
        c.q,
        c.boundary_length,
        quad_boundary_bound(c.q)
    );
    let status = if comps > 0 && bad == 0 {
        Status::Pass
    } else if bad == KNOWN_QUAD_VIOLATIONS && realizable && c.boundary_length < quad_boundary_bound(c.q) {
        Status::Known
    } else {
        Status::Fail
    };
    r.line("8", status, detail);
}

fn criterion_9(r: &mut Report, audits: &[(i64, Audit)]) {
    let graphs: u64 = audits.iter().map(|(_, a)| a.visited).sum();
    let bad: usize = audits.iter().map(|(_, a)| a.round_trip_failures.len()).sum();
    let cut = cut_decomposition_bound(17, 17).unwrap();
    r.check(
        "9",
        bad == 0 && cut == 34,
        format!("{graphs} graphs round-tripped up to n = {SEARCH_MAX_N}, {bad} mismatches; cut(17, 17) = {cut}"),
    );
}

fn main() -> ExitCode {
    let mut r = Report { unexpected: 0 };
    let mut audits = Vec::new();
    for tau in [2, 4] {
        let t = Instant::now();
        let mut a = Audit::default();
        let stats = enumerate(&SearchConfig::tau(tau, SEARCH_MAX_N), &mut a).unwrap();
        println!("search tau={tau} max_n={SEARCH_MAX_N}: {} nodes, {} candidates, {:.1?}", stats.expanded, stats.candidates, t.elapsed());
        audits.push((tau, a));
    }
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r, &audits);
    criterion_4(&mut r);
    criterion_5(&mut r, &audits);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r, &audits);
    criterion_9(&mut r, &audits);
    if r.unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} unexpected failures", r.unexpected);
        ExitCode::FAILURE
    }
}
