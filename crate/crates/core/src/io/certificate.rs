//! Self-contained JSONL records of what was decided about a graph.
//!
//! Records always use the labelling of the decoded canonical code, so vertex numbers in
//! witnesses and coordinates refer to the same graph on every machine.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{BufRead, Write};
use thiserror::Error;

use crate::canon::CanonicalCode;
use crate::criteria::{self, Filter, Rule, Verdict};
use crate::generator::{SearchConfig, Survivor};
use crate::geom::Point;
use crate::plane_graph::{FaceProfile, GraphError, PlaneGraph};
use crate::realizer::{self, RealizeOptions, RealizeVerdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// First 16 hex digits of the SHA-256 of the JSON search configuration.
    pub config_hash: String,
    pub seed: u64,
    pub tol: f64,
    pub version: String,
}

impl Provenance {
    pub fn new(config: &SearchConfig) -> Self {
        let json = serde_json::to_vec(config).expect("configs serialize");
        Provenance {
            config_hash: hex_prefix(&json),
            seed: config.realize.seed,
            tol: config.realize.tol,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Provenance of a standalone realizer run.
    pub fn for_realize(opts: &RealizeOptions) -> Self {
        let json = serde_json::to_vec(opts).expect("options serialize");
        Provenance {
            config_hash: hex_prefix(&json),
            seed: opts.seed,
            tol: opts.tol,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

fn hex_prefix(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub code: String,
    pub profile: FaceProfile,
    pub verdicts: Vec<Verdict>,
    pub realize: Option<String>,
    pub coords: Option<Vec<[f64; 2]>>,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum RecheckError {
    #[error("code does not decode: {0}")]
    Decode(String),
    #[error("recorded profile differs from the decoded graph")]
    Profile,
    #[error("rule {rule}: recorded {recorded:?}, recomputed {now:?}")]
    Mismatch { rule: Rule, recorded: String, now: String },
}

impl CertificateRecord {
    /// `g` must carry the labelling of its decoded canonical code.
    pub fn new(g: &PlaneGraph, verdicts: Vec<Verdict>, realize: Option<&RealizeVerdict>, provenance: Provenance) -> Self {
        let coords = match realize {
            Some(RealizeVerdict::Realizable(r)) => Some(r.coords.iter().map(|p| [p.x, p.y]).collect()),
            _ => None,
        };
        CertificateRecord {
            code: g.canonical_code().to_hex(),
            profile: g.face_profile(),
            verdicts,
            realize: realize.map(|r| r.tag().to_string()),
            coords,
            provenance,
        }
    }

    pub fn from_survivor(s: &Survivor, config: &SearchConfig) -> Self {
        CertificateRecord::new(&s.node.graph, s.verdicts.clone(), s.realize.as_ref(), Provenance::new(config))
    }

    /// The graph in the record's labelling.
    pub fn graph(&self) -> Result<PlaneGraph, RecheckError> {
        let code = CanonicalCode::from_hex(&self.code).ok_or_else(|| RecheckError::Decode("bad hex".into()))?;
        code.decode().map_err(|e: GraphError| RecheckError::Decode(e.to_string()))
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// Re-runs every recorded rule on the decoded graph.
    pub fn recheck(&self) -> Result<(), RecheckError> {
        let g = self.graph()?;
        if g.face_profile() != self.profile {
            return Err(RecheckError::Profile);
        }
        for v in &self.verdicts {
            let now = match rule_filter(v.rule) {
                Filter::Realize => self.recheck_realize(&g, v)?,
                f => criteria::evaluate_final(&g, &[f], true).pop().expect("one final filter gives one verdict"),
            };
            if now.passed != v.passed || (v.rule != Rule::Realizable && (now.rule != v.rule || now.witness != v.witness)) {
                return Err(RecheckError::Mismatch {
                    rule: v.rule,
                    recorded: format!("{} {}", v.passed, v.witness),
                    now: format!("{} {}", now.passed, now.witness),
                });
            }
        }
        Ok(())
    }

    fn recheck_realize(&self, g: &PlaneGraph, recorded: &Verdict) -> Result<Verdict, RecheckError> {
        if let Some(c) = &self.coords {
            let pts: Vec<Point> = c.iter().map(|p| Point::new(p[0], p[1])).collect();
            return Ok(realizer::verify_realization(g, &pts, self.provenance.tol));
        }
        let opts = RealizeOptions { seed: self.provenance.seed, tol: self.provenance.tol, ..RealizeOptions::default() };
        let rv = realizer::solve(g, &opts);
        if self.realize.as_deref() != Some(rv.tag()) {
            return Err(RecheckError::Mismatch {
                rule: recorded.rule,
                recorded: self.realize.clone().unwrap_or_default(),
                now: rv.tag().into(),
            });
        }
        Ok(Verdict { passed: rv.is_realizable(), rule: Rule::Realizable, witness: rv.summary() })
    }
}

fn rule_filter(r: Rule) -> Filter {
    match r {
        Rule::TauParity | Rule::EdgeSum | Rule::VertexSum | Rule::FaceCount | Rule::FaceWeight => Filter::Euler,
        Rule::TriangleBound => Filter::TriangleBound,
        Rule::TauBounds => Filter::TauBounds,
        Rule::CorollaryBounds => Filter::Corollary,
        Rule::AreaArgument => Filter::AreaArgument,
        Rule::Degree2Triangle => Filter::Degree2Triangle,
        Rule::QuadComponents => Filter::QuadComponents,
        Rule::Realizable => Filter::Realize,
    }
}

pub fn write_jsonl<'a>(records: impl IntoIterator<Item = &'a CertificateRecord>, w: &mut impl Write) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(r: impl BufRead) -> Result<Vec<CertificateRecord>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_record_round_trips() {
        let g = PlaneGraph::cycle(3).canonical_code().decode().unwrap();
        let verdicts = criteria::evaluate_final(&g, &Filter::default_set(), true);
        let rv = realizer::solve(&g, &RealizeOptions::default());
        let rec = CertificateRecord::new(&g, verdicts, Some(&rv), Provenance::for_realize(&RealizeOptions::default()));
        let mut buf = Vec::new();
        write_jsonl([&rec], &mut buf).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1);
        let back = read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, vec![rec.clone()]);
        back[0].recheck().unwrap();
        assert!(rec.coords.is_some());
    }

    #[test]
    fn tampered_witness_is_caught() {
        let g = PlaneGraph::cycle(3).canonical_code().decode().unwrap();
        let mut verdicts = criteria::evaluate_final(&g, &[Filter::TriangleBound], true);
        verdicts[0].passed = !verdicts[0].passed;
        let rec = CertificateRecord::new(&g, verdicts, None, Provenance::for_realize(&RealizeOptions::default()));
        assert!(matches!(rec.recheck(), Err(RecheckError::Mismatch { rule: Rule::TriangleBound, .. })));
    }
}
