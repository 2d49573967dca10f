//! Heuristic search for degree-3 divisors of rank at least 1.
//!
//! Strategies are looked up by name so callers (and the command line) can pick
//! an order. A `None` answer never proves that no such divisor exists.

use std::collections::{BTreeMap, BTreeSet};

use crate::divisor::{rank_at_least, reduce, Divisor};
use crate::error::{Error, Result};
use crate::metric::{model_vertex_points, MetricGraph, Point};

pub trait CandidateSource: Send + Sync {
    fn name(&self) -> &'static str;
    fn candidates(&self, m: &MetricGraph) -> Result<Vec<Divisor>>;
}

type Factory = fn() -> Box<dyn CandidateSource>;

pub fn registry() -> BTreeMap<&'static str, Factory> {
    let mut r: BTreeMap<&'static str, Factory> = BTreeMap::new();
    r.insert("vertices", || Box::new(VertexTriples));
    r.insert("reduced-forms", || Box::new(ReducedForms));
    r.insert("midpoints", || Box::new(Midpoints));
    r
}

pub const DEFAULT_ORDER: [&str; 3] = ["vertices", "reduced-forms", "midpoints"];

/// All multisets of size 3 drawn from `pts`.
fn triples(pts: &[Point]) -> Vec<Divisor> {
    let n = pts.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                out.push(Divisor::from_points(&[pts[i].clone(), pts[j].clone(), pts[k].clone()]));
            }
        }
    }
    out
}

pub struct VertexTriples;

impl CandidateSource for VertexTriples {
    fn name(&self) -> &'static str {
        "vertices"
    }

    fn candidates(&self, m: &MetricGraph) -> Result<Vec<Divisor>> {
        Ok(triples(&model_vertex_points(m)))
    }
}

/// Interior points met by reducing vertex triples at every vertex, combined
/// with pairs of vertices.
pub struct ReducedForms;

impl CandidateSource for ReducedForms {
    fn name(&self) -> &'static str {
        "reduced-forms"
    }

    fn candidates(&self, m: &MetricGraph) -> Result<Vec<Divisor>> {
        let verts = model_vertex_points(m);
        let mut found: BTreeSet<Point> = BTreeSet::new();
        for d in triples(&verts) {
            for v in &verts {
                for p in reduce(m, &d, v)?.support() {
                    if matches!(p, Point::Edge(..)) {
                        found.insert(p);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for p in &found {
            for i in 0..verts.len() {
                for j in i..verts.len() {
                    out.push(Divisor::from_points(&[verts[i].clone(), verts[j].clone(), p.clone()]));
                }
            }
        }
        Ok(out)
    }
}

/// Vertices together with midpoints of the model edges.
pub struct Midpoints;

impl CandidateSource for Midpoints {
    fn name(&self) -> &'static str {
        "midpoints"
    }

    fn candidates(&self, m: &MetricGraph) -> Result<Vec<Divisor>> {
        let mut pts = model_vertex_points(m);
        for e in 0..m.edge_count() {
            pts.push(m.midpoint(e));
        }
        pts.sort();
        pts.dedup();
        Ok(triples(&pts))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchHit {
    pub strategy: String,
    pub divisor: Divisor,
}

pub fn find_trigonal_divisor(m: &MetricGraph) -> Result<Option<SearchHit>> {
    find_trigonal_divisor_with(m, &DEFAULT_ORDER)
}

pub fn find_trigonal_divisor_with(m: &MetricGraph, order: &[&str]) -> Result<Option<SearchHit>> {
    if m.genus() < 2 {
        return Err(Error::GenusTooSmall(m.genus()));
    }
    let reg = registry();
    let mut tried: BTreeSet<Divisor> = BTreeSet::new();
    for name in order {
        let make = reg
            .get(name)
            .ok_or_else(|| Error::Precondition(format!("unknown search strategy {name:?}")))?;
        let source = make();
        for d in source.candidates(m)? {
            if !tried.insert(d.clone()) {
                continue;
            }
            if rank_at_least(m, &d, 1)? {
                return Ok(Some(SearchHit {
                    strategy: source.name().to_string(),
                    divisor: d,
                }));
            }
        }
    }
    Ok(None)
}
