//! Indexed morphisms of weighted graphs, harmonicity, pullback of divisors and
//! removal of contracted edges.

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{MetricGraph, Point};
use crate::rational::{qi, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeImage {
    /// The edge is contracted to this target vertex.
    Vertex(usize),
    Edge(usize),
}

/// A map of graphs together with an index on every edge; contracted edges
/// carry index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedMorphism {
    pub source: WeightedGraph,
    pub target: WeightedGraph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<EdgeImage>,
    pub index: Vec<u32>,
    pub source_lengths: Option<Vec<Q>>,
    pub target_lengths: Option<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphismReport {
    pub harmonic: bool,
    pub non_degenerate: bool,
    /// Common value of the fiber sums when harmonic over a connected target.
    pub degree: Option<u32>,
    /// Horizontal multiplicity per source vertex, when defined.
    pub multiplicity: Vec<Option<u32>>,
    /// Per source vertex, `(target edge, sum of indices)` for every target edge
    /// at the image vertex.
    pub local_sums: Vec<Vec<(usize, u32)>>,
    /// `None` when lengths are not supplied.
    pub metric_consistent: Option<bool>,
    pub violations: Vec<String>,
}

impl IndexedMorphism {
    pub fn is_contracted(&self, e: usize) -> bool {
        matches!(self.edge_map[e], EdgeImage::Vertex(_))
    }

    pub fn contracted_edges(&self) -> Vec<usize> {
        (0..self.edge_map.len()).filter(|&e| self.is_contracted(e)).collect()
    }

    /// Source edges mapping onto target edge `t`.
    pub fn edges_over(&self, t: usize) -> Vec<usize> {
        (0..self.edge_map.len())
            .filter(|&e| self.edge_map[e] == EdgeImage::Edge(t))
            .collect()
    }

    pub fn fiber(&self, t: usize) -> Vec<usize> {
        (0..self.vertex_map.len()).filter(|&v| self.vertex_map[v] == t).collect()
    }

    fn check_structure(&self) -> Result<()> {
        let bad = |s: String| Err(Error::Structural(s));
        if self.vertex_map.len() != self.source.vertex_count() {
            return bad("vertex map has the wrong length".into());
        }
        if self.edge_map.len() != self.source.edge_count() || self.index.len() != self.source.edge_count() {
            return bad("edge map or index has the wrong length".into());
        }
        for (v, &t) in self.vertex_map.iter().enumerate() {
            if t >= self.target.vertex_count() {
                return bad(format!("vertex {v} maps outside the target"));
            }
        }
        for e in 0..self.source.edge_count() {
            let [a, b] = self.source.ends(e);
            let (fa, fb) = (self.vertex_map[a], self.vertex_map[b]);
            match self.edge_map[e] {
                EdgeImage::Vertex(t) => {
                    if t >= self.target.vertex_count() || fa != t || fb != t {
                        return bad(format!("contracted edge {e} has ends outside its image vertex"));
                    }
                    if self.index[e] != 0 {
                        return bad(format!("contracted edge {e} has nonzero index"));
                    }
                }
                EdgeImage::Edge(t) => {
                    if t >= self.target.edge_count() {
                        return bad(format!("edge {e} maps outside the target"));
                    }
                    let [x, y] = self.target.ends(t);
                    if !((fa == x && fb == y) || (fa == y && fb == x)) {
                        return bad(format!("edge {e} is not mapped onto an edge between the images of its ends"));
                    }
                    if self.index[e] == 0 {
                        return bad(format!("edge {e} maps to an edge with index 0"));
                    }
                }
            }
        }
        if let Some(l) = &self.source_lengths {
            if l.len() != self.source.edge_count() {
                return bad("source lengths have the wrong length".into());
            }
        }
        if let Some(l) = &self.target_lengths {
            if l.len() != self.target.edge_count() {
                return bad("target lengths have the wrong length".into());
            }
        }
        Ok(())
    }

    /// `(target edge, sum of indices of edge ends at v over it)` for each
    /// target edge incident to the image of `v`.
    pub fn local_sums(&self, v: usize) -> Vec<(usize, u32)> {
        let t = self.vertex_map[v];
        let mut out: Vec<(usize, u32)> = Vec::new();
        for te in 0..self.target.edge_count() {
            let [x, y] = self.target.ends(te);
            if x == t || y == t {
                out.push((te, 0));
            }
        }
        for (e, u) in self.source.incidence()[v].iter().copied() {
            let _ = u;
            if let EdgeImage::Edge(te) = self.edge_map[e] {
                if let Some(slot) = out.iter_mut().find(|(x, _)| *x == te) {
                    slot.1 += self.index[e];
                }
            }
        }
        out
    }

    /// Horizontal multiplicity at `v`; `None` when the local sums differ.
    pub fn horizontal_multiplicity(&self, v: usize) -> Option<u32> {
        let sums = self.local_sums(v);
        match sums.first() {
            None => Some(0),
            Some(&(_, s)) => sums.iter().all(|&(_, x)| x == s).then_some(s),
        }
    }

    pub fn check(&self) -> Result<MorphismReport> {
        self.check_structure()?;
        let n = self.source.vertex_count();
        let mut violations = Vec::new();
        let local_sums: Vec<_> = (0..n).map(|v| self.local_sums(v)).collect();
        let multiplicity: Vec<_> = (0..n).map(|v| self.horizontal_multiplicity(v)).collect();
        for v in 0..n {
            if multiplicity[v].is_none() {
                violations.push(format!("not harmonic at vertex {v}: sums {:?}", local_sums[v]));
            }
        }
        let harmonic = multiplicity.iter().all(|m| m.is_some());
        let mut non_degenerate = true;
        for v in 0..n {
            if !local_sums[v].iter().any(|&(_, s)| s >= 1) {
                non_degenerate = false;
                violations.push(format!("degenerate at vertex {v}"));
            }
        }
        let degree = if harmonic { self.degree_if_constant() } else { None };
        let metric_consistent = match (&self.source_lengths, &self.target_lengths) {
            (Some(ls), Some(lt)) => {
                let mut ok = true;
                for e in 0..self.source.edge_count() {
                    if let EdgeImage::Edge(t) = self.edge_map[e] {
                        if &ls[e] * qi(self.index[e] as i64) != lt[t] {
                            ok = false;
                            violations.push(format!("edge {e}: index times length differs from the target length"));
                        }
                    }
                }
                Some(ok)
            }
            _ => None,
        };
        Ok(MorphismReport {
            harmonic,
            non_degenerate,
            degree,
            multiplicity,
            local_sums,
            metric_consistent,
            violations,
        })
    }

    fn degree_if_constant(&self) -> Option<u32> {
        let mut values = Vec::new();
        for t in 0..self.target.edge_count() {
            values.push(self.edges_over(t).iter().map(|&e| self.index[e]).sum::<u32>());
        }
        for t in 0..self.target.vertex_count() {
            values.push(self.fiber(t).iter().map(|&v| self.horizontal_multiplicity(v).unwrap_or(0)).sum());
        }
        let d = values[0];
        values.iter().all(|&x| x == d).then_some(d)
    }

    pub fn source_metric(&self) -> Result<MetricGraph> {
        let l = self.source_lengths.clone().ok_or_else(|| Error::Precondition("source lengths missing".into()))?;
        MetricGraph::new(self.source.clone(), l)
    }

    pub fn target_metric(&self) -> Result<MetricGraph> {
        let l = self.target_lengths.clone().ok_or_else(|| Error::Precondition("target lengths missing".into()))?;
        MetricGraph::new(self.target.clone(), l)
    }

    /// Local Riemann–Hurwitz defect at each source vertex:
    /// `m(v)(2 - 2w(f(v))) - sum over edge ends at v of (index - 1) - (2 - 2w(v))`.
    pub fn riemann_hurwitz_defects(&self) -> Result<Vec<i64>> {
        let report = self.check()?;
        if !report.harmonic {
            return Err(Error::NotHarmonic);
        }
        let inc = self.source.incidence();
        Ok((0..self.source.vertex_count())
            .map(|v| {
                let m = report.multiplicity[v].unwrap() as i64;
                let wt = self.target.weight(self.vertex_map[v]) as i64;
                let ram: i64 = inc[v].iter().map(|&(e, _)| self.index[e] as i64 - 1).sum();
                m * (2 - 2 * wt) - ram - (2 - 2 * self.source.weight(v) as i64)
            })
            .collect())
    }
}

pub fn check_morphism(f: &IndexedMorphism) -> Result<MorphismReport> {
    f.check()
}

/// Pulls back a divisor on the target metric graph. Requires a harmonic,
/// metrically consistent morphism whose target has no loops.
pub fn pullback(f: &IndexedMorphism, d: &Divisor) -> Result<Divisor> {
    let report = f.check()?;
    if !report.harmonic {
        return Err(Error::NotHarmonic);
    }
    if report.metric_consistent != Some(true) {
        return Err(Error::Precondition("pullback needs consistent edge lengths".into()));
    }
    let src = f.source_metric()?;
    let tgt = f.target_metric()?;
    d.check(&tgt)?;
    let mut out = Divisor::zero();
    for (p, &c) in d.iter() {
        match p {
            Point::Vertex(t) => {
                for v in f.fiber(*t) {
                    let m = report.multiplicity[v].unwrap() as i64;
                    if m > 0 {
                        out.add_chips(Point::Vertex(v), c * m);
                    }
                }
            }
            Point::Edge(t, s) => {
                let [x, y] = f.target.ends(*t);
                if x == y {
                    return Err(Error::Precondition("pullback across a target loop".into()));
                }
                for e in f.edges_over(*t) {
                    let mu = f.index[e] as i64;
                    let local = s / qi(mu);
                    let a = f.source.ends(e)[0];
                    let off = if f.vertex_map[a] == x { local } else { src.length(e) - &local };
                    out.add_chips(src.point(e, off)?, c * mu);
                }
            }
        }
    }
    Ok(out)
}

/// Bookkeeping of [`remove_contractions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionRemoval {
    pub morphism: IndexedMorphism,
    /// `(old contracted edge, new midpoint vertex, new target leaf edge)`.
    pub midpoints: Vec<(usize, usize, usize)>,
    /// Per old source edge, the new edges replacing it.
    pub edge_pieces: Vec<Vec<usize>>,
    /// New source leaf edges; each retracts onto its first end.
    pub added_leaves: Vec<usize>,
}

/// Replaces every contracted edge by two halves mapping onto a new target leaf
/// and adds leaves so that the result stays harmonic of the same degree.
pub fn remove_contractions(f: &IndexedMorphism) -> Result<ContractionRemoval> {
    let report = f.check()?;
    if !report.harmonic {
        return Err(Error::NotHarmonic);
    }
    let mult: Vec<u32> = report.multiplicity.iter().map(|m| m.unwrap()).collect();
    let mut s_weights = f.source.weights().to_vec();
    let mut s_ends: Vec<[usize; 2]> = Vec::new();
    let mut t_weights = f.target.weights().to_vec();
    let mut t_ends = f.target.all_ends().to_vec();
    let mut vertex_map = f.vertex_map.clone();
    let mut edge_map = Vec::new();
    let mut index = Vec::new();
    let mut s_len: Option<Vec<Q>> = f.source_lengths.as_ref().map(|_| Vec::new());
    let mut t_len = f.target_lengths.clone();
    let half = |e: usize| f.source_lengths.as_ref().map(|l| &l[e] / qi(2));
    let mut edge_pieces = Vec::new();
    let mut midpoints = Vec::new();
    let mut added_leaves = Vec::new();

    let mut push_edge = |ends: [usize; 2], img: EdgeImage, mu: u32, len: Option<Q>, s_ends: &mut Vec<[usize; 2]>| {
        s_ends.push(ends);
        edge_map.push(img);
        index.push(mu);
        if let (Some(v), Some(l)) = (s_len.as_mut(), len) {
            v.push(l);
        }
        s_ends.len() - 1
    };

    for e in 0..f.source.edge_count() {
        let [a, b] = f.source.ends(e);
        match f.edge_map[e] {
            EdgeImage::Edge(_) => {
                let l = f.source_lengths.as_ref().map(|l| l[e].clone());
                let id = push_edge([a, b], f.edge_map[e], f.index[e], l, &mut s_ends);
                edge_pieces.push(vec![id]);
            }
            EdgeImage::Vertex(t) => {
                let need_at_ends = if a == b { 2 } else { 1 };
                if mult[a] < need_at_ends || mult[b] < need_at_ends {
                    return Err(Error::Precondition(format!(
                        "contracted edge {e} has an end of too small multiplicity"
                    )));
                }
                let leaf = t_weights.len();
                t_weights.push(0);
                let te = t_ends.len();
                t_ends.push([t, leaf]);
                if let Some(tl) = t_len.as_mut() {
                    tl.push(half(e).unwrap());
                }
                let w = s_weights.len();
                s_weights.push(0);
                vertex_map.push(leaf);
                let p1 = push_edge([a, w], EdgeImage::Edge(te), 1, half(e), &mut s_ends);
                let p2 = push_edge([w, b], EdgeImage::Edge(te), 1, half(e), &mut s_ends);
                edge_pieces.push(vec![p1, p2]);
                midpoints.push((e, w, te));
                for x in f.fiber(t) {
                    let already = if x == a && x == b {
                        2
                    } else if x == a || x == b {
                        1
                    } else {
                        0
                    };
                    for _ in 0..(mult[x] - already) {
                        let y = s_weights.len();
                        s_weights.push(0);
                        vertex_map.push(leaf);
                        added_leaves.push(push_edge([x, y], EdgeImage::Edge(te), 1, half(e), &mut s_ends));
                    }
                }
            }
        }
    }
    let morphism = IndexedMorphism {
        source: WeightedGraph::new(s_weights, s_ends)?,
        target: WeightedGraph::new(t_weights, t_ends)?,
        vertex_map,
        edge_map,
        index,
        source_lengths: s_len,
        target_lengths: t_len,
    };
    Ok(ContractionRemoval {
        morphism,
        midpoints,
        edge_pieces,
        added_leaves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn small_examples() {
        let r = fixtures::non_harmonic_example().check().unwrap();
        assert!(!r.harmonic);
        assert!(r.non_degenerate);
        assert_eq!(r.multiplicity[2], None);

        let r = fixtures::degenerate_example().check().unwrap();
        assert!(r.harmonic);
        assert!(!r.non_degenerate);
        assert_eq!(r.degree, Some(3));

        let r = fixtures::degree_two_example().check().unwrap();
        assert!(r.harmonic);
        assert!(r.non_degenerate);
        assert_eq!(r.degree, Some(2));
    }

    #[test]
    fn structural_errors() {
        let mut f = fixtures::degree_two_example();
        f.vertex_map[0] = 3;
        assert!(matches!(f.check(), Err(Error::Structural(_))));
        let mut f = fixtures::degree_two_example();
        f.index[0] = 0;
        assert!(matches!(f.check(), Err(Error::Structural(_))));
    }

    #[test]
    fn contraction_removal_keeps_degree() {
        let f = fixtures::contracted_fibers_example();
        assert_eq!(f.check().unwrap().degree, Some(3));
        let out = remove_contractions(&f).unwrap();
        let g = &out.morphism;
        assert!(g.contracted_edges().is_empty());
        let r = g.check().unwrap();
        assert!(r.harmonic && r.non_degenerate);
        assert_eq!(r.degree, Some(3));
        assert_eq!(r.metric_consistent, Some(true));
        // three leaves at the first target vertex and one at the middle one
        let leaves_at = |t: usize| (3..g.target.vertex_count()).filter(|&x| g.target.ends(x - 1)[0] == t).count();
        assert_eq!(leaves_at(0), 3);
        assert_eq!(leaves_at(1), 1);
        assert_eq!(g.source.genus(), f.source.genus());
    }

    #[test]
    fn pullback_of_points() {
        let f = fixtures::contracted_fibers_example();
        let out = remove_contractions(&f).unwrap().morphism;
        let tgt = out.target_metric().unwrap();
        let d = Divisor::from_points(&[Point::Vertex(2), Point::Edge(0, crate::rational::q(1, 2))]);
        let p = pullback(&out, &d).unwrap();
        assert_eq!(p.degree(), 2 * 3);
        assert_eq!(p.coeff(&Point::Vertex(6)), 3);
        let _ = tgt;
    }

    #[test]
    fn defects_vanish_without_contractions() {
        let f = fixtures::contracted_fibers_example();
        let defects = f.riemann_hurwitz_defects().unwrap();
        assert_eq!(defects.len(), f.source.vertex_count());
        let out = remove_contractions(&f).unwrap();
        let d = out.morphism.riemann_hurwitz_defects().unwrap();
        for (_, w, _) in &out.midpoints {
            assert_eq!(d[*w], 2);
        }
    }
}
