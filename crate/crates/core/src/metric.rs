//! Metric graphs presented by a model with exact rational edge lengths.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Simplification, VertexFate, WeightedGraph};
use crate::rational::{q, qi, Q};

/// A point of a metric graph. Interior offsets are measured from the first end
/// of the edge and are always strictly between 0 and the edge length.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    Edge(usize, Q),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGraph {
    graph: WeightedGraph,
    lengths: Vec<Q>,
}

/// Relates a finer model (or a tropical modification) to a coarser one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementMap {
    /// Per coarse edge, the fine edges from its first end to its second end;
    /// `true` when the fine edge runs in the same direction.
    pub pieces: Vec<Vec<(usize, bool)>>,
    /// Per coarse vertex, the fine vertex sitting on it.
    pub vertex_to_fine: Vec<usize>,
    /// Per fine vertex, its image (removed trees retract onto their base).
    pub fine_vertex_image: Vec<Point>,
    /// Per fine edge, `(coarse edge, offset at fine first end, offset at fine
    /// second end)`; `None` for edges of removed trees.
    pub fine_edge_image: Vec<Option<(usize, Q, Q)>>,
}

#[derive(Debug, Clone)]
pub struct CanonicalModel {
    pub model: MetricGraph,
    /// Fine side is the input model.
    pub map: RefinementMap,
}

#[derive(Debug, Clone)]
pub struct LooplessCanonical {
    pub canonical: CanonicalModel,
    pub loopless: MetricGraph,
    /// Fine side is `loopless`, coarse side is `canonical.model`.
    pub to_canonical: RefinementMap,
}

impl MetricGraph {
    pub fn new(graph: WeightedGraph, lengths: Vec<Q>) -> Result<Self> {
        if lengths.len() != graph.edge_count() {
            return Err(Error::InvalidGraph(format!(
                "{} lengths for {} edges",
                lengths.len(),
                graph.edge_count()
            )));
        }
        if let Some(e) = lengths.iter().position(|l| !l.is_positive()) {
            return Err(Error::InvalidGraph(format!("edge {e} has non-positive length")));
        }
        Ok(MetricGraph { graph, lengths })
    }

    /// Every edge of length 1.
    pub fn unit(graph: WeightedGraph) -> Self {
        let lengths = vec![qi(1); graph.edge_count()];
        MetricGraph { graph, lengths }
    }

    /// Shorthand for fixtures: `(a, b, numerator, denominator)` per edge.
    pub fn from_edges(n: usize, edges: &[(usize, usize, i64, i64)]) -> Result<Self> {
        let g = WeightedGraph::from_edges(n, &edges.iter().map(|&(a, b, _, _)| (a, b)).collect::<Vec<_>>())?;
        Self::new(g, edges.iter().map(|&(_, _, p, d)| q(p, d)).collect())
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn length(&self, e: usize) -> &Q {
        &self.lengths[e]
    }

    pub fn lengths(&self) -> &[Q] {
        &self.lengths
    }

    pub fn genus(&self) -> usize {
        self.graph.genus()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Normalized point at `offset` from the first end of `e`.
    pub fn point(&self, e: usize, offset: Q) -> Result<Point> {
        if e >= self.edge_count() {
            return Err(Error::UnknownEdge(e));
        }
        let l = &self.lengths[e];
        let [a, b] = self.graph.ends(e);
        if offset.is_negative() || &offset > l {
            return Err(Error::InvalidPoint(format!("offset {offset} outside edge {e} of length {l}")));
        }
        if offset.is_zero() {
            Ok(Point::Vertex(a))
        } else if &offset == l {
            Ok(Point::Vertex(b))
        } else {
            Ok(Point::Edge(e, offset))
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Vertex(v) if *v < self.vertex_count() => Ok(()),
            Point::Vertex(v) => Err(Error::UnknownVertex(*v)),
            Point::Edge(e, t) => match self.point(*e, t.clone())? {
                Point::Edge(..) => Ok(()),
                _ => Err(Error::InvalidPoint(format!("offset {t} on edge {e} is an endpoint"))),
            },
        }
    }

    /// Midpoint of an edge.
    pub fn midpoint(&self, e: usize) -> Point {
        Point::Edge(e, &self.lengths[e] / qi(2))
    }

    /// Subdivides at the given points. Old vertex and edge ids keep their
    /// positions for vertices; edges are renumbered piece by piece.
    pub fn refine_at(&self, pts: &[Point]) -> Result<(MetricGraph, RefinementMap)> {
        let mut cuts: BTreeMap<usize, BTreeSet<Q>> = BTreeMap::new();
        for p in pts {
            self.check_point(p)?;
            if let Point::Edge(e, t) = p {
                cuts.entry(*e).or_default().insert(t.clone());
            }
        }
        let mut weights = self.graph.weights().to_vec();
        let mut ends = Vec::new();
        let mut lengths = Vec::new();
        let mut fine_vertex_image: Vec<Point> = (0..self.vertex_count()).map(Point::Vertex).collect();
        let mut fine_edge_image = Vec::new();
        let mut pieces = Vec::new();
        for e in 0..self.edge_count() {
            let [a, b] = self.graph.ends(e);
            let mut prev = a;
            let mut prev_t = qi(0);
            let mut list = Vec::new();
            if let Some(ts) = cuts.get(&e) {
                for t in ts {
                    let v = weights.len();
                    weights.push(0);
                    fine_vertex_image.push(Point::Edge(e, t.clone()));
                    list.push((ends.len(), true));
                    ends.push([prev, v]);
                    lengths.push(t - &prev_t);
                    fine_edge_image.push(Some((e, prev_t.clone(), t.clone())));
                    prev = v;
                    prev_t = t.clone();
                }
            }
            list.push((ends.len(), true));
            ends.push([prev, b]);
            lengths.push(&self.lengths[e] - &prev_t);
            fine_edge_image.push(Some((e, prev_t, self.lengths[e].clone())));
            pieces.push(list);
        }
        let fine = MetricGraph {
            graph: WeightedGraph::from_parts(weights, ends),
            lengths,
        };
        let map = RefinementMap {
            pieces,
            vertex_to_fine: (0..self.vertex_count()).collect(),
            fine_vertex_image,
            fine_edge_image,
        };
        Ok((fine, map))
    }

    fn from_simplification(&self, s: Simplification) -> CanonicalModel {
        let lengths: Vec<Q> = s
            .chains
            .iter()
            .map(|c| c.iter().fold(qi(0), |acc, &(e, _)| acc + &self.lengths[e]))
            .collect();
        let prefix = |edge: usize, k: usize| -> Q {
            s.chains[edge][..k].iter().fold(qi(0), |acc, &(e, _)| acc + &self.lengths[e])
        };
        let mut fine_vertex_image = vec![Point::Vertex(0); self.vertex_count()];
        let mut vertex_to_fine = vec![0; s.graph.vertex_count()];
        for v in 0..self.vertex_count() {
            if let VertexFate::Kept(n) = s.vertex_fate[v] {
                vertex_to_fine[n] = v;
            }
        }
        let image_of = |v: usize| -> Point {
            match s.vertex_fate[v] {
                VertexFate::Kept(n) => Point::Vertex(n),
                VertexFate::Interior { edge, after } => Point::Edge(edge, prefix(edge, after)),
                VertexFate::Retracts(_) => unreachable!(),
            }
        };
        for (v, img) in fine_vertex_image.iter_mut().enumerate() {
            *img = match s.vertex_fate[v] {
                VertexFate::Retracts(r) => image_of(r),
                _ => image_of(v),
            };
        }
        let fine_edge_image = s
            .edge_fate
            .iter()
            .enumerate()
            .map(|(e, f)| {
                f.map(|(c, k)| {
                    let start = prefix(c, k);
                    let end = &start + &self.lengths[e];
                    if s.chains[c][k].1 {
                        (c, start, end)
                    } else {
                        (c, end, start)
                    }
                })
            })
            .collect();
        CanonicalModel {
            model: MetricGraph {
                graph: s.graph,
                lengths,
            },
            map: RefinementMap {
                pieces: s.chains,
                vertex_to_fine,
                fine_vertex_image,
                fine_edge_image,
            },
        }
    }

    /// Removes trees and suppresses valence-2 vertices. Requires genus at least 2.
    pub fn canonical_model(&self) -> Result<CanonicalModel> {
        let g = self.genus();
        if g < 2 {
            return Err(Error::GenusTooSmall(g));
        }
        Ok(self.from_simplification(self.graph.simplify()))
    }

    /// Leaf removal and valence-2 suppression without the genus precondition.
    pub fn core_model(&self) -> CanonicalModel {
        self.from_simplification(self.graph.simplify())
    }

    pub fn canonical_loopless_model(&self) -> Result<LooplessCanonical> {
        let canonical = self.canonical_model()?;
        Ok(Self::loopless_over(canonical))
    }

    pub(crate) fn loopless_over(canonical: CanonicalModel) -> LooplessCanonical {
        let c = &canonical.model;
        let (lg, piece_ids) = c.graph.loopless_model();
        let mut lengths = vec![qi(0); lg.edge_count()];
        let mut fine_edge_image = vec![None; lg.edge_count()];
        let mut fine_vertex_image: Vec<Point> = (0..c.vertex_count()).map(Point::Vertex).collect();
        let mut pieces = Vec::new();
        for (e, ps) in piece_ids.iter().enumerate() {
            let l = c.length(e).clone();
            if ps.len() == 1 {
                lengths[ps[0]] = l.clone();
                fine_edge_image[ps[0]] = Some((e, qi(0), l));
            } else {
                let h = &l / qi(2);
                lengths[ps[0]] = h.clone();
                lengths[ps[1]] = h.clone();
                fine_edge_image[ps[0]] = Some((e, qi(0), h.clone()));
                fine_edge_image[ps[1]] = Some((e, h.clone(), l));
                fine_vertex_image.push(Point::Edge(e, h));
            }
            pieces.push(ps.iter().map(|&p| (p, true)).collect());
        }
        let loopless = MetricGraph { graph: lg, lengths };
        let to_canonical = RefinementMap {
            pieces,
            vertex_to_fine: (0..c.vertex_count()).collect(),
            fine_vertex_image,
            fine_edge_image,
        };
        LooplessCanonical {
            canonical,
            loopless,
            to_canonical,
        }
    }

    /// Shortest-path distance between two points.
    pub fn distance(&self, a: &Point, b: &Point) -> Q {
        let dist = self.distances_from(a);
        let mut best = match b {
            Point::Vertex(v) => return dist[*v].clone(),
            Point::Edge(e, t) => {
                let [u, v] = self.graph.ends(*e);
                let via_u = &dist[u] + t;
                let via_v = &dist[v] + (&self.lengths[*e] - t);
                if via_u < via_v {
                    via_u
                } else {
                    via_v
                }
            }
        };
        if let (Point::Edge(e1, t1), Point::Edge(e2, t2)) = (a, b) {
            if e1 == e2 {
                let direct = (t1 - t2).abs();
                if direct < best {
                    best = direct;
                }
            }
        }
        best
    }

    /// Distances from a point to every vertex.
    pub fn distances_from(&self, a: &Point) -> Vec<Q> {
        let n = self.vertex_count();
        let mut dist: Vec<Option<Q>> = vec![None; n];
        match a {
            Point::Vertex(v) => dist[*v] = Some(qi(0)),
            Point::Edge(e, t) => {
                let [u, v] = self.graph.ends(*e);
                let lu = t.clone();
                let lv = &self.lengths[*e] - t;
                dist[u] = Some(lu.clone());
                if dist[v].as_ref().is_none_or(|d| &lv < d) {
                    dist[v] = Some(lv);
                }
                if u == v {
                    let m = if t < &(&self.lengths[*e] - t) { t.clone() } else { &self.lengths[*e] - t };
                    dist[u] = Some(m);
                }
            }
        }
        let inc = self.graph.incidence();
        let mut done = vec![false; n];
        for _ in 0..n {
            let mut pick: Option<usize> = None;
            for v in 0..n {
                if !done[v] && dist[v].is_some() && pick.is_none_or(|p| dist[v] < dist[p]) {
                    pick = Some(v);
                }
            }
            let Some(v) = pick else { break };
            done[v] = true;
            let dv = dist[v].clone().unwrap();
            for &(e, u) in &inc[v] {
                let cand = &dv + &self.lengths[e];
                if dist[u].as_ref().is_none_or(|d| &cand < d) {
                    dist[u] = Some(cand);
                }
            }
        }
        dist.into_iter().map(|d| d.expect("connected")).collect()
    }

    /// Glues a metric tree at `at` by identifying the tree's `root` with it.
    /// The map sends the new graph back onto `self`.
    pub fn attach_tree(&self, at: &Point, tree: &MetricGraph, root: usize) -> Result<(MetricGraph, RefinementMap)> {
        if tree.edge_count() + 1 != tree.vertex_count() {
            return Err(Error::Precondition("attached graph is not a tree".into()));
        }
        if root >= tree.vertex_count() {
            return Err(Error::UnknownVertex(root));
        }
        self.check_point(at)?;
        if tree.edge_count() == 0 {
            return Ok((self.clone(), identity_map(self)));
        }
        let (base, mut map) = self.refine_at(std::slice::from_ref(at))?;
        let anchor = match at {
            Point::Vertex(v) => *v,
            Point::Edge(..) => base.vertex_count() - 1,
        };
        let mut weights = base.graph.weights().to_vec();
        let mut tree_ids = vec![0; tree.vertex_count()];
        for (v, id) in tree_ids.iter_mut().enumerate() {
            if v == root {
                *id = anchor;
            } else {
                *id = weights.len();
                weights.push(tree.graph.weight(v));
                map.fine_vertex_image.push(at.clone());
            }
        }
        let mut ends = base.graph.all_ends().to_vec();
        let mut lengths = base.lengths.clone();
        for e in 0..tree.edge_count() {
            let [a, b] = tree.graph.ends(e);
            ends.push([tree_ids[a], tree_ids[b]]);
            lengths.push(tree.lengths[e].clone());
            map.fine_edge_image.push(None);
        }
        let g = MetricGraph {
            graph: WeightedGraph::from_parts(weights, ends),
            lengths,
        };
        Ok((g, map))
    }

    /// Attaches a single leaf of the given length.
    pub fn add_leaf(&self, at: &Point, length: Q) -> Result<(MetricGraph, RefinementMap)> {
        let leaf = MetricGraph::new(WeightedGraph::from_parts(vec![0, 0], vec![[0, 1]]), vec![length])?;
        self.attach_tree(at, &leaf, 0)
    }

    /// Same model with loops removed. Only meaningful when every vertex keeps
    /// an incident non-loop edge.
    pub fn without_loops(&self) -> Result<(MetricGraph, Vec<Option<usize>>)> {
        let mut ends = Vec::new();
        let mut lengths = Vec::new();
        let mut map = Vec::new();
        for e in 0..self.edge_count() {
            if self.graph.is_loop(e) {
                map.push(None);
            } else {
                map.push(Some(ends.len()));
                ends.push(self.graph.ends(e));
                lengths.push(self.lengths[e].clone());
            }
        }
        let g = WeightedGraph::new(self.graph.weights().to_vec(), ends)?;
        Ok((MetricGraph { graph: g, lengths }, map))
    }

    /// Total length.
    pub fn total_length(&self) -> Q {
        self.lengths.iter().fold(qi(0), |a, l| a + l)
    }
}

pub fn identity_map(m: &MetricGraph) -> RefinementMap {
    RefinementMap {
        pieces: (0..m.edge_count()).map(|e| vec![(e, true)]).collect(),
        vertex_to_fine: (0..m.vertex_count()).collect(),
        fine_vertex_image: (0..m.vertex_count()).map(Point::Vertex).collect(),
        fine_edge_image: (0..m.edge_count()).map(|e| Some((e, qi(0), m.length(e).clone()))).collect(),
    }
}

impl RefinementMap {
    /// Image on the coarse model of a point of the fine model.
    pub fn to_coarse(&self, fine: &MetricGraph, coarse: &MetricGraph, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => self.fine_vertex_image[*v].clone(),
            Point::Edge(e, t) => match &self.fine_edge_image[*e] {
                Some((c, s, u)) => {
                    let pos = if s <= u { s + t } else { s - t };
                    coarse.point(*c, pos).expect("inside coarse edge")
                }
                None => self.fine_vertex_image[fine.graph().ends(*e)[0]].clone(),
            },
        }
    }

    /// The point of the fine model lying over a coarse point.
    pub fn to_fine(&self, coarse: &MetricGraph, fine: &MetricGraph, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => Point::Vertex(self.vertex_to_fine[*v]),
            Point::Edge(c, t) => {
                let _ = coarse;
                let mut start = qi(0);
                for &(fe, fwd) in &self.pieces[*c] {
                    let l = fine.length(fe);
                    let end = &start + l;
                    if t < &end {
                        let local = t - &start;
                        let [a, b] = fine.graph().ends(fe);
                        if local.is_zero() {
                            return Point::Vertex(if fwd { a } else { b });
                        }
                        let off = if fwd { local } else { l - &local };
                        return Point::Edge(fe, off);
                    }
                    start = end;
                }
                unreachable!("offset beyond coarse edge")
            }
        }
    }

    /// Composition: `self` maps a -> b, `next` maps b -> c; result maps a -> c.
    pub fn then(&self, a: &MetricGraph, b: &MetricGraph, next: &RefinementMap, c: &MetricGraph) -> RefinementMap {
        let _ = a;
        let fine_vertex_image = self
            .fine_vertex_image
            .iter()
            .map(|p| next.to_coarse(b, c, p))
            .collect();
        let fine_edge_image = (0..a.edge_count())
            .map(|e| {
                let (be, s, u) = self.fine_edge_image[e].clone()?;
                let (ce, s2, u2) = next.fine_edge_image[be].clone()?;
                let map_off = |x: &Q| if s2 <= u2 { &s2 + x } else { &s2 - x };
                Some((ce, map_off(&s), map_off(&u)))
            })
            .collect();
        let vertex_to_fine = next
            .vertex_to_fine
            .iter()
            .map(|&vb| self.vertex_to_fine[vb])
            .collect();
        let pieces = next
            .pieces
            .iter()
            .map(|list| {
                let mut out = Vec::new();
                for &(be, fwd) in list {
                    let sub = &self.pieces[be];
                    if fwd {
                        out.extend(sub.iter().copied());
                    } else {
                        out.extend(sub.iter().rev().map(|&(x, f)| (x, !f)));
                    }
                }
                out
            })
            .collect();
        RefinementMap {
            pieces,
            vertex_to_fine,
            fine_vertex_image,
            fine_edge_image,
        }
    }
}

impl LooplessCanonical {
    /// Vertices of the canonical loopless model, as points of the input model.
    pub fn vertices_on_input(&self, input: &MetricGraph) -> Vec<Point> {
        let c = &self.canonical.model;
        (0..self.loopless.vertex_count())
            .map(|v| {
                let on_canonical = self.to_canonical.fine_vertex_image[v].clone();
                self.canonical.map.to_fine(c, input, &on_canonical)
            })
            .collect()
    }
}

/// Vertices of the canonical loopless model as points of `m`; for genus below 2
/// the vertices of the loopless model of the core are used instead.
pub fn model_vertex_points(m: &MetricGraph) -> Vec<Point> {
    let canonical = if m.genus() >= 2 {
        m.canonical_model().expect("genus checked")
    } else {
        m.core_model()
    };
    MetricGraph::loopless_over(canonical).vertices_on_input(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;

    fn theta(a: i64, b: i64, c: i64) -> MetricGraph {
        MetricGraph::from_edges(2, &[(0, 1, a, 1), (0, 1, b, 1), (0, 1, c, 1)]).unwrap()
    }

    #[test]
    fn point_normalization() {
        let m = theta(1, 2, 3);
        assert_eq!(m.point(1, qi(0)).unwrap(), Point::Vertex(0));
        assert_eq!(m.point(1, qi(2)).unwrap(), Point::Vertex(1));
        assert_eq!(m.point(1, qi(1)).unwrap(), Point::Edge(1, qi(1)));
        assert!(m.point(1, qi(3)).is_err());
        assert!(m.check_point(&Point::Edge(0, qi(1))).is_err());
    }

    #[test]
    fn distances() {
        let m = theta(1, 2, 3);
        assert_eq!(m.distance(&Point::Vertex(0), &Point::Vertex(0)), qi(0));
        assert_eq!(m.distance(&Point::Vertex(0), &Point::Vertex(1)), qi(1));
        assert_eq!(m.distance(&Point::Edge(2, q(1, 2)), &Point::Edge(2, q(3, 2))), qi(1));
        // going around is shorter: 5/2 -> v1 (1/2) -> v0 (1) -> 1/2 on edge 2
        assert_eq!(m.distance(&Point::Edge(2, q(5, 2)), &Point::Edge(2, q(1, 2))), qi(2));
        let lp = MetricGraph::from_edges(1, &[(0, 0, 4, 1)]).unwrap();
        assert_eq!(lp.distance(&Point::Edge(0, qi(1)), &Point::Edge(0, qi(3))), qi(2));
        assert_eq!(lp.distance(&Point::Vertex(0), &Point::Edge(0, qi(3))), qi(1));
    }

    #[test]
    fn refine_pieces() {
        let m = MetricGraph::from_edges(2, &[(0, 1, 5, 1), (0, 1, 1, 1), (0, 1, 1, 1)]).unwrap();
        let (f, map) = m.refine_at(&[Point::Edge(0, qi(2))]).unwrap();
        assert_eq!(f.vertex_count(), 3);
        assert_eq!(f.length(0), &qi(2));
        assert_eq!(f.length(1), &qi(3));
        assert_eq!(map.to_fine(&m, &f, &Point::Edge(0, qi(2))), Point::Vertex(2));
        assert_eq!(map.to_fine(&m, &f, &Point::Edge(0, qi(4))), Point::Edge(1, qi(2)));
        assert_eq!(map.to_coarse(&f, &m, &Point::Edge(1, qi(2))), Point::Edge(0, qi(4)));
        let (same, _) = m.refine_at(&[Point::Vertex(1)]).unwrap();
        assert_eq!(same, m);
    }

    #[test]
    fn canonical_removes_leaf_and_subdivision() {
        // triangle with one side subdivided (1/2 + 1/2) plus a leaf of length 5, and a chord
        let m = MetricGraph::from_edges(
            5,
            &[(0, 3, 1, 2), (3, 1, 1, 2), (1, 2, 1, 1), (2, 0, 1, 1), (2, 4, 5, 1), (0, 1, 2, 1)],
        )
        .unwrap();
        let c = m.canonical_model().unwrap();
        assert_eq!(c.model.vertex_count(), 2);
        assert_eq!(c.model.edge_count(), 3);
        let mut ls: Vec<Q> = c.model.lengths().to_vec();
        ls.sort();
        assert_eq!(ls, vec![qi(1), qi(2), qi(2)]);
        assert_eq!(c.map.fine_vertex_image[4], c.map.fine_vertex_image[2]);
        assert!(MetricGraph::unit(named::cycle(4)).canonical_model().is_err());
    }

    #[test]
    fn loopless_midpoints() {
        let m = MetricGraph::from_edges(2, &[(0, 0, 3, 1), (0, 1, 1, 1), (0, 1, 1, 1), (0, 1, 1, 1)]).unwrap();
        let lc = m.canonical_loopless_model().unwrap();
        assert_eq!(lc.loopless.vertex_count(), 3);
        assert!((0..lc.loopless.edge_count()).all(|e| !lc.loopless.graph().is_loop(e)));
        assert_eq!(lc.loopless.length(0), &q(3, 2));
        assert_eq!(lc.loopless.length(1), &q(3, 2));
        let pts = lc.vertices_on_input(&m);
        assert!(pts.contains(&Point::Edge(0, q(3, 2))));
    }

    #[test]
    fn tree_attachment() {
        let m = theta(1, 1, 1);
        let (t, map) = m.add_leaf(&Point::Edge(0, q(1, 2)), q(1, 2)).unwrap();
        assert_eq!(t.genus(), m.genus());
        assert_eq!(t.vertex_count(), 4);
        let c1 = m.canonical_model().unwrap().model;
        let c2 = t.canonical_model().unwrap().model;
        assert_eq!(c1.graph(), c2.graph());
        let leaf_end = t.vertex_count() - 1;
        assert_eq!(map.fine_vertex_image[leaf_end], Point::Edge(0, q(1, 2)));
        let single = MetricGraph::new(WeightedGraph::from_parts(vec![0], vec![]), vec![]).unwrap();
        assert_eq!(m.attach_tree(&Point::Vertex(0), &single, 0).unwrap().0, m);
    }
}
