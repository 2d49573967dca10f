//! Weighted multigraphs with loops and parallel edges.
//!
//! Vertices and edges are dense indices. Every edge stores an ordered pair of
//! ends; the first end is the reference point for offsets in metric graphs.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::iso::ColoredMultigraph;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedGraph {
    weights: Vec<u32>,
    ends: Vec<[usize; 2]>,
}

/// Result of a weighted contraction.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: WeightedGraph,
    pub vertex_map: Vec<usize>,
    /// `None` for contracted edges.
    pub edge_map: Vec<Option<usize>>,
}

/// Where an old vertex went after leaf removal and valence-2 suppression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexFate {
    Kept(usize),
    /// Suppressed; sits on the new edge after `after` pieces of its chain.
    Interior { edge: usize, after: usize },
    /// Removed with a tree; retracts onto this old vertex (never itself removed).
    Retracts(usize),
}

/// Bookkeeping for [`WeightedGraph::simplify`].
#[derive(Debug, Clone)]
pub struct Simplification {
    pub graph: WeightedGraph,
    /// Per new edge: old edges from its first end to its second end, with
    /// `true` when the old edge is traversed from its own first end.
    pub chains: Vec<Vec<(usize, bool)>>,
    pub vertex_fate: Vec<VertexFate>,
    /// Per old edge: `(new edge, position in chain)`, `None` if removed.
    pub edge_fate: Vec<Option<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCut {
    pub edges: Vec<usize>,
    /// `side[v]` is true for vertices in the component of vertex 0.
    pub side: Vec<bool>,
}

impl WeightedGraph {
    pub fn new(weights: Vec<u32>, ends: Vec<[usize; 2]>) -> Result<Self> {
        let g = WeightedGraph { weights, ends };
        for (e, [a, b]) in g.ends.iter().enumerate() {
            if *a >= g.weights.len() || *b >= g.weights.len() {
                return Err(Error::InvalidGraph(format!("edge {e} has an unknown end")));
            }
        }
        if g.weights.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Unweighted graph from an edge list.
    pub fn from_edges(n: usize, ends: &[(usize, usize)]) -> Result<Self> {
        Self::new(vec![0; n], ends.iter().map(|&(a, b)| [a, b]).collect())
    }

    pub(crate) fn from_parts(weights: Vec<u32>, ends: Vec<[usize; 2]>) -> Self {
        WeightedGraph { weights, ends }
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn ends(&self, e: usize) -> [usize; 2] {
        self.ends[e]
    }

    pub fn all_ends(&self) -> &[[usize; 2]] {
        &self.ends
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.ends[e][0] == self.ends[e][1]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Per vertex, the incident `(edge, other end)` pairs. A loop shows up twice.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.vertex_count()];
        for (e, &[a, b]) in self.ends.iter().enumerate() {
            inc[a].push((e, b));
            inc[b].push((e, a));
        }
        inc
    }

    /// Valence with loops counted twice.
    pub fn valence(&self, v: usize) -> usize {
        self.ends
            .iter()
            .map(|&[a, b]| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn first_betti(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn genus(&self) -> usize {
        self.weights.iter().map(|&w| w as usize).sum::<usize>() + self.first_betti()
    }

    pub fn is_connected(&self) -> bool {
        self.reachable_without(&[]).iter().all(|&r| r)
    }

    pub(crate) fn reachable_without(&self, removed: &[usize]) -> Vec<bool> {
        let inc = self.incidence();
        let mut seen = vec![false; self.vertex_count()];
        if seen.is_empty() {
            return seen;
        }
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(e, u) in &inc[v] {
                if !seen[u] && !removed.contains(&e) {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// True when deleting `removed` leaves the graph disconnected.
    pub fn disconnected_by(&self, removed: &[usize]) -> bool {
        !self.reachable_without(removed).iter().all(|&r| r)
    }

    pub fn contract_edges(&self, s: &[usize]) -> Result<Contraction> {
        for &e in s {
            if e >= self.edge_count() {
                return Err(Error::UnknownEdge(e));
            }
        }
        let mut uf = UnionFind::new(self.vertex_count());
        let mut in_s = vec![false; self.edge_count()];
        for &e in s {
            in_s[e] = true;
            let [a, b] = self.ends[e];
            uf.union(a, b);
        }
        let mut root_id = vec![usize::MAX; self.vertex_count()];
        let mut vertex_map = vec![0; self.vertex_count()];
        let mut next = 0;
        for v in 0..self.vertex_count() {
            let r = uf.find(v);
            if root_id[r] == usize::MAX {
                root_id[r] = next;
                next += 1;
            }
            vertex_map[v] = root_id[r];
        }
        // class weight = sum of weights + first Betti number of the contracted part
        let mut weight = vec![0i64; next];
        let mut members = vec![0i64; next];
        for v in 0..self.vertex_count() {
            weight[vertex_map[v]] += self.weights[v] as i64;
            members[vertex_map[v]] += 1;
        }
        let mut inner = vec![0i64; next];
        for (e, &[a, _]) in self.ends.iter().enumerate() {
            if in_s[e] {
                inner[vertex_map[a]] += 1;
            }
        }
        let weights = (0..next)
            .map(|c| (weight[c] + inner[c] - members[c] + 1) as u32)
            .collect();
        let mut ends = Vec::new();
        let mut edge_map = vec![None; self.edge_count()];
        for (e, &[a, b]) in self.ends.iter().enumerate() {
            if !in_s[e] {
                edge_map[e] = Some(ends.len());
                ends.push([vertex_map[a], vertex_map[b]]);
            }
        }
        Ok(Contraction {
            graph: WeightedGraph::from_parts(weights, ends),
            vertex_map,
            edge_map,
        })
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertex_count()).all(|v| self.weights[v] > 0 || self.valence(v) >= 3)
    }

    /// Stable model: remove weight-0 leaves, suppress weight-0 valence-2 vertices.
    pub fn stable_model(&self) -> Result<Simplification> {
        let g = self.genus();
        if g < 2 {
            return Err(Error::GenusTooSmall(g));
        }
        Ok(self.simplify())
    }

    /// Loopless model: a new weight-0 vertex in the middle of every loop.
    /// Returns the graph and, per old edge, its new pieces in order.
    pub fn loopless_model(&self) -> (WeightedGraph, Vec<Vec<usize>>) {
        let mut weights = self.weights.clone();
        let mut ends = Vec::new();
        let mut pieces = Vec::new();
        for &[a, b] in &self.ends {
            if a == b {
                let m = weights.len();
                weights.push(0);
                pieces.push(vec![ends.len(), ends.len() + 1]);
                ends.push([a, m]);
                ends.push([m, a]);
            } else {
                pieces.push(vec![ends.len()]);
                ends.push([a, b]);
            }
        }
        (WeightedGraph::from_parts(weights, ends), pieces)
    }

    /// Leaf removal and valence-2 suppression with full bookkeeping. No genus
    /// precondition; a graph of genus 1 whose core is a single cycle keeps one
    /// vertex on that cycle.
    pub fn simplify(&self) -> Simplification {
        struct Chain {
            a: usize,
            b: usize,
            pieces: Vec<(usize, bool)>,
        }
        let n = self.vertex_count();
        let mut chains: Vec<Option<Chain>> = self
            .ends
            .iter()
            .enumerate()
            .map(|(e, &[a, b])| {
                Some(Chain {
                    a,
                    b,
                    pieces: vec![(e, true)],
                })
            })
            .collect();
        let mut alive = vec![true; n];
        let mut retract: Vec<Option<usize>> = vec![None; n];
        let mut alive_count = n;
        loop {
            let mut changed = false;
            for v in 0..n {
                if !alive[v] || self.weights[v] > 0 || alive_count == 1 {
                    continue;
                }
                let mut ends_at_v: Vec<usize> = Vec::new();
                let mut has_loop = false;
                for (c, ch) in chains.iter().enumerate() {
                    if let Some(ch) = ch {
                        if ch.a == v {
                            ends_at_v.push(c);
                        }
                        if ch.b == v {
                            ends_at_v.push(c);
                        }
                        if ch.a == v && ch.b == v {
                            has_loop = true;
                        }
                    }
                }
                if ends_at_v.len() == 1 {
                    let c = ends_at_v[0];
                    let ch = chains[c].take().unwrap();
                    let other = if ch.a == v { ch.b } else { ch.a };
                    alive[v] = false;
                    alive_count -= 1;
                    retract[v] = Some(other);
                    changed = true;
                } else if ends_at_v.len() == 2 && !has_loop {
                    let (c1, c2) = (ends_at_v[0].min(ends_at_v[1]), ends_at_v[0].max(ends_at_v[1]));
                    let ch1 = chains[c1].take().unwrap();
                    let ch2 = chains[c2].take().unwrap();
                    // orient ch2 so that it leaves v
                    let (far2, pieces2_out) = if ch2.a == v {
                        (ch2.b, ch2.pieces)
                    } else {
                        (ch2.a, reverse_chain(ch2.pieces))
                    };
                    let merged = if ch1.b == v {
                        let mut p = ch1.pieces;
                        p.extend(pieces2_out);
                        Chain {
                            a: ch1.a,
                            b: far2,
                            pieces: p,
                        }
                    } else {
                        let mut p = reverse_chain(pieces2_out);
                        p.extend(ch1.pieces);
                        Chain {
                            a: far2,
                            b: ch1.b,
                            pieces: p,
                        }
                    };
                    chains[c1] = Some(merged);
                    alive[v] = false;
                    alive_count -= 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut new_id = vec![usize::MAX; n];
        let mut weights = Vec::new();
        for v in 0..n {
            if alive[v] {
                new_id[v] = weights.len();
                weights.push(self.weights[v]);
            }
        }
        let mut ends = Vec::new();
        let mut out_chains = Vec::new();
        let mut edge_fate = vec![None; self.edge_count()];
        let mut vertex_fate: Vec<VertexFate> = (0..n)
            .map(|v| {
                if alive[v] {
                    VertexFate::Kept(new_id[v])
                } else {
                    VertexFate::Retracts(usize::MAX)
                }
            })
            .collect();
        for ch in chains.into_iter().flatten() {
            let id = ends.len();
            ends.push([new_id[ch.a], new_id[ch.b]]);
            let mut at = ch.a;
            for (k, &(e, fwd)) in ch.pieces.iter().enumerate() {
                edge_fate[e] = Some((id, k));
                let [s, t] = self.ends[e];
                let next = if fwd { t } else { s };
                debug_assert_eq!(if fwd { s } else { t }, at);
                if k + 1 < ch.pieces.len() {
                    vertex_fate[next] = VertexFate::Interior { edge: id, after: k + 1 };
                }
                at = next;
            }
            out_chains.push(ch.pieces);
        }
        for v in 0..n {
            if let Some(mut r) = retract[v] {
                while let Some(r2) = retract[r] {
                    r = r2;
                }
                vertex_fate[v] = VertexFate::Retracts(r);
            }
        }
        Simplification {
            graph: WeightedGraph::from_parts(weights, ends),
            chains: out_chains,
            vertex_fate,
            edge_fate,
        }
    }

    /// Minimum number of edges whose removal disconnects the graph. `None` for a
    /// single vertex.
    pub fn edge_connectivity(&self) -> Option<usize> {
        let n = self.vertex_count();
        if n < 2 {
            return None;
        }
        let mut cap = vec![vec![0i32; n]; n];
        for &[a, b] in &self.ends {
            if a != b {
                cap[a][b] += 1;
                cap[b][a] += 1;
            }
        }
        (1..n).map(|t| max_flow(&cap, 0, t)).min()
    }

    /// Every set of three non-loop edges that disconnects the graph while none of
    /// its proper subsets does.
    pub fn three_edge_cuts(&self) -> Vec<EdgeCut> {
        let candidates: Vec<usize> = (0..self.edge_count()).filter(|&e| !self.is_loop(e)).collect();
        let mut out = Vec::new();
        let k = candidates.len();
        for i in 0..k {
            for j in i + 1..k {
                for l in j + 1..k {
                    let t = [candidates[i], candidates[j], candidates[l]];
                    let reach = self.reachable_without(&t);
                    if reach.iter().all(|&r| r) {
                        continue;
                    }
                    let minimal = [
                        vec![t[0]],
                        vec![t[1]],
                        vec![t[2]],
                        vec![t[0], t[1]],
                        vec![t[0], t[2]],
                        vec![t[1], t[2]],
                    ]
                    .iter()
                    .all(|s| !self.disconnected_by(s));
                    if minimal {
                        out.push(EdgeCut {
                            edges: t.to_vec(),
                            side: reach,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn colored(&self) -> ColoredMultigraph {
        let mut c = ColoredMultigraph::new(self.weights.iter().map(|&w| w as u64).collect());
        for &[a, b] in &self.ends {
            c.add_edge(a, b);
        }
        c
    }

    pub fn is_isomorphic(&self, other: &WeightedGraph) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.edge_count() == other.edge_count()
            && crate::iso::isomorphic(&self.colored(), &other.colored())
    }
}

pub fn are_isomorphic(g1: &WeightedGraph, g2: &WeightedGraph) -> bool {
    g1.is_isomorphic(g2)
}

fn reverse_chain(p: Vec<(usize, bool)>) -> Vec<(usize, bool)> {
    p.into_iter().rev().map(|(e, f)| (e, !f)).collect()
}

fn max_flow(cap: &[Vec<i32>], s: usize, t: usize) -> usize {
    let n = cap.len();
    let mut res = cap.to_vec();
    let mut flow = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for u in 0..n {
                if prev[u] == usize::MAX && res[v][u] > 0 {
                    prev[u] = v;
                    queue.push_back(u);
                }
            }
        }
        if prev[t] == usize::MAX {
            return flow;
        }
        let mut v = t;
        while v != s {
            let p = prev[v];
            res[p][v] -= 1;
            res[v][p] += 1;
            v = p;
        }
        flow += 1;
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Small named graphs used throughout tests and examples.
pub mod named {
    use super::WeightedGraph;

    /// Two vertices joined by `k` parallel edges.
    pub fn banana(k: usize) -> WeightedGraph {
        WeightedGraph::from_edges(2, &vec![(0, 1); k]).unwrap()
    }

    pub fn complete(n: usize) -> WeightedGraph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        WeightedGraph::from_edges(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> WeightedGraph {
        if n == 1 {
            return WeightedGraph::from_edges(1, &[(0, 0)]).unwrap();
        }
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::from_edges(n, &e).unwrap()
    }

    pub fn path(n: usize) -> WeightedGraph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        WeightedGraph::from_edges(n, &e).unwrap()
    }

    /// Triangular prism: triangles 0-2-4 and 1-3-5, rungs 0-1, 2-3, 4-5.
    pub fn prism() -> WeightedGraph {
        WeightedGraph::from_edges(
            6,
            &[(0, 1), (2, 3), (4, 5), (0, 2), (2, 4), (0, 4), (1, 3), (3, 5), (1, 5)],
        )
        .unwrap()
    }

    pub fn petersen() -> WeightedGraph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        WeightedGraph::from_edges(10, &e).unwrap()
    }
}
