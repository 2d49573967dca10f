//! Combinatorial types of degree-3 covers of trees by 3-edge connected graphs,
//! their contractions and cones, and the maximal cells coming from ladders.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::graph::{Simplification, UnionFind, VertexFate, WeightedGraph};
use crate::iso::{isomorphic, ColoredMultigraph};
use crate::morphism::{remove_contractions, ContractionRemoval, EdgeImage, IndexedMorphism};
use crate::rational::{q, qi, Q};
use num::Zero;

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// A harmonic degree-3 morphism from a graph onto a tree whose stable model is
/// 3-edge connected. The stable graph is derived, not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigonalType {
    pub morphism: IndexedMorphism,
}

/// One equivalence class of edges: all edges over a tree edge, or a single
/// contracted edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClass {
    pub edges: Vec<usize>,
    /// Tree edge the class lies over; `None` for a contracted edge.
    pub over: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeDescriptor {
    pub classes: Vec<EdgeClass>,
    /// Rows are stable edges, columns are classes.
    pub matrix: Vec<Vec<Q>>,
    pub dimension: usize,
}

fn is_tree(t: &WeightedGraph) -> bool {
    t.is_connected() && t.edge_count() + 1 == t.vertex_count() && t.weights().iter().all(|&w| w == 0)
}

impl TrigonalType {
    pub fn new(morphism: IndexedMorphism) -> Result<Self> {
        let r = morphism.check()?;
        if !r.harmonic {
            return Err(Error::NotHarmonic);
        }
        if !r.non_degenerate || r.degree != Some(3) {
            return Err(Error::Precondition(format!(
                "morphism must be non-degenerate of degree 3 (degree {:?})",
                r.degree
            )));
        }
        if !is_tree(&morphism.target) {
            return Err(Error::Precondition("target is not a tree".into()));
        }
        let st = morphism.source.stable_model()?;
        if let Some(k) = st.graph.edge_connectivity() {
            if k < 3 {
                return Err(Error::Precondition(format!("stable graph is only {k}-edge connected")));
            }
        }
        Ok(TrigonalType { morphism })
    }

    pub fn genus(&self) -> usize {
        self.morphism.source.genus()
    }

    pub fn tree(&self) -> &WeightedGraph {
        &self.morphism.target
    }

    pub fn stable(&self) -> Simplification {
        self.morphism.source.simplify()
    }

    pub fn stable_graph(&self) -> WeightedGraph {
        self.stable().graph
    }

    pub fn classes(&self) -> Vec<EdgeClass> {
        edge_relation(self)
    }

    pub fn cone(&self) -> ConeDescriptor {
        cone_descriptor(self)
    }

    /// Every tree vertex has a vertex of the stable graph over it.
    pub fn vertex_condition(&self) -> bool {
        let st = self.stable();
        let mut hit = vec![false; self.tree().vertex_count()];
        for (v, fate) in st.vertex_fate.iter().enumerate() {
            if matches!(fate, VertexFate::Kept(_)) {
                hit[self.morphism.vertex_map[v]] = true;
            }
        }
        hit.iter().all(|&h| h)
    }

    /// Stable graph together with the classes, as a coloured graph: one node
    /// per stable vertex, stable edge and class. Class nodes are joined to the
    /// stable edges they refine with multiplicity `6/μ` per piece.
    pub fn key(&self) -> ColoredMultigraph {
        let st = self.stable();
        let g = &st.graph;
        let mut c = ColoredMultigraph::new(g.weights().iter().map(|&w| hash_of(&(0u8, w))).collect());
        let edge_node: Vec<usize> = (0..g.edge_count()).map(|_| c.add_vertex(hash_of(&1u8))).collect();
        for (s, &[a, b]) in g.all_ends().iter().enumerate() {
            c.add_edge(a, edge_node[s]);
            c.add_edge(b, edge_node[s]);
        }
        for cls in self.classes() {
            let mut weights: HashMap<usize, u32> = HashMap::new();
            for &e in &cls.edges {
                if let Some((s, _)) = st.edge_fate[e] {
                    let mu = self.morphism.index[e];
                    *weights.entry(s).or_insert(0) += if mu == 0 { 6 } else { 6 / mu };
                }
            }
            if weights.is_empty() {
                continue;
            }
            let mut mus: Vec<u32> = cls.edges.iter().map(|&e| self.morphism.index[e]).collect();
            mus.sort_unstable();
            let node = c.add_vertex(hash_of(&(2u8, cls.over.is_none(), mus)));
            let mut ws: Vec<_> = weights.into_iter().collect();
            ws.sort_unstable();
            for (s, w) in ws {
                c.add_edges(node, edge_node[s], w);
            }
        }
        c
    }

    pub fn is_isomorphic(&self, other: &TrigonalType) -> bool {
        isomorphic(&self.key(), &other.key())
    }
}

/// Classes of edges: one per tree edge, then one per contracted edge.
pub fn edge_relation(tt: &TrigonalType) -> Vec<EdgeClass> {
    EdgeClass::partition(&tt.morphism)
}

impl EdgeClass {
    /// Classes of any morphism: edges over each target edge, then every
    /// contracted edge on its own.
    pub fn partition(f: &IndexedMorphism) -> Vec<EdgeClass> {
        let mut out: Vec<EdgeClass> = (0..f.target.edge_count())
            .map(|t| EdgeClass {
                edges: f.edges_over(t),
                over: Some(t),
            })
            .collect();
        out.extend(f.contracted_edges().into_iter().map(|e| EdgeClass {
            edges: vec![e],
            over: None,
        }));
        out
    }
}

fn rank(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let sub = &factor * &m[r][j];
                    m[i][j] -= sub;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Linear map from one length per class to the lengths of the stable edges.
pub fn cone_descriptor(tt: &TrigonalType) -> ConeDescriptor {
    let st = tt.stable();
    let classes = edge_relation(tt);
    let mut matrix = vec![vec![qi(0); classes.len()]; st.graph.edge_count()];
    for (c, cls) in classes.iter().enumerate() {
        for &e in &cls.edges {
            if let Some((s, _)) = st.edge_fate[e] {
                let mu = tt.morphism.index[e] as i64;
                matrix[s][c] += if mu == 0 { qi(1) } else { q(1, mu) };
            }
        }
    }
    let dimension = rank(matrix.clone());
    ConeDescriptor {
        classes,
        matrix,
        dimension,
    }
}

struct Contracted {
    tt: TrigonalType,
    /// Old edge to the edges it became; empty when contracted.
    edge_image: Vec<Vec<usize>>,
}

fn contract_class(tt: &TrigonalType, cls: &EdgeClass) -> Result<Contracted> {
    let f = &tt.morphism;
    let nt = f.target.vertex_count();
    let (tree, tvmap, temap): (WeightedGraph, Vec<usize>, Vec<Option<usize>>) = match cls.over {
        Some(t) => {
            let c = f.target.contract_edges(&[t])?;
            (c.graph, c.vertex_map, c.edge_map)
        }
        None => (f.target.clone(), (0..nt).collect(), (0..f.target.edge_count()).map(Some).collect()),
    };
    let con = f.source.contract_edges(&cls.edges)?;
    let n = con.graph.vertex_count();
    let mut vimg = vec![0; n];
    for v in 0..f.source.vertex_count() {
        vimg[con.vertex_map[v]] = tvmap[f.vertex_map[v]];
    }
    let mut new_loops = Vec::new();
    let mut edge_map = Vec::new();
    for e in 0..f.source.edge_count() {
        let Some(e2) = con.edge_map[e] else { continue };
        let img = match f.edge_map[e] {
            EdgeImage::Vertex(v) => EdgeImage::Vertex(tvmap[v]),
            EdgeImage::Edge(t) => EdgeImage::Edge(temap[t].expect("only the contracted tree edge vanishes")),
        };
        if con.graph.is_loop(e2) && !f.source.is_loop(e) {
            if !matches!(img, EdgeImage::Vertex(_)) {
                return Err(Error::Construction(format!("edge {e} over the tree became a loop")));
            }
            new_loops.push(e);
        }
        edge_map.push(img);
    }
    let provisional = IndexedMorphism {
        source: con.graph.clone(),
        target: tree.clone(),
        vertex_map: vimg.clone(),
        edge_map: edge_map.clone(),
        index: (0..f.source.edge_count()).filter(|&e| con.edge_map[e].is_some()).map(|e| f.index[e]).collect(),
        source_lengths: None,
        target_lengths: None,
    };
    let report = provisional.check()?;
    if !report.harmonic {
        return Err(Error::NotHarmonic);
    }
    let mult: Vec<u32> = report.multiplicity.iter().map(|m| m.unwrap()).collect();

    let mut weights = con.graph.weights().to_vec();
    let mut ends = Vec::new();
    let mut emap = Vec::new();
    let mut index = Vec::new();
    let mut vertex_map = vimg;
    let mut t_weights = tree.weights().to_vec();
    let mut t_ends = tree.all_ends().to_vec();
    let mut edge_image = vec![Vec::new(); f.source.edge_count()];
    for e in 0..f.source.edge_count() {
        let Some(e2) = con.edge_map[e] else { continue };
        if !new_loops.contains(&e) {
            edge_image[e].push(ends.len());
            ends.push(con.graph.ends(e2));
            emap.push(provisional.edge_map[e2]);
            index.push(f.index[e]);
            continue;
        }
        let u = con.graph.ends(e2)[0];
        let v = vertex_map[u];
        let tip_at = match mult[u] {
            3 => u,
            2 => {
                let others: Vec<usize> = (0..n).filter(|&z| z != u && vertex_map[z] == v && mult[z] > 0).collect();
                match others.as_slice() {
                    [z] if mult[*z] == 1 => *z,
                    _ => return Err(Error::Construction(format!("no unique partner for the loop at {u}"))),
                }
            }
            m => return Err(Error::Construction(format!("loop at a vertex of multiplicity {m}"))),
        };
        let s = t_weights.len();
        t_weights.push(0);
        let te = t_ends.len();
        t_ends.push([v, s]);
        let w = weights.len();
        weights.push(0);
        vertex_map.push(s);
        let y = weights.len();
        weights.push(0);
        vertex_map.push(s);
        for pair in [[u, w], [w, u], [tip_at, y]] {
            ends.push(pair);
            emap.push(EdgeImage::Edge(te));
            index.push(1);
        }
        let k = ends.len();
        edge_image[e] = vec![k - 3, k - 2];
    }
    let morphism = IndexedMorphism {
        source: WeightedGraph::new(weights, ends)?,
        target: WeightedGraph::new(t_weights, t_ends)?,
        vertex_map,
        edge_map: emap,
        index,
        source_lengths: None,
        target_lengths: None,
    };
    let out = TrigonalType::new(morphism)?;
    if out.genus() != tt.genus() {
        return Err(Error::Construction("contraction changed the genus".into()));
    }
    Ok(Contracted { tt: out, edge_image })
}

/// Weighted contraction of a union of classes. Classes are contracted one at
/// a time; loops created along the way are split and given a leaf over a new
/// leaf of the tree.
pub fn phi_contract(tt: &TrigonalType, edges: &[usize]) -> Result<TrigonalType> {
    let m = tt.morphism.source.edge_count();
    let mut selected = vec![false; m];
    for &e in edges {
        if e >= m {
            return Err(Error::UnknownEdge(e));
        }
        selected[e] = true;
    }
    for cls in edge_relation(tt) {
        let k = cls.edges.iter().filter(|&&e| selected[e]).count();
        if k != 0 && k != cls.edges.len() {
            return Err(Error::Precondition("selection is not a union of classes".into()));
        }
    }
    let mut cur = tt.clone();
    // current ids of the still-pending selected edges
    let mut pending: Vec<usize> = (0..m).filter(|&e| selected[e]).collect();
    while let Some(&first) = pending.first() {
        let cls = edge_relation(&cur)
            .into_iter()
            .find(|c| c.edges.contains(&first))
            .expect("every edge lies in a class");
        let step = contract_class(&cur, &cls)?;
        pending = pending
            .iter()
            .filter(|e| !cls.edges.contains(e))
            .flat_map(|&e| step.edge_image[e].clone())
            .collect();
        // a split loop drags the tip leaf of its class along
        let classes = edge_relation(&step.tt);
        let mut next = Vec::new();
        for c in classes {
            if c.edges.iter().any(|e| pending.contains(e)) {
                next.extend(c.edges);
            }
        }
        next.sort_unstable();
        next.dedup();
        pending = next;
        cur = step.tt;
    }
    Ok(cur)
}

/// Contraction of the single class with the given position in [`edge_relation`].
pub fn phi_contract_class(tt: &TrigonalType, class: usize) -> Result<TrigonalType> {
    let classes = edge_relation(tt);
    let cls = classes.get(class).ok_or_else(|| Error::Precondition(format!("no class {class}")))?;
    Ok(contract_class(tt, cls)?.tt)
}

/// Trees on `n` vertices with every valence at most `max_valence`, up to
/// isomorphism.
pub fn enumerate_trees(n: usize, max_valence: usize) -> Vec<WeightedGraph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![WeightedGraph::from_edges(1, &[]).unwrap()];
    for k in 1..n {
        let mut next: Vec<WeightedGraph> = Vec::new();
        let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for t in &level {
            for v in 0..k {
                if t.valence(v) >= max_valence {
                    continue;
                }
                let mut ends: Vec<(usize, usize)> = t.all_ends().iter().map(|&[a, b]| (a, b)).collect();
                ends.push((v, k));
                let cand = WeightedGraph::from_edges(k + 1, &ends).unwrap();
                let colored = cand.colored();
                let slot = buckets.entry(colored.invariant()).or_default();
                if slot.iter().any(|&i| next[i].is_isomorphic(&cand)) {
                    continue;
                }
                slot.push(next.len());
                next.push(cand);
            }
        }
        level = next;
    }
    level
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LadderChoice {
    /// Valence 3: nothing attached.
    Free,
    /// Valence 2: copies joined by the vertical edge.
    Pair(usize, usize),
    /// Valence 1: the copy joined to both others.
    Middle(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeLadder {
    pub tree: WeightedGraph,
    pub choices: Vec<LadderChoice>,
    pub ttype: TrigonalType,
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Ladder on three copies of `tree`: vertex `j` of copy `c` is `c * n + j`.
pub fn ladder(tree: &WeightedGraph, choices: &[LadderChoice]) -> Result<ThreeLadder> {
    let n = tree.vertex_count();
    if choices.len() != n {
        return Err(Error::Precondition("one choice per tree vertex".into()));
    }
    let mut ends = Vec::new();
    let mut edge_map = Vec::new();
    let mut index = Vec::new();
    for (t, &[a, b]) in tree.all_ends().iter().enumerate() {
        for c in 0..3 {
            ends.push((c * n + a, c * n + b));
            edge_map.push(EdgeImage::Edge(t));
            index.push(1);
        }
    }
    for (j, ch) in choices.iter().enumerate() {
        let ok = match (tree.valence(j), *ch) {
            (3, LadderChoice::Free) => true,
            (2, LadderChoice::Pair(a, b)) if a < b && b < 3 => {
                ends.push((a * n + j, b * n + j));
                edge_map.push(EdgeImage::Vertex(j));
                index.push(0);
                true
            }
            (1, LadderChoice::Middle(c)) if c < 3 => {
                for o in (0..3).filter(|&o| o != c) {
                    ends.push((c * n + j, o * n + j));
                    edge_map.push(EdgeImage::Vertex(j));
                    index.push(0);
                }
                true
            }
            _ => false,
        };
        if !ok {
            return Err(Error::Precondition(format!("choice {ch:?} does not fit vertex {j}")));
        }
    }
    let source = WeightedGraph::from_edges(3 * n, &ends)?;
    let morphism = IndexedMorphism {
        source,
        target: tree.clone(),
        vertex_map: (0..3 * n).map(|v| v % n).collect(),
        edge_map,
        index,
        source_lengths: None,
        target_lengths: None,
    };
    Ok(ThreeLadder {
        tree: tree.clone(),
        choices: choices.to_vec(),
        ttype: TrigonalType::new(morphism)?,
    })
}

fn relabel(ch: LadderChoice, p: &[usize; 3]) -> LadderChoice {
    match ch {
        LadderChoice::Free => LadderChoice::Free,
        LadderChoice::Pair(a, b) => {
            let (x, y) = (p[a], p[b]);
            LadderChoice::Pair(x.min(y), x.max(y))
        }
        LadderChoice::Middle(c) => LadderChoice::Middle(p[c]),
    }
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Every choice assignment allowed on `tree`, including the path rule, with
/// relabellings of the three copies identified.
pub fn ladder_choices(tree: &WeightedGraph) -> Result<Vec<Vec<LadderChoice>>> {
    let n = tree.vertex_count();
    if n < 2 {
        return Err(Error::Precondition("tree needs at least one edge".into()));
    }
    let mut options: Vec<Vec<LadderChoice>> = Vec::new();
    for v in 0..n {
        options.push(match tree.valence(v) {
            1 => (0..3).map(LadderChoice::Middle).collect(),
            2 => PAIRS.iter().map(|&(a, b)| LadderChoice::Pair(a, b)).collect(),
            3 => vec![LadderChoice::Free],
            k => return Err(Error::Precondition(format!("vertex {v} has valence {k}"))),
        });
    }
    let is_path = (0..n).all(|v| tree.valence(v) <= 2);
    let inner: Vec<usize> = (0..n).filter(|&v| tree.valence(v) == 2).collect();
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        let choice: Vec<LadderChoice> = (0..n).map(|v| options[v][cur[v]]).collect();
        let same_pair = inner.len() >= 2 && inner.iter().all(|&v| choice[v] == choice[inner[0]]);
        let canonical = PERMS.iter().all(|p| {
            let r: Vec<LadderChoice> = choice.iter().map(|&c| relabel(c, p)).collect();
            choice <= r
        });
        if canonical && !(is_path && same_pair) {
            out.push(choice);
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            cur[i] += 1;
            if cur[i] < options[i].len() {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Keeps the first of every isomorphism class under `key`.
fn dedup_by_key<T>(items: Vec<T>, key: impl Fn(&T) -> ColoredMultigraph) -> Vec<T> {
    let mut kept: Vec<(T, ColoredMultigraph)> = Vec::new();
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for it in items {
        let k = key(&it);
        let slot = buckets.entry(k.invariant()).or_default();
        if slot.iter().any(|&i| isomorphic(&kept[i].1, &k)) {
            continue;
        }
        slot.push(kept.len());
        kept.push((it, k));
    }
    kept.into_iter().map(|(t, _)| t).collect()
}

/// All ladders over `tree` without identification beyond copy relabelling.
pub fn all_ladders(tree: &WeightedGraph) -> Result<Vec<ThreeLadder>> {
    ladder_choices(tree)?.iter().map(|c| ladder(tree, c)).collect()
}

/// Ladders over `tree` up to isomorphism of the stable graph with its classes.
pub fn build_3_ladders(tree: &WeightedGraph) -> Result<Vec<ThreeLadder>> {
    Ok(dedup_by_key(all_ladders(tree)?, |l| l.ttype.key()))
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub graph: WeightedGraph,
    /// Non-isomorphic types on this graph, each with its cone dimension.
    pub types: Vec<(TrigonalType, usize)>,
}

impl Cell {
    pub fn dimension(&self) -> usize {
        self.types.iter().map(|(_, d)| *d).max().unwrap_or(0)
    }
}

/// Stable graphs of all ladders over trees with `g` vertices, grouped by
/// isomorphism. Trees are handled on up to `jobs` threads.
pub fn maximal_cells_with_jobs(g: usize, jobs: usize) -> Result<Vec<Cell>> {
    if g < 3 {
        return Err(Error::GenusTooSmall(g));
    }
    let trees = enumerate_trees(g, 3);
    let jobs = jobs.max(1).min(trees.len());
    let chunk = trees.len().div_ceil(jobs);
    let per_tree: Vec<Result<Vec<ThreeLadder>>> = std::thread::scope(|s| {
        let handles: Vec<_> = trees
            .chunks(chunk)
            .map(|ts| s.spawn(move || ts.iter().map(build_3_ladders).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut types = Vec::new();
    for r in per_tree {
        types.extend(r?.into_iter().map(|l| l.ttype));
    }
    let mut cells: Vec<Cell> = Vec::new();
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for tt in types {
        let graph = tt.stable_graph();
        let dim = tt.cone().dimension;
        let slot = buckets.entry(graph.colored().invariant()).or_default();
        match slot.iter().copied().find(|&i| cells[i].graph.is_isomorphic(&graph)) {
            Some(i) => {
                if !cells[i].types.iter().any(|(t, _)| t.is_isomorphic(&tt)) {
                    cells[i].types.push((tt, dim));
                }
            }
            None => {
                slot.push(cells.len());
                cells.push(Cell {
                    graph,
                    types: vec![(tt, dim)],
                });
            }
        }
    }
    Ok(cells)
}

pub fn maximal_cells(g: usize) -> Result<Vec<Cell>> {
    maximal_cells_with_jobs(g, 1)
}

#[derive(Debug, Clone)]
pub struct Adjacency {
    /// Per cell, the facet types found (deduplicated within the cell).
    pub facets: Vec<Vec<TrigonalType>>,
    /// Pairs of cells sharing an isomorphic facet type.
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
}

/// Facets are single-class contractions whose cone has one dimension less.
pub fn facets_and_adjacency(cells: &[Cell]) -> Result<Adjacency> {
    let mut facets: Vec<Vec<TrigonalType>> = vec![Vec::new(); cells.len()];
    // facet class representative and the cells containing it
    let mut reps: Vec<(ColoredMultigraph, Vec<usize>)> = Vec::new();
    let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    for (i, cell) in cells.iter().enumerate() {
        for (tt, dim) in &cell.types {
            for c in 0..edge_relation(tt).len() {
                let Ok(f) = phi_contract_class(tt, c) else { continue };
                if f.cone().dimension + 1 != *dim {
                    continue;
                }
                let k = f.key();
                let slot = buckets.entry(k.invariant()).or_default();
                match slot.iter().copied().find(|&r| isomorphic(&reps[r].0, &k)) {
                    Some(r) => {
                        if !reps[r].1.contains(&i) {
                            reps[r].1.push(i);
                            facets[i].push(f);
                        }
                    }
                    None => {
                        slot.push(reps.len());
                        reps.push((k, vec![i]));
                        facets[i].push(f);
                    }
                }
            }
        }
    }
    let mut uf = UnionFind::new(cells.len());
    let mut edges = Vec::new();
    for (_, owners) in &reps {
        for a in 0..owners.len() {
            for b in a + 1..owners.len() {
                let (x, y) = (owners[a].min(owners[b]), owners[a].max(owners[b]));
                edges.push((x, y));
                uf.union(x, y);
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let connected = (0..cells.len()).all(|i| uf.find(i) == uf.find(0));
    Ok(Adjacency {
        facets,
        edges,
        connected,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    /// Local Riemann–Hurwitz defect per vertex of the contraction-free source.
    pub defects: Vec<i64>,
    /// Vertices carrying two simple ramification legs (midpoints of former
    /// contracted edges); each such leg lowers the defect by one.
    pub legs: Vec<(usize, u32)>,
    pub balanced: bool,
}

/// Local Riemann–Hurwitz balance of a contraction-free cover, with two legs
/// of index 2 at every midpoint of a removed contracted edge.
pub fn admissibility_report(removal: &ContractionRemoval) -> Result<AdmissibilityReport> {
    let f = &removal.morphism;
    if !f.contracted_edges().is_empty() {
        return Err(Error::Precondition("cover still contracts edges".into()));
    }
    let r = f.check()?;
    if !r.harmonic {
        return Ok(AdmissibilityReport {
            defects: Vec::new(),
            legs: Vec::new(),
            balanced: false,
        });
    }
    let defects = f.riemann_hurwitz_defects()?;
    let legs: Vec<(usize, u32)> = removal.midpoints.iter().map(|&(_, w, _)| (w, 2)).collect();
    let mut residual = defects.clone();
    for &(w, k) in &legs {
        residual[w] -= k as i64;
    }
    let balanced = residual.iter().all(|&d| d == 0);
    Ok(AdmissibilityReport {
        defects,
        legs,
        balanced,
    })
}

/// Removes the contracted edges of the type's morphism and checks the local
/// Riemann–Hurwitz balance at every vertex.
pub fn certify_admissible(tt: &TrigonalType) -> Result<bool> {
    let removal = remove_contractions(&tt.morphism)?;
    Ok(admissibility_report(&removal)?.balanced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::named;

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (2..=7).map(|n| enumerate_trees(n, 3).len()).collect();
        assert_eq!(counts[..4], [1, 1, 2, 2]);
        assert_eq!(enumerate_trees(5, 4).len(), 3);
    }

    #[test]
    fn ladder_counts_and_dimension() {
        for n in 2..=5 {
            for t in enumerate_trees(n, 3) {
                for l in build_3_ladders(&t).unwrap() {
                    let s = &l.ttype.morphism.source;
                    assert_eq!((s.vertex_count(), s.edge_count(), s.genus()), (3 * n, 4 * n - 1, n));
                    assert_eq!(l.ttype.classes().len(), 2 * n + 1);
                    let want = match n {
                        2 => 3,
                        3 => 6,
                        _ => 2 * n + 1,
                    };
                    assert_eq!(l.ttype.cone().dimension, want, "{:?}", l.choices);
                    assert!(l.ttype.vertex_condition());
                }
            }
        }
    }

    #[test]
    fn path_rule() {
        let p4 = named::path(4);
        for c in ladder_choices(&p4).unwrap() {
            assert_ne!(c[1], c[2]);
        }
        // a single inner vertex cannot avoid it
        assert_eq!(ladder_choices(&named::path(3)).unwrap().len(), 5);
    }

    #[test]
    fn contracting_nothing_is_identity() {
        let l = &build_3_ladders(&named::path(3)).unwrap()[0];
        assert_eq!(phi_contract(&l.ttype, &[]).unwrap(), l.ttype);
        assert!(phi_contract(&l.ttype, &[0]).is_err());
    }

    #[test]
    fn two_contraction_examples() {
        let tt = TrigonalType::new(fixtures::three_fiber_type()).unwrap();
        assert_eq!(tt.genus(), 4);
        assert_eq!(tt.classes().len(), 8);
        let st = tt.stable_graph();
        assert_eq!((st.vertex_count(), st.edge_count()), (6, 9));
        // tree edge between the first two fibers
        let top = phi_contract_class(&tt, 0).unwrap();
        assert_eq!(top.morphism.source.vertex_count(), 6);
        assert_eq!(top.morphism.source.edge_count(), 9);
        assert_eq!(top.tree().edge_count(), 1);
        // a vertical edge in the last fiber
        let dc = tt.classes().iter().position(|c| c.edges == [9]).unwrap();
        let bottom = phi_contract_class(&tt, dc).unwrap();
        assert!(bottom.tree().is_isomorphic(tt.tree()));
        assert_eq!(bottom.genus(), 4);
    }

    #[test]
    fn spawned_loop_gets_a_leaf() {
        let tt = TrigonalType::new(fixtures::loop_spawning_type()).unwrap();
        let out = phi_contract(&tt, &[0]).unwrap();
        assert_eq!(out.genus(), tt.genus());
        assert_eq!(out.tree().vertex_count(), 3);
        assert_eq!(out.morphism.source.edge_count(), 6);
        assert!(!out.vertex_condition());
        assert!(out.morphism.source.weights().iter().all(|&w| w == 0));
        // contracting both parallel edges raises a weight instead
        let both = phi_contract(&tt, &[0, 1]).unwrap();
        assert_eq!(both.morphism.source.weights().iter().sum::<u32>(), 1);
    }

    #[test]
    fn certificates() {
        for t in enumerate_trees(4, 3) {
            for l in build_3_ladders(&t).unwrap() {
                assert!(certify_admissible(&l.ttype).unwrap());
            }
        }
        let l = &build_3_ladders(&named::path(3)).unwrap()[0];
        let mut removal = remove_contractions(&l.ttype.morphism).unwrap();
        removal.morphism.index[0] = 2;
        assert!(!admissibility_report(&removal).unwrap().balanced);
    }

    #[test]
    fn genus_three_cells() {
        let cells = maximal_cells(3).unwrap();
        assert!(cells.iter().all(|c| c.dimension() == 6));
        assert!(facets_and_adjacency(&cells).unwrap().connected);
    }
}
