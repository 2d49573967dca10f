//! Degree-3 harmonic covers of metric trees built from a degree-3 divisor of
//! rank 1 on a 3-edge connected metric graph.

use std::collections::BTreeMap;

use crate::divisor::{rank_at_least, reduce, smooth_common_edge, Divisor};
use crate::error::{Error, Result};
use crate::graph::{EdgeCut, WeightedGraph};
use crate::metric::{model_vertex_points, MetricGraph, Point, RefinementMap};
use crate::morphism::{pullback, EdgeImage, IndexedMorphism};
use crate::rational::{qi, Q};

/// An equivalent divisor `x + x1 + x2` with `x` a vertex of the canonical
/// model and `x1`, `x2` not interior to one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleRep {
    /// Canonical vertices whose representative this is.
    pub bases: Vec<usize>,
    pub divisor: Divisor,
}

/// Ways of producing the representative for a base vertex. Different
/// strategies must agree exactly on 3-edge connected graphs.
pub trait RepStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn rep(&self, c: &MetricGraph, d: &Divisor, x: usize) -> Result<Divisor>;
}

/// Reduce at `x`, take one chip off `x`, separate the rest.
pub struct ReduceThenSmooth;

/// Reduce at `x`, take one chip off `x`, move the rest to another vertex's
/// reduced form before separating.
pub struct RebaseThenSmooth;

fn residue_at(c: &MetricGraph, d: &Divisor, x: usize) -> Result<Divisor> {
    let base = Point::Vertex(x);
    let mut r = reduce(c, d, &base)?;
    if r.coeff(&base) < 1 {
        return Err(Error::Precondition("divisor has rank below 1".into()));
    }
    r.add_chips(base, -1);
    Ok(r)
}

impl RepStrategy for ReduceThenSmooth {
    fn name(&self) -> &'static str {
        "reduce-then-smooth"
    }

    fn rep(&self, c: &MetricGraph, d: &Divisor, x: usize) -> Result<Divisor> {
        let r = residue_at(c, d, x)?;
        let mut s = smooth_common_edge(c, &r)?;
        s.add_chips(Point::Vertex(x), 1);
        Ok(s)
    }
}

impl RepStrategy for RebaseThenSmooth {
    fn name(&self) -> &'static str {
        "rebase-then-smooth"
    }

    fn rep(&self, c: &MetricGraph, d: &Divisor, x: usize) -> Result<Divisor> {
        let r = residue_at(c, d, x)?;
        let other = (x + c.vertex_count() - 1) % c.vertex_count();
        let moved = reduce(c, &r, &Point::Vertex(other))?;
        let mut s = smooth_common_edge(c, &moved)?;
        s.add_chips(Point::Vertex(x), 1);
        Ok(s)
    }
}

type RepFactory = fn() -> Box<dyn RepStrategy>;

pub fn rep_strategies() -> BTreeMap<&'static str, RepFactory> {
    let mut r: BTreeMap<&'static str, RepFactory> = BTreeMap::new();
    r.insert("reduce-then-smooth", || Box::new(ReduceThenSmooth));
    r.insert("rebase-then-smooth", || Box::new(RebaseThenSmooth));
    r
}

fn check_inputs(c: &MetricGraph, d: &Divisor) -> Result<()> {
    match c.graph().edge_connectivity() {
        Some(k) if k >= 3 => {}
        _ => return Err(Error::Precondition("canonical model is not 3-edge connected".into())),
    }
    if d.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: d.degree(),
        });
    }
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    if !rank_at_least(c, d, 1)? {
        return Err(Error::Precondition("divisor has rank below 1".into()));
    }
    Ok(())
}

/// Representative for base vertex `x` of the canonical model `c`.
pub fn admissible_rep(c: &MetricGraph, d: &Divisor, x: usize) -> Result<AdmissibleRep> {
    check_inputs(c, d)?;
    Ok(AdmissibleRep {
        bases: vec![x],
        divisor: ReduceThenSmooth.rep(c, d, x)?,
    })
}

/// One representative per vertex of `c`, merged when equal. Distinct
/// representatives must have disjoint supports.
pub fn all_admissible_reps(c: &MetricGraph, d: &Divisor) -> Result<Vec<AdmissibleRep>> {
    check_inputs(c, d)?;
    reps_unchecked(c, d, &ReduceThenSmooth)
}

fn reps_unchecked(c: &MetricGraph, d: &Divisor, strategy: &dyn RepStrategy) -> Result<Vec<AdmissibleRep>> {
    let mut reps: Vec<AdmissibleRep> = Vec::new();
    for x in 0..c.vertex_count() {
        let rep = strategy.rep(c, d, x)?;
        match reps.iter_mut().find(|r| r.divisor == rep) {
            Some(r) => r.bases.push(x),
            None => reps.push(AdmissibleRep {
                bases: vec![x],
                divisor: rep,
            }),
        }
    }
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if reps[i].divisor.support().iter().any(|p| reps[j].divisor.coeff(p) != 0) {
                return Err(Error::Construction(format!(
                    "representatives for vertices {:?} and {:?} share a support point",
                    reps[i].bases, reps[j].bases
                )));
            }
        }
    }
    Ok(reps)
}

/// The refinement of `c` at all representative supports, with the index of
/// the representative owning each of its vertices.
fn support_refinement(c: &MetricGraph, reps: &[AdmissibleRep]) -> Result<(MetricGraph, RefinementMap, Vec<usize>)> {
    let pts: Vec<Point> = reps.iter().flat_map(|r| r.divisor.support()).collect();
    let (gd, map) = c.refine_at(&pts)?;
    let mut owner = Vec::with_capacity(gd.vertex_count());
    for v in 0..gd.vertex_count() {
        let loc = &map.fine_vertex_image[v];
        let i = reps.iter().position(|r| r.divisor.coeff(loc) > 0).ok_or_else(|| {
            Error::Construction(format!("vertex {v} of the refinement lies in no representative"))
        })?;
        owner.push(i);
    }
    Ok((gd, map, owner))
}

/// Edges of `gd` joining the supports of representatives `i` and `j`; `None`
/// if there are none. Errors when they are not three edges of one length
/// forming a cut.
pub fn consecutive(gd: &MetricGraph, owner: &[usize], i: usize, j: usize) -> Result<Option<EdgeCut>> {
    if i == j {
        return Err(Error::Precondition("a representative is not consecutive to itself".into()));
    }
    let edges: Vec<usize> = (0..gd.edge_count())
        .filter(|&e| {
            let [a, b] = gd.graph().ends(e);
            (owner[a] == i && owner[b] == j) || (owner[a] == j && owner[b] == i)
        })
        .collect();
    if edges.is_empty() {
        return Ok(None);
    }
    if edges.len() != 3 {
        return Err(Error::Construction(format!(
            "representatives {i} and {j} are joined by {} edges instead of 3",
            edges.len()
        )));
    }
    let l = gd.length(edges[0]);
    if edges.iter().any(|&e| gd.length(e) != l) {
        return Err(Error::Construction(format!("edges joining representatives {i} and {j} differ in length")));
    }
    let side = gd.graph().reachable_without(&edges);
    if side.iter().all(|&s| s) {
        return Err(Error::Construction(format!("edges joining representatives {i} and {j} do not disconnect")));
    }
    Ok(Some(EdgeCut { edges, side }))
}

/// A degree-3 cover of a metric tree by a refinement or modification of the
/// canonical model.
#[derive(Debug, Clone)]
pub struct TrigonalCover {
    /// Canonical model of the input.
    pub canonical: MetricGraph,
    pub source: MetricGraph,
    /// From `source` to `canonical`; added leaves retract.
    pub source_map: RefinementMap,
    pub target: MetricGraph,
    pub morphism: IndexedMorphism,
    /// Representative of each of the first `reps.len()` tree vertices, on `canonical`.
    pub reps: Vec<AdmissibleRep>,
}

/// Cover for a 3-edge connected metric graph whose canonical model has no
/// loops. `d` is given on `m`.
pub fn build_trigonal_cover(m: &MetricGraph, d: &Divisor) -> Result<TrigonalCover> {
    let canon = m.canonical_model()?;
    let c = canon.model.clone();
    if (0..c.edge_count()).any(|e| c.graph().is_loop(e)) {
        return Err(Error::Precondition("canonical model has loops".into()));
    }
    let dc = d.push_coarse(&canon.map, m, &c);
    build_on_model(&c, &dc)
}

fn build_on_model(c: &MetricGraph, d: &Divisor) -> Result<TrigonalCover> {
    check_inputs(c, d)?;
    let reps = reps_unchecked(c, d, &ReduceThenSmooth)?;
    assemble(c, reps)
}

fn assemble(c: &MetricGraph, reps: Vec<AdmissibleRep>) -> Result<TrigonalCover> {
    if reps.len() < 2 {
        return Err(Error::Construction(
            "all admissible representatives coincide, so the tree would be a point".into(),
        ));
    }
    let (gd, map, owner) = support_refinement(c, &reps)?;
    let mut pair_edge: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut tree_ends = Vec::new();
    let mut tree_len = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            if let Some(cut) = consecutive(&gd, &owner, i, j)? {
                check_cut_multiplicities(&gd, &map.fine_vertex_image, &owner, &reps, &cut, i)?;
                check_cut_multiplicities(&gd, &map.fine_vertex_image, &owner, &reps, &cut, j)?;
                pair_edge.insert((i, j), tree_ends.len());
                tree_ends.push([i, j]);
                tree_len.push(gd.length(cut.edges[0]).clone());
            }
        }
    }
    if tree_ends.len() + 1 != reps.len() {
        return Err(Error::Construction(format!(
            "{} consecutive pairs among {} representatives; not a tree",
            tree_ends.len(),
            reps.len()
        )));
    }
    let tree = WeightedGraph::new(vec![0; reps.len()], tree_ends)
        .map_err(|_| Error::Construction("consecutive pairs do not connect the representatives".into()))?;
    let mut edge_map = Vec::new();
    let mut index = Vec::new();
    for e in 0..gd.edge_count() {
        let [a, b] = gd.graph().ends(e);
        let (oa, ob) = (owner[a], owner[b]);
        if oa == ob {
            edge_map.push(EdgeImage::Vertex(oa));
            index.push(0);
        } else {
            edge_map.push(EdgeImage::Edge(pair_edge[&(oa.min(ob), oa.max(ob))]));
            index.push(1);
        }
    }
    let morphism = IndexedMorphism {
        source: gd.graph().clone(),
        target: tree.clone(),
        vertex_map: owner,
        edge_map,
        index,
        source_lengths: Some(gd.lengths().to_vec()),
        target_lengths: Some(tree_len.clone()),
    };
    let cover = TrigonalCover {
        canonical: c.clone(),
        target: MetricGraph::new(tree, tree_len)?,
        source: gd,
        source_map: map,
        morphism,
        reps,
    };
    verify_cover(&cover)?;
    Ok(cover)
}

/// The number of cut edges at each support point equals its coefficient.
fn check_cut_multiplicities(
    gd: &MetricGraph,
    locs: &[Point],
    owner: &[usize],
    reps: &[AdmissibleRep],
    cut: &EdgeCut,
    i: usize,
) -> Result<()> {
    for v in (0..gd.vertex_count()).filter(|&v| owner[v] == i) {
        let at = cut.edges.iter().flat_map(|&e| gd.graph().ends(e)).filter(|&u| u == v).count() as i64;
        if at != reps[i].divisor.coeff(&locs[v]) {
            return Err(Error::Construction(format!(
                "vertex {v} meets {at} cut edges but carries {} chips",
                reps[i].divisor.coeff(&locs[v])
            )));
        }
    }
    Ok(())
}

fn verify_cover(cover: &TrigonalCover) -> Result<()> {
    let r = cover.morphism.check()?;
    if !r.harmonic || !r.non_degenerate || r.degree != Some(3) || r.metric_consistent != Some(true) {
        return Err(Error::Construction(format!(
            "assembled morphism fails its checks: {:?}",
            r.violations
        )));
    }
    Ok(())
}

/// Cover for a 3-edge connected metric graph, allowing loops in the
/// canonical model. Each loop is cut at its midpoint and sent, together with
/// a new leaf, onto a new leaf of the tree.
pub fn build_trigonal_cover_with_loops(m: &MetricGraph, d: &Divisor) -> Result<TrigonalCover> {
    let canon = m.canonical_model()?;
    let c = canon.model.clone();
    let loops: Vec<usize> = (0..c.edge_count()).filter(|&e| c.graph().is_loop(e)).collect();
    if loops.is_empty() {
        return build_trigonal_cover(m, d);
    }
    let dc = d.push_coarse(&canon.map, m, &c);
    check_inputs(&c, &dc)?;
    let (core, to_core) = c.without_loops()?;
    // a representative at a loop vertex avoids every loop interior
    let x0 = c.graph().ends(loops[0])[0];
    let start = ReduceThenSmooth.rep(&c, &dc, x0)?;
    let moved = move_to_core(&start, &to_core)?;
    let base = match build_on_model(&core, &moved) {
        Ok(cover) if loop_vertices_ok(&cover, &c, &loops) => cover,
        _ => small_core_cover(&c, &core, &loops)?,
    };
    attach_loops(&c, &to_core, base, &loops)
}

fn move_to_core(d: &Divisor, to_core: &[Option<usize>]) -> Result<Divisor> {
    let mut out = Divisor::zero();
    for (p, &k) in d.iter() {
        let q = match p {
            Point::Vertex(v) => Point::Vertex(*v),
            Point::Edge(e, t) => Point::Edge(
                to_core[*e].ok_or_else(|| Error::Construction("representative has a point inside a loop".into()))?,
                t.clone(),
            ),
        };
        out.add_chips(q, k);
    }
    Ok(out)
}

fn loop_vertices_ok(cover: &TrigonalCover, c: &MetricGraph, loops: &[usize]) -> bool {
    loops.iter().all(|&e| {
        let x = c.graph().ends(e)[0];
        let t = cover.morphism.vertex_map[x];
        cover.reps[t].divisor.coeff(&Point::Vertex(x)) >= 2
    })
}

/// Cover of the loopless core when its canonical model is small: tries vertex
/// triples on the core until one gives a cover compatible with the loops.
pub fn small_core_cover(c: &MetricGraph, core: &MetricGraph, loops: &[usize]) -> Result<TrigonalCover> {
    let verts = model_vertex_points(core);
    let n = verts.len();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let d = Divisor::from_points(&[verts[i].clone(), verts[j].clone(), verts[k].clone()]);
                if !rank_at_least(core, &d, 1)? {
                    continue;
                }
                if let Ok(cover) = build_on_model(core, &d) {
                    if loop_vertices_ok(&cover, c, loops) {
                        return Ok(cover);
                    }
                }
            }
        }
    }
    Err(Error::Construction("loopless core is outside the handled small families".into()))
}

fn attach_loops(c: &MetricGraph, to_core: &[Option<usize>], base: TrigonalCover, loops: &[usize]) -> Result<TrigonalCover> {
    let gd = &base.source;
    let f = &base.morphism;
    let from_core: BTreeMap<usize, usize> = to_core
        .iter()
        .enumerate()
        .filter_map(|(e, n)| n.map(|n| (n, e)))
        .collect();
    let mut s_weights = gd.graph().weights().to_vec();
    let mut s_ends = gd.graph().all_ends().to_vec();
    let mut s_len = gd.lengths().to_vec();
    let mut t_weights = base.target.graph().weights().to_vec();
    let mut t_ends = base.target.graph().all_ends().to_vec();
    let mut t_len = base.target.lengths().to_vec();
    let mut vertex_map = f.vertex_map.clone();
    let mut edge_map = f.edge_map.clone();
    let mut index = f.index.clone();

    let relabel = |p: &Point| -> Point {
        match p {
            Point::Vertex(v) => Point::Vertex(*v),
            Point::Edge(e, t) => Point::Edge(from_core[e], t.clone()),
        }
    };
    let mut fine_vertex_image: Vec<Point> = base.source_map.fine_vertex_image.iter().map(relabel).collect();
    let mut fine_edge_image: Vec<Option<(usize, Q, Q)>> = base
        .source_map
        .fine_edge_image
        .iter()
        .map(|x| x.clone().map(|(e, s, u)| (from_core[&e], s, u)))
        .collect();
    let mut pieces: Vec<Vec<(usize, bool)>> = vec![Vec::new(); c.edge_count()];
    for (e, p) in pieces.iter_mut().enumerate() {
        if let Some(n) = to_core[e] {
            *p = base.source_map.pieces[n].clone();
        }
    }
    let reps = base.reps.clone();

    for &lp in loops {
        let x = c.graph().ends(lp)[0];
        let tx = vertex_map[x];
        let mut rest = reps[tx].divisor.clone();
        if rest.coeff(&Point::Vertex(x)) < 2 {
            return Err(Error::Construction(format!("loop vertex {x} has multiplicity below 2 in its representative")));
        }
        rest.add_chips(Point::Vertex(x), -2);
        let y_loc = rest.support().into_iter().next().expect("degree 3");
        let y = (0..gd.vertex_count())
            .find(|&v| fine_vertex_image[v] == y_loc && vertex_map[v] == tx)
            .ok_or_else(|| Error::Construction("remaining support point is not a vertex".into()))?;
        let half = c.length(lp) / qi(2);
        let leaf_t = t_weights.len();
        t_weights.push(0);
        let te = t_ends.len();
        t_ends.push([tx, leaf_t]);
        t_len.push(half.clone());

        let w = s_weights.len();
        s_weights.push(0);
        vertex_map.push(leaf_t);
        fine_vertex_image.push(Point::Edge(lp, half.clone()));
        let tip = s_weights.len();
        s_weights.push(0);
        vertex_map.push(leaf_t);
        fine_vertex_image.push(fine_vertex_image[y].clone());

        let first = s_ends.len();
        for (ends, img) in [
            ([x, w], Some((lp, qi(0), half.clone()))),
            ([w, x], Some((lp, half.clone(), c.length(lp).clone()))),
            ([y, tip], None),
        ] {
            s_ends.push(ends);
            s_len.push(half.clone());
            edge_map.push(EdgeImage::Edge(te));
            index.push(1);
            fine_edge_image.push(img);
        }
        pieces[lp] = vec![(first, true), (first + 1, true)];
    }
    let source = MetricGraph::new(WeightedGraph::new(s_weights, s_ends)?, s_len)?;
    let target = MetricGraph::new(WeightedGraph::new(t_weights, t_ends)?, t_len)?;
    let morphism = IndexedMorphism {
        source: source.graph().clone(),
        target: target.graph().clone(),
        vertex_map,
        edge_map,
        index,
        source_lengths: Some(source.lengths().to_vec()),
        target_lengths: Some(target.lengths().to_vec()),
    };
    let cover = TrigonalCover {
        canonical: c.clone(),
        source,
        source_map: RefinementMap {
            pieces,
            vertex_to_fine: (0..c.vertex_count()).collect(),
            fine_vertex_image,
            fine_edge_image,
        },
        target,
        morphism,
        reps,
    };
    verify_cover(&cover)?;
    Ok(cover)
}

/// Witness divisor when the canonical loopless model has 2 or 3 vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallCaseCertificate {
    pub vertex_count: usize,
    pub divisor: Divisor,
}

pub fn small_case_witness(m: &MetricGraph) -> Result<SmallCaseCertificate> {
    let verts = model_vertex_points(m);
    let divisor = match verts.len() {
        2 => Divisor::from_pairs(&[(verts[0].clone(), 1), (verts[1].clone(), 2)]),
        3 => Divisor::from_points(&verts),
        n => {
            return Err(Error::Precondition(format!(
                "canonical loopless model has {n} vertices, expected 2 or 3"
            )))
        }
    };
    if !rank_at_least(m, &divisor, 1)? {
        return Err(Error::Construction("small-case witness has rank below 1".into()));
    }
    Ok(SmallCaseCertificate {
        vertex_count: verts.len(),
        divisor,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    /// Pullback of the midpoint of tree edge 0, on the cover's source.
    pub pullback: Divisor,
    pub pullback_rank_positive: bool,
    /// The same divisor retracted onto the canonical model.
    pub retracted: Divisor,
    pub retracted_rank_positive: bool,
    /// Pullback of each representative's tree vertex, retracted, equals the
    /// representative.
    pub vertex_fibers_match: bool,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.pullback.degree() == 3 && self.pullback_rank_positive && self.retracted_rank_positive && self.vertex_fibers_match
    }
}

pub fn verify_equivalence_roundtrip(cover: &TrigonalCover) -> Result<RoundtripReport> {
    if cover.target.edge_count() == 0 {
        return Err(Error::Precondition("tree has no edges".into()));
    }
    let t = cover.target.midpoint(0);
    let pb = pullback(&cover.morphism, &Divisor::from_points(&[t]))?;
    let pullback_rank_positive = rank_at_least(&cover.source, &pb, 1)?;
    let retracted = pb.push_coarse(&cover.source_map, &cover.source, &cover.canonical);
    let retracted_rank_positive = rank_at_least(&cover.canonical, &retracted, 1)?;
    let mut vertex_fibers_match = true;
    for (i, rep) in cover.reps.iter().enumerate() {
        let pv = pullback(&cover.morphism, &Divisor::from_points(&[Point::Vertex(i)]))?;
        let back = pv.push_coarse(&cover.source_map, &cover.source, &cover.canonical);
        if back != rep.divisor {
            vertex_fibers_match = false;
        }
    }
    Ok(RoundtripReport {
        pullback: pb,
        pullback_rank_positive,
        retracted,
        retracted_rank_positive,
        vertex_fibers_match,
    })
}
