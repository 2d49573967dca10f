//! JSON documents and Graphviz export.
//!
//! Every document is `{"kind": ..., "version": 1, "payload": ...}`. Ids in
//! input files may be any non-negative integers; they are remapped densely in
//! increasing order, and emitted documents always use the dense ids.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::divisor::{Divisor, RationalFn};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{identity_map, MetricGraph, Point};
use crate::moduli::{EdgeClass, TrigonalType};
use crate::morphism::{EdgeImage, IndexedMorphism};
use crate::rational::{parse_q, Q};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Graph,
    MetricGraph,
    Divisor,
    RationalFn,
    Morphism,
    TrigonalType,
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub kind: Kind,
    pub version: u32,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDoc {
    id: u64,
    #[serde(default)]
    weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: u64,
    ends: [u64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    length: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChipDoc {
    at: String,
    count: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DivisorDoc {
    chips: Vec<ChipDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalFnDoc {
    graph: GraphDoc,
    /// `(vertex id, value)` pairs.
    values: Vec<(u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImageDoc {
    id: u64,
    image: String,
    index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismDoc {
    source: GraphDoc,
    target: GraphDoc,
    /// `(source vertex id, target vertex id)` pairs.
    vertex_map: Vec<(u64, u64)>,
    edges: Vec<ImageDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigonalTypeDoc {
    morphism: MorphismDoc,
}

/// Document ids to dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdMap {
    pub vertices: BTreeMap<u64, usize>,
    pub edges: BTreeMap<u64, usize>,
}

impl IdMap {
    pub fn identity(m: &WeightedGraph) -> Self {
        IdMap {
            vertices: (0..m.vertex_count()).map(|v| (v as u64, v)).collect(),
            edges: (0..m.edge_count()).map(|e| (e as u64, e)).collect(),
        }
    }

    pub fn vertex(&self, id: u64) -> Result<usize> {
        self.vertices.get(&id).copied().ok_or_else(|| fmt_err(format!("unknown vertex id {id}")))
    }

    pub fn edge(&self, id: u64) -> Result<usize> {
        self.edges.get(&id).copied().ok_or_else(|| fmt_err(format!("unknown edge id {id}")))
    }
}

fn fmt_err(s: String) -> Error {
    Error::Format(s)
}

fn at<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format(s) => Error::Format(format!("{field}: {s}")),
        other => Error::Format(format!("{field}: {other}")),
    })
}

pub fn q_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_document(text: &str) -> Result<Document> {
    let doc: Document = serde_json::from_str(text).map_err(|e| fmt_err(format!("line {} column {}: {e}", e.line(), e.column())))?;
    if doc.version != VERSION {
        return Err(fmt_err(format!("version: unsupported version {}", doc.version)));
    }
    Ok(doc)
}

pub fn to_text(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

fn payload<T: for<'de> Deserialize<'de>>(doc: &Document, kinds: &[Kind]) -> Result<T> {
    if !kinds.contains(&doc.kind) {
        return Err(fmt_err(format!("kind: expected one of {kinds:?}, found {:?}", doc.kind)));
    }
    serde_json::from_value(doc.payload.clone()).map_err(|e| fmt_err(format!("payload: {e}")))
}

fn document<T: Serialize>(kind: Kind, p: &T) -> Document {
    Document {
        kind,
        version: VERSION,
        payload: serde_json::to_value(p).expect("payloads serialize"),
    }
}

fn dense(ids: impl Iterator<Item = u64>, what: &str) -> Result<BTreeMap<u64, usize>> {
    let mut sorted: Vec<u64> = ids.collect();
    let n = sorted.len();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != n {
        return Err(fmt_err(format!("{what}: duplicate id")));
    }
    Ok(sorted.into_iter().enumerate().map(|(i, id)| (id, i)).collect())
}

/// Graph plus lengths when every edge has one.
fn read_graph_doc(g: &GraphDoc, field: &str) -> Result<(WeightedGraph, Option<Vec<Q>>, IdMap)> {
    let ids = IdMap {
        vertices: dense(g.vertices.iter().map(|v| v.id), &format!("{field}.vertices"))?,
        edges: dense(g.edges.iter().map(|e| e.id), &format!("{field}.edges"))?,
    };
    let mut weights = vec![0; g.vertices.len()];
    for v in &g.vertices {
        weights[ids.vertices[&v.id]] = v.weight;
    }
    let mut ends = vec![[0, 0]; g.edges.len()];
    let mut lengths: Vec<Option<Q>> = vec![None; g.edges.len()];
    for (i, e) in g.edges.iter().enumerate() {
        let f = format!("{field}.edges[{i}]");
        let k = ids.edges[&e.id];
        ends[k] = [at(&f, ids.vertex(e.ends[0]))?, at(&f, ids.vertex(e.ends[1]))?];
        if let Some(l) = &e.length {
            lengths[k] = Some(at(&format!("{f}.length"), parse_q(l))?);
        }
    }
    let graph = at(field, WeightedGraph::new(weights, ends))?;
    let lengths = if lengths.iter().all(|l| l.is_some()) && !lengths.is_empty() {
        Some(lengths.into_iter().map(|l| l.unwrap()).collect())
    } else if lengths.iter().all(|l| l.is_none()) {
        None
    } else {
        return Err(fmt_err(format!("{field}.edges: lengths must be given on all edges or none")));
    };
    Ok((graph, lengths, ids))
}

fn graph_doc(g: &WeightedGraph, lengths: Option<&[Q]>) -> GraphDoc {
    GraphDoc {
        vertices: (0..g.vertex_count())
            .map(|v| VertexDoc {
                id: v as u64,
                weight: g.weight(v),
            })
            .collect(),
        edges: (0..g.edge_count())
            .map(|e| {
                let [a, b] = g.ends(e);
                EdgeDoc {
                    id: e as u64,
                    ends: [a as u64, b as u64],
                    length: lengths.map(|l| q_string(&l[e])),
                }
            })
            .collect(),
    }
}

pub fn graph_document(g: &WeightedGraph) -> Document {
    document(Kind::Graph, &graph_doc(g, None))
}

pub fn metric_graph_document(m: &MetricGraph) -> Document {
    document(Kind::MetricGraph, &graph_doc(m.graph(), Some(m.lengths())))
}

/// Reads a `graph` or `metric_graph` document; lengths are dropped.
pub fn read_graph(doc: &Document) -> Result<(WeightedGraph, IdMap)> {
    let g: GraphDoc = payload(doc, &[Kind::Graph, Kind::MetricGraph])?;
    let (graph, _, ids) = read_graph_doc(&g, "payload")?;
    Ok((graph, ids))
}

/// Reads a `metric_graph` document, or a `graph` document with lengths on
/// every edge.
pub fn read_metric_graph(doc: &Document) -> Result<(MetricGraph, IdMap)> {
    let g: GraphDoc = payload(doc, &[Kind::Graph, Kind::MetricGraph])?;
    let (graph, lengths, ids) = read_graph_doc(&g, "payload")?;
    let lengths = lengths.ok_or_else(|| fmt_err("payload.edges: lengths are required".into()))?;
    Ok((at("payload", MetricGraph::new(graph, lengths))?, ids))
}

/// Point syntax: `v:ID` for a vertex, `e:ID@p/q` for the point at that
/// distance from the first end of an edge.
pub fn parse_point(spec: &str, m: &MetricGraph, ids: &IdMap) -> Result<Point> {
    let bad = || fmt_err(format!("point {spec:?}: expected v:ID or e:ID@p/q"));
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    if let Some(v) = spec.strip_prefix("v:") {
        let v = ids.vertex(num(v)?)?;
        m.check_point(&Point::Vertex(v))?;
        Ok(Point::Vertex(v))
    } else if let Some(rest) = spec.strip_prefix("e:") {
        let (e, t) = rest.split_once('@').ok_or_else(bad)?;
        let e = ids.edge(num(e)?)?;
        m.point(e, parse_q(t)?)
    } else {
        Err(bad())
    }
}

pub fn point_string(p: &Point) -> String {
    match p {
        Point::Vertex(v) => format!("v:{v}"),
        Point::Edge(e, t) => format!("e:{e}@{}", q_string(t)),
    }
}

pub fn divisor_document(d: &Divisor) -> Document {
    document(
        Kind::Divisor,
        &DivisorDoc {
            chips: d
                .iter()
                .map(|(p, &k)| ChipDoc {
                    at: point_string(p),
                    count: k,
                })
                .collect(),
        },
    )
}

/// Reads a divisor on `m`, whose document ids are given by `ids`.
pub fn read_divisor(doc: &Document, m: &MetricGraph, ids: &IdMap) -> Result<Divisor> {
    let d: DivisorDoc = payload(doc, &[Kind::Divisor])?;
    let mut out = Divisor::zero();
    for (i, c) in d.chips.iter().enumerate() {
        let p = at(&format!("payload.chips[{i}].at"), parse_point(&c.at, m, ids))?;
        out.add_chips(p, c.count);
    }
    Ok(out)
}

pub fn rational_fn_document(f: &RationalFn) -> Document {
    document(
        Kind::RationalFn,
        &RationalFnDoc {
            graph: graph_doc(f.model.graph(), Some(f.model.lengths())),
            values: f.values.iter().enumerate().map(|(v, x)| (v as u64, q_string(x))).collect(),
        },
    )
}

/// A rational function is stored on its own model, which is also its ambient
/// metric graph.
pub fn read_rational_fn(doc: &Document) -> Result<RationalFn> {
    let r: RationalFnDoc = payload(doc, &[Kind::RationalFn])?;
    let (graph, lengths, ids) = read_graph_doc(&r.graph, "payload.graph")?;
    let lengths = lengths.ok_or_else(|| fmt_err("payload.graph.edges: lengths are required".into()))?;
    let m = at("payload.graph", MetricGraph::new(graph, lengths))?;
    let mut values: Vec<Option<Q>> = vec![None; m.vertex_count()];
    for (i, (v, x)) in r.values.iter().enumerate() {
        let f = format!("payload.values[{i}]");
        values[at(&f, ids.vertex(*v))?] = Some(at(&f, parse_q(x))?);
    }
    let values: Vec<Q> = values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| fmt_err(format!("payload.values: missing value at vertex {v}"))))
        .collect::<Result<_>>()?;
    let map = identity_map(&m);
    at("payload", RationalFn::new(m, map, values))
}

fn morphism_doc(f: &IndexedMorphism) -> MorphismDoc {
    MorphismDoc {
        source: graph_doc(&f.source, f.source_lengths.as_deref()),
        target: graph_doc(&f.target, f.target_lengths.as_deref()),
        vertex_map: f.vertex_map.iter().enumerate().map(|(v, &t)| (v as u64, t as u64)).collect(),
        edges: (0..f.source.edge_count())
            .map(|e| ImageDoc {
                id: e as u64,
                image: match f.edge_map[e] {
                    EdgeImage::Vertex(t) => format!("v:{t}"),
                    EdgeImage::Edge(t) => format!("e:{t}"),
                },
                index: f.index[e],
            })
            .collect(),
    }
}

fn read_morphism_doc(d: &MorphismDoc, field: &str) -> Result<IndexedMorphism> {
    let (source, source_lengths, sids) = read_graph_doc(&d.source, &format!("{field}.source"))?;
    let (target, target_lengths, tids) = read_graph_doc(&d.target, &format!("{field}.target"))?;
    let mut vertex_map = vec![None; source.vertex_count()];
    for (i, &(v, t)) in d.vertex_map.iter().enumerate() {
        let f = format!("{field}.vertex_map[{i}]");
        vertex_map[at(&f, sids.vertex(v))?] = Some(at(&f, tids.vertex(t))?);
    }
    let vertex_map: Vec<usize> = vertex_map
        .into_iter()
        .enumerate()
        .map(|(v, t)| t.ok_or_else(|| fmt_err(format!("{field}.vertex_map: vertex {v} has no image"))))
        .collect::<Result<_>>()?;
    let mut edge_map = vec![None; source.edge_count()];
    let mut index = vec![0; source.edge_count()];
    for (i, img) in d.edges.iter().enumerate() {
        let f = format!("{field}.edges[{i}]");
        let e = at(&f, sids.edge(img.id))?;
        let parsed = if let Some(t) = img.image.strip_prefix("v:") {
            t.parse().ok().map(|t| tids.vertex(t).map(EdgeImage::Vertex))
        } else if let Some(t) = img.image.strip_prefix("e:") {
            t.parse().ok().map(|t| tids.edge(t).map(EdgeImage::Edge))
        } else {
            None
        };
        let parsed = parsed.ok_or_else(|| fmt_err(format!("{f}.image: expected v:ID or e:ID, found {:?}", img.image)))?;
        edge_map[e] = Some(at(&format!("{f}.image"), parsed)?);
        index[e] = img.index;
    }
    let edge_map: Vec<EdgeImage> = edge_map
        .into_iter()
        .enumerate()
        .map(|(e, t)| t.ok_or_else(|| fmt_err(format!("{field}.edges: edge {e} has no image"))))
        .collect::<Result<_>>()?;
    let f = IndexedMorphism {
        source,
        target,
        vertex_map,
        edge_map,
        index,
        source_lengths,
        target_lengths,
    };
    at(field, f.check().map(|_| f.clone()))
}

pub fn morphism_document(f: &IndexedMorphism) -> Document {
    document(Kind::Morphism, &morphism_doc(f))
}

pub fn read_morphism(doc: &Document) -> Result<IndexedMorphism> {
    let d: MorphismDoc = payload(doc, &[Kind::Morphism])?;
    read_morphism_doc(&d, "payload")
}

pub fn trigonal_type_document(tt: &TrigonalType) -> Document {
    document(
        Kind::TrigonalType,
        &TrigonalTypeDoc {
            morphism: morphism_doc(&tt.morphism),
        },
    )
}

pub fn read_trigonal_type(doc: &Document) -> Result<TrigonalType> {
    let d: TrigonalTypeDoc = payload(doc, &[Kind::TrigonalType])?;
    at("payload", TrigonalType::new(read_morphism_doc(&d.morphism, "payload.morphism")?))
}

pub fn report_document(v: Value) -> Document {
    Document {
        kind: Kind::Report,
        version: VERSION,
        payload: v,
    }
}

/// Parses and re-emits a document. Divisors are read against the graph
/// that `ids` came from, so only their syntax is normalized here: chips are
/// merged, zero counts dropped, and points sorted.
pub fn normalize(text: &str) -> Result<String> {
    let doc = parse_document(text)?;
    let out = match doc.kind {
        Kind::Graph => graph_document(&read_graph(&doc)?.0),
        Kind::MetricGraph => metric_graph_document(&read_metric_graph(&doc)?.0),
        Kind::Divisor => {
            let d: DivisorDoc = payload(&doc, &[Kind::Divisor])?;
            let mut chips: BTreeMap<(u8, u64, Option<Q>), i64> = BTreeMap::new();
            for (i, c) in d.chips.iter().enumerate() {
                let key = at(&format!("payload.chips[{i}].at"), point_key(&c.at))?;
                *chips.entry(key).or_insert(0) += c.count;
            }
            document(
                Kind::Divisor,
                &DivisorDoc {
                    chips: chips
                        .into_iter()
                        .filter(|(_, k)| *k != 0)
                        .map(|((_, id, t), count)| ChipDoc {
                            at: match t {
                                None => format!("v:{id}"),
                                Some(t) => format!("e:{id}@{}", q_string(&t)),
                            },
                            count,
                        })
                        .collect(),
                },
            )
        }
        Kind::RationalFn => rational_fn_document(&read_rational_fn(&doc)?),
        Kind::Morphism => morphism_document(&read_morphism(&doc)?),
        Kind::TrigonalType => trigonal_type_document(&read_trigonal_type(&doc)?),
        Kind::Report => doc,
    };
    Ok(to_text(&out))
}

/// Sort key of a point spec, in the same order as [`Point`].
fn point_key(spec: &str) -> Result<(u8, u64, Option<Q>)> {
    let bad = || fmt_err(format!("point {spec:?}: expected v:ID or e:ID@p/q"));
    if let Some(v) = spec.strip_prefix("v:") {
        Ok((0, v.parse().map_err(|_| bad())?, None))
    } else if let Some(rest) = spec.strip_prefix("e:") {
        let (e, t) = rest.split_once('@').ok_or_else(bad)?;
        Ok((1, e.parse().map_err(|_| bad())?, Some(parse_q(t)?)))
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    pub lengths: bool,
    pub divisor: Option<Divisor>,
}

fn hsv(i: usize, n: usize) -> String {
    format!("\"{:.3} 0.75 0.85\"", i as f64 / n.max(1) as f64)
}

fn chip_labels(d: Option<&Divisor>) -> (BTreeMap<usize, i64>, BTreeMap<usize, Vec<String>>) {
    let mut at_vertex = BTreeMap::new();
    let mut on_edge: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    if let Some(d) = d {
        for (p, &k) in d.iter() {
            match p {
                Point::Vertex(v) => {
                    at_vertex.insert(*v, k);
                }
                Point::Edge(e, t) => on_edge.entry(*e).or_default().push(format!("{k}@{}", q_string(t))),
            }
        }
    }
    (at_vertex, on_edge)
}

/// Undirected graph in DOT. Vertex labels show weights and chips; edge labels
/// show lengths and chips on the edge.
pub fn graph_to_dot(g: &WeightedGraph, lengths: Option<&[Q]>, opts: &DotOptions) -> String {
    let (at_vertex, on_edge) = chip_labels(opts.divisor.as_ref());
    let mut s = String::from("graph G {\n");
    for v in 0..g.vertex_count() {
        let mut label = format!("{v}");
        if g.weight(v) > 0 {
            let _ = write!(label, " w={}", g.weight(v));
        }
        if let Some(k) = at_vertex.get(&v) {
            let _ = write!(label, " [{k}]");
        }
        let _ = writeln!(s, "  v{v} [label=\"{label}\"];");
    }
    for e in 0..g.edge_count() {
        let [a, b] = g.ends(e);
        let mut parts = Vec::new();
        if let (true, Some(l)) = (opts.lengths, lengths) {
            parts.push(q_string(&l[e]));
        }
        if let Some(c) = on_edge.get(&e) {
            parts.push(format!("chips {}", c.join(",")));
        }
        let _ = writeln!(s, "  v{a} -- v{b} [id=\"e{e}\", label=\"{}\"];", parts.join(" "));
    }
    s.push_str("}\n");
    s
}

pub fn metric_graph_to_dot(m: &MetricGraph, opts: &DotOptions) -> String {
    graph_to_dot(m.graph(), Some(m.lengths()), opts)
}

/// Source and target side by side. Each class of edges gets its own colour,
/// shared with the tree edge it lies over; contracted edges are dashed and
/// horizontal edges are labelled with their index.
pub fn morphism_to_dot(f: &IndexedMorphism) -> String {
    let classes = EdgeClass::partition(f);
    let n = classes.len();
    let mut class_of = vec![0; f.source.edge_count()];
    let mut tree_color = vec![String::new(); f.target.edge_count()];
    for (c, cls) in classes.iter().enumerate() {
        for &e in &cls.edges {
            class_of[e] = c;
        }
        if let Some(t) = cls.over {
            tree_color[t] = hsv(c, n);
        }
    }
    let mut s = String::from("graph G {\n  subgraph cluster_source {\n    label=\"source\";\n");
    for v in 0..f.source.vertex_count() {
        let w = f.source.weight(v);
        let label = if w > 0 { format!("{v} w={w}") } else { format!("{v}") };
        let _ = writeln!(s, "    s{v} [label=\"{label}\"];");
    }
    for e in 0..f.source.edge_count() {
        let [a, b] = f.source.ends(e);
        let color = hsv(class_of[e], n);
        if f.is_contracted(e) {
            let _ = writeln!(s, "    s{a} -- s{b} [id=\"e{e}\", color={color}, style=dashed];");
        } else {
            let _ = writeln!(s, "    s{a} -- s{b} [id=\"e{e}\", color={color}, label=\"{}\"];", f.index[e]);
        }
    }
    s.push_str("  }\n  subgraph cluster_target {\n    label=\"target\";\n");
    for v in 0..f.target.vertex_count() {
        let _ = writeln!(s, "    t{v} [label=\"{v}\"];");
    }
    for t in 0..f.target.edge_count() {
        let [a, b] = f.target.ends(t);
        let _ = writeln!(s, "    t{a} -- t{b} [id=\"t{t}\", color={}];", tree_color[t]);
    }
    s.push_str("  }\n}\n");
    s
}

pub fn trigonal_type_to_dot(tt: &TrigonalType) -> String {
    morphism_to_dot(&tt.morphism)
}
