//! Generators and a brute-force chip-firing oracle shared by the integration
//! tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use tropigon::divisor::Divisor;
use tropigon::graph::WeightedGraph;
use tropigon::metric::{MetricGraph, Point};
use tropigon::morphism::{EdgeImage, IndexedMorphism};
use tropigon::rational::{q, Q};

/// Adjacency counts of a loopless multigraph.
pub fn adjacency(g: &WeightedGraph) -> Vec<Vec<i64>> {
    let n = g.vertex_count();
    let mut adj = vec![vec![0; n]; n];
    for &[a, b] in g.all_ends() {
        if a != b {
            adj[a][b] += 1;
            adj[b][a] += 1;
        }
    }
    adj
}

fn fire(adj: &[Vec<i64>], d: &mut [i64], v: usize, times: i64) {
    let deg: i64 = adj[v].iter().sum();
    d[v] -= times * deg;
    for (u, &k) in adj[v].iter().enumerate() {
        d[u] += times * k;
    }
}

/// `q`-reduced divisor on a finite graph. Debt away from `q` is cleared by
/// borrowing, which is sandpile stabilization in disguise; then the set left
/// unburnt by a fire started at `q` is fired until everything burns.
pub fn reduce_finite(adj: &[Vec<i64>], d: &[i64], q: usize) -> Vec<i64> {
    let n = adj.len();
    let mut d = d.to_vec();
    loop {
        let Some(v) = (0..n).find(|&v| v != q && d[v] < 0) else { break };
        fire(adj, &mut d, v, -1);
    }
    loop {
        let mut burnt = vec![false; n];
        burnt[q] = true;
        loop {
            let mut grew = false;
            for v in 0..n {
                if burnt[v] {
                    continue;
                }
                let fire_in: i64 = (0..n).filter(|&u| burnt[u]).map(|u| adj[v][u]).sum();
                if fire_in > d[v] {
                    burnt[v] = true;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        if burnt.iter().all(|&b| b) {
            return d;
        }
        for v in 0..n {
            if !burnt[v] {
                for u in 0..n {
                    if burnt[u] {
                        d[v] -= adj[v][u];
                        d[u] += adj[v][u];
                    }
                }
            }
        }
    }
}

pub fn effective_class(adj: &[Vec<i64>], d: &[i64]) -> bool {
    reduce_finite(adj, d, 0)[0] >= 0
}

fn multisets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        multisets(n, k, v, cur, out);
        cur.pop();
    }
}

/// Baker–Norine rank by trying every effective divisor of each degree.
pub fn chip_rank(adj: &[Vec<i64>], d: &[i64]) -> i64 {
    let n = adj.len();
    if !effective_class(adj, d) {
        return -1;
    }
    let deg: i64 = d.iter().sum();
    let mut r = 0;
    while r < deg {
        let mut all = Vec::new();
        multisets(n, (r + 1) as usize, 0, &mut Vec::new(), &mut all);
        let ok = all.iter().all(|e| {
            let mut x = d.to_vec();
            for &v in e {
                x[v] -= 1;
            }
            effective_class(adj, &x)
        });
        if !ok {
            break;
        }
        r += 1;
    }
    r
}

/// Loopless multigraph on 2..=6 vertices with edge connectivity at least 3.
pub fn random_three_connected(rng: &mut StdRng) -> WeightedGraph {
    loop {
        let n = rng.gen_range(2..=6);
        let extra = rng.gen_range(n..=2 * n + 2);
        let mut ends = Vec::new();
        for v in 1..n {
            ends.push((rng.gen_range(0..v), v));
        }
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                ends.push((a, b));
            }
        }
        let g = WeightedGraph::from_edges(n, &ends).unwrap();
        if g.edge_connectivity().unwrap_or(0) >= 3 {
            return g;
        }
    }
}

pub fn random_length(rng: &mut StdRng) -> Q {
    q(rng.gen_range(1..=6), rng.gen_range(1..=3))
}

/// Connected graph on 2..=5 vertices with rational lengths, possibly with
/// parallel edges and loops.
pub fn random_metric(rng: &mut StdRng) -> MetricGraph {
    let n = rng.gen_range(2..=5);
    let mut ends = Vec::new();
    for v in 1..n {
        ends.push([rng.gen_range(0..v), v]);
    }
    for _ in 0..rng.gen_range(1..=n + 1) {
        ends.push([rng.gen_range(0..n), rng.gen_range(0..n)]);
    }
    let lengths = ends.iter().map(|_| random_length(rng)).collect();
    MetricGraph::new(WeightedGraph::new(vec![0; n], ends).unwrap(), lengths).unwrap()
}

pub fn random_point(rng: &mut StdRng, m: &MetricGraph) -> Point {
    if rng.gen_bool(0.5) {
        Point::Vertex(rng.gen_range(0..m.vertex_count()))
    } else {
        let e = rng.gen_range(0..m.edge_count());
        let l = m.length(e).clone();
        let t = &l * q(rng.gen_range(1..=5), 6);
        m.point(e, t).unwrap()
    }
}

/// Divisor with between 1 and 4 points, an occasional negative coefficient.
pub fn random_divisor(rng: &mut StdRng, m: &MetricGraph) -> Divisor {
    let mut d = Divisor::zero();
    for _ in 0..rng.gen_range(1..=4) {
        d.add_chips(random_point(rng, m), 1);
    }
    if rng.gen_bool(0.3) {
        d.add_chips(random_point(rng, m), -1);
    }
    d
}

fn composition(rng: &mut StdRng, d: u32) -> Vec<u32> {
    let mut parts = Vec::new();
    let mut left = d;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    parts
}

/// Harmonic morphism of degree 2 or 3 onto a random tree, with at least one
/// contracted edge and metric data that is consistent.
pub fn random_contracting_morphism(rng: &mut StdRng) -> IndexedMorphism {
    loop {
        let d = rng.gen_range(2..=3);
        let nt = rng.gen_range(2..=4);
        let tree_ends: Vec<(usize, usize)> = (1..nt).map(|v| (rng.gen_range(0..v), v)).collect();
        let target = WeightedGraph::from_edges(nt, &tree_ends).unwrap();
        let target_lengths: Vec<Q> = tree_ends.iter().map(|_| q(rng.gen_range(1..=6), 1)).collect();
        let mut fiber: Vec<Vec<usize>> = Vec::new();
        let mut mult = Vec::new();
        let mut vertex_map = Vec::new();
        for t in 0..nt {
            let mut ids = Vec::new();
            for m in composition(rng, d) {
                ids.push(mult.len());
                mult.push(m);
                vertex_map.push(t);
            }
            fiber.push(ids);
        }
        let mut ends = Vec::new();
        let mut edge_map = Vec::new();
        let mut index = Vec::new();
        let mut lengths = Vec::new();
        for (te, &(a, b)) in tree_ends.iter().enumerate() {
            let slots = |f: &Vec<usize>| f.iter().flat_map(|&x| std::iter::repeat_n(x, mult[x] as usize)).collect::<Vec<_>>();
            let left = slots(&fiber[a]);
            let mut right = slots(&fiber[b]);
            right.shuffle(rng);
            let mut pairs: Vec<((usize, usize), u32)> = Vec::new();
            for (x, y) in left.into_iter().zip(right) {
                match pairs.iter_mut().find(|(p, _)| *p == (x, y)) {
                    Some(slot) => slot.1 += 1,
                    None => pairs.push(((x, y), 1)),
                }
            }
            for ((x, y), c) in pairs {
                let split = rng.gen_bool(0.5);
                let pieces = if split { vec![1; c as usize] } else { vec![c] };
                for mu in pieces {
                    ends.push([x, y]);
                    edge_map.push(EdgeImage::Edge(te));
                    index.push(mu);
                    lengths.push(&target_lengths[te] / q(mu as i64, 1));
                }
            }
        }
        for (t, f) in fiber.iter().enumerate() {
            for _ in 0..rng.gen_range(0..=2) {
                let x = *f.choose(rng).unwrap();
                let y = *f.choose(rng).unwrap();
                if x == y && mult[x] < 2 {
                    continue;
                }
                ends.push([x, y]);
                edge_map.push(EdgeImage::Vertex(t));
                index.push(0);
                lengths.push(random_length(rng));
            }
        }
        if !edge_map.iter().any(|e| matches!(e, EdgeImage::Vertex(_))) {
            continue;
        }
        let weights = (0..mult.len()).map(|_| rng.gen_range(0..=1)).collect();
        let Ok(source) = WeightedGraph::new(weights, ends) else { continue };
        return IndexedMorphism {
            source,
            target,
            vertex_map,
            edge_map,
            index,
            source_lengths: Some(lengths),
            target_lengths: Some(target_lengths),
        };
    }
}
