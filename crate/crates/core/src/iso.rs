//! Isomorphism of vertex-colored multigraphs: colour refinement followed by
//! individualization and backtracking.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredMultigraph {
    colors: Vec<u64>,
    /// `adj[v][v]` counts loops at `v`.
    adj: Vec<Vec<u32>>,
}

impl ColoredMultigraph {
    pub fn new(colors: Vec<u64>) -> Self {
        let n = colors.len();
        ColoredMultigraph {
            colors,
            adj: vec![vec![0; n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn add_vertex(&mut self, color: u64) -> usize {
        self.colors.push(color);
        for row in &mut self.adj {
            row.push(0);
        }
        self.adj.push(vec![0; self.colors.len()]);
        self.colors.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.add_edges(a, b, 1);
    }

    pub fn add_edges(&mut self, a: usize, b: usize, k: u32) {
        self.adj[a][b] += k;
        if a != b {
            self.adj[b][a] += k;
        }
    }

    /// Refinement-stable colour histogram; equal for isomorphic inputs.
    pub fn invariant(&self) -> Vec<u64> {
        let mut c = self.colors.iter().map(|&x| hash_of(&(0u8, x))).collect::<Vec<_>>();
        refine(&mut [(self, &mut c)]);
        c.sort_unstable();
        c
    }
}

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

fn class_count(c: &[u64]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Refines all colourings together until the number of classes stops growing.
fn refine(graphs: &mut [(&ColoredMultigraph, &mut Vec<u64>)]) {
    loop {
        let before: usize = graphs.iter().map(|(_, c)| class_count(c)).sum();
        for (g, c) in graphs.iter_mut() {
            let n = g.len();
            let next: Vec<u64> = (0..n)
                .map(|v| {
                    let mut sig: Vec<(u64, u32)> = (0..n)
                        .filter(|&u| g.adj[v][u] > 0)
                        .map(|u| (c[u], g.adj[v][u]))
                        .collect();
                    sig.sort_unstable();
                    hash_of(&(c[v], g.adj[v][v], sig))
                })
                .collect();
            **c = next;
        }
        let after: usize = graphs.iter().map(|(_, c)| class_count(c)).sum();
        if after == before {
            return;
        }
    }
}

pub fn isomorphic(a: &ColoredMultigraph, b: &ColoredMultigraph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ca = a.colors.iter().map(|&x| hash_of(&(0u8, x))).collect();
    let cb = b.colors.iter().map(|&x| hash_of(&(0u8, x))).collect();
    search(a, b, ca, cb, 0)
}

fn histogram(c: &[u64]) -> Vec<u64> {
    let mut v = c.to_vec();
    v.sort_unstable();
    v
}

fn search(a: &ColoredMultigraph, b: &ColoredMultigraph, mut ca: Vec<u64>, mut cb: Vec<u64>, depth: u64) -> bool {
    refine(&mut [(a, &mut ca), (b, &mut cb)]);
    if histogram(&ca) != histogram(&cb) {
        return false;
    }
    let n = a.len();
    // smallest non-singleton class of a
    let mut best: Option<(usize, u64)> = None;
    let hist = histogram(&ca);
    let mut i = 0;
    while i < hist.len() {
        let mut j = i;
        while j < hist.len() && hist[j] == hist[i] {
            j += 1;
        }
        let size = j - i;
        if size > 1 && best.is_none_or(|(s, _)| size < s) {
            best = Some((size, hist[i]));
        }
        i = j;
    }
    match best {
        None => {
            let mut map = vec![0; n];
            for v in 0..n {
                map[v] = (0..n).find(|&u| cb[u] == ca[v]).unwrap();
            }
            (0..n).all(|v| (0..n).all(|u| a.adj[v][u] == b.adj[map[v]][map[u]]))
        }
        Some((_, color)) => {
            let x = (0..n).find(|&v| ca[v] == color).unwrap();
            let mark = hash_of(&(1u8, depth));
            let mut ca2 = ca.clone();
            ca2[x] = hash_of(&(ca[x], mark));
            for y in (0..n).filter(|&u| cb[u] == color) {
                let mut cb2 = cb.clone();
                cb2[y] = hash_of(&(cb[y], mark));
                if search(a, b, ca2.clone(), cb2, depth + 1) {
                    return true;
                }
            }
            false
        }
    }
}
