//! Small hand-built morphisms and metric graphs used in tests and examples.

use crate::graph::WeightedGraph;
use crate::metric::MetricGraph;
use crate::morphism::{EdgeImage, IndexedMorphism};
use crate::rational::qi;

use EdgeImage::{Edge as E, Vertex as V};

fn morphism(
    n_source: usize,
    source_edges: &[(usize, usize, EdgeImage, u32)],
    target: WeightedGraph,
    vertex_map: Vec<usize>,
) -> IndexedMorphism {
    let source = WeightedGraph::from_edges(n_source, &source_edges.iter().map(|&(a, b, _, _)| (a, b)).collect::<Vec<_>>())
        .expect("fixture source");
    IndexedMorphism {
        source,
        target,
        vertex_map,
        edge_map: source_edges.iter().map(|&(_, _, img, _)| img).collect(),
        index: source_edges.iter().map(|&(_, _, _, mu)| mu).collect(),
        source_lengths: None,
        target_lengths: None,
    }
}

/// Two pairs of leaves hanging off a contracted edge; fails harmonicity at
/// vertex 2, which sees two edges over one side and none over the other.
pub fn non_harmonic_example() -> IndexedMorphism {
    // vertices: l1 l2 a b r1 r2
    let edges = [
        (0, 2, E(0), 1),
        (1, 2, E(0), 1),
        (4, 3, E(1), 1),
        (5, 3, E(1), 1),
        (2, 3, V(1), 0),
        (0, 1, V(0), 0),
        (0, 1, V(0), 0),
        (4, 5, V(2), 0),
        (4, 5, V(2), 0),
    ];
    let target = WeightedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    morphism(6, &edges, target, vec![0, 0, 1, 1, 2, 2])
}

/// Harmonic of degree 3 onto a single edge, with a vertex of multiplicity 0.
pub fn degenerate_example() -> IndexedMorphism {
    // l0 l1 l2 r0 r1 r2 c
    let edges = [
        (0, 3, E(0), 1),
        (1, 4, E(0), 1),
        (2, 5, E(0), 1),
        (2, 1, V(0), 0),
        (0, 1, V(0), 0),
        (5, 4, V(1), 0),
        (3, 4, V(1), 0),
        (3, 5, V(1), 0),
        (6, 0, V(0), 0),
        (6, 1, V(0), 0),
        (6, 2, V(0), 0),
    ];
    let target = WeightedGraph::from_edges(2, &[(0, 1)]).unwrap();
    morphism(7, &edges, target, vec![0, 0, 0, 1, 1, 1, 0])
}

/// Degree 2 onto a path with three edges; the middle edge has index 2.
pub fn degree_two_example() -> IndexedMorphism {
    // l1 l2 a b r1 r2
    let edges = [
        (0, 2, E(0), 1),
        (1, 2, E(0), 1),
        (4, 3, E(2), 1),
        (5, 3, E(2), 1),
        (2, 3, E(1), 2),
        (0, 1, V(0), 0),
        (0, 1, V(0), 0),
        (4, 5, V(3), 0),
        (4, 5, V(3), 0),
    ];
    let target = WeightedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    morphism(6, &edges, target, vec![0, 0, 1, 2, 3, 3])
}

/// Degree 3 onto a path with two edges. The first fiber is a contracted
/// triangle, the second has one contracted edge, the last is a single vertex
/// of multiplicity 3. All lengths are 1.
pub fn contracted_fibers_example() -> IndexedMorphism {
    // p-fiber: 0 1 2, q-fiber: 3 4 5, r-fiber: 6
    let edges = [
        (0, 1, V(0), 0),
        (1, 2, V(0), 0),
        (2, 0, V(0), 0),
        (3, 5, V(1), 0),
        (0, 3, E(0), 1),
        (1, 4, E(0), 1),
        (2, 5, E(0), 1),
        (3, 6, E(1), 1),
        (4, 6, E(1), 1),
        (5, 6, E(1), 1),
    ];
    let target = WeightedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let mut f = morphism(7, &edges, target, vec![0, 0, 0, 1, 1, 1, 2]);
    f.source_lengths = Some(vec![qi(1); edges.len()]);
    f.target_lengths = Some(vec![qi(1); 2]);
    f
}

/// Triangular prism with rungs 1, 2, 4 and uneven triangle sides.
pub fn uneven_prism() -> MetricGraph {
    // A B C D E F
    MetricGraph::from_edges(
        6,
        &[
            (0, 1, 1, 1),
            (2, 3, 2, 1),
            (4, 5, 4, 1),
            (0, 2, 1, 2),
            (2, 4, 1, 2),
            (0, 4, 1, 1),
            (1, 3, 1, 1),
            (3, 5, 3, 1),
            (1, 5, 4, 1),
        ],
    )
    .unwrap()
}

/// Genus-5 graph with two triangles joined by three paths, the upper two
/// joined by a rung.
pub fn two_triangles() -> MetricGraph {
    // a b c | d e f | p q ; bottom path c-f has length 3
    MetricGraph::from_edges(
        8,
        &[
            (0, 6, 1, 1),
            (6, 3, 1, 1),
            (1, 7, 1, 1),
            (7, 4, 1, 1),
            (6, 7, 1, 1),
            (2, 5, 3, 1),
            (0, 1, 1, 1),
            (0, 2, 1, 1),
            (1, 2, 1, 1),
            (3, 5, 1, 1),
            (4, 5, 1, 1),
            (3, 4, 1, 1),
        ],
    )
    .unwrap()
}

/// Theta graph with equal sides and two loops at vertex 0.
pub fn looped_theta() -> MetricGraph {
    MetricGraph::from_edges(2, &[(0, 1, 1, 1), (0, 1, 1, 1), (0, 1, 1, 1), (0, 0, 1, 1), (0, 0, 2, 1)]).unwrap()
}

/// Degree-3 cover of a path with three fibers of three vertices each. The
/// first fiber is a path through its middle vertex, the second has one
/// contracted edge, the third is a contracted triangle.
pub fn three_fiber_type() -> IndexedMorphism {
    // p r1 r2 | q a b | c d e
    let edges = [
        (0, 3, E(0), 1),
        (1, 4, E(0), 1),
        (2, 5, E(0), 1),
        (8, 3, E(1), 1),
        (5, 7, E(1), 1),
        (4, 6, E(1), 1),
        (1, 0, V(0), 0),
        (2, 0, V(0), 0),
        (4, 5, V(1), 0),
        (7, 6, V(2), 0),
        (8, 6, V(2), 0),
        (8, 7, V(2), 0),
    ];
    let target = WeightedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    morphism(9, &edges, target, vec![0, 0, 0, 1, 1, 1, 2, 2, 2])
}

/// One edge as target; over its first end a vertex of multiplicity 1 and one
/// of multiplicity 2 joined by two contracted edges, over the other end a
/// single vertex of multiplicity 3.
pub fn loop_spawning_type() -> IndexedMorphism {
    // x y p
    let edges = [
        (0, 1, V(0), 0),
        (0, 1, V(0), 0),
        (0, 2, E(0), 1),
        (1, 2, E(0), 1),
        (1, 2, E(0), 1),
    ];
    let target = WeightedGraph::from_edges(2, &[(0, 1)]).unwrap();
    morphism(3, &edges, target, vec![0, 0, 1])
}
