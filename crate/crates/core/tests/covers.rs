use tropigon::divisor::{linearly_equivalent, rank, rank_at_least, vertex_divisor, Divisor};
use tropigon::fixtures;
use tropigon::graph::named;
use tropigon::metric::{MetricGraph, Point};
use tropigon::rational::qi;
use tropigon::search::find_trigonal_divisor;
use tropigon::trigonal::*;

fn assert_cover_ok(cover: &TrigonalCover) {
    let r = cover.morphism.check().unwrap();
    assert!(r.harmonic && r.non_degenerate, "{:?}", r.violations);
    assert_eq!(r.degree, Some(3));
    assert_eq!(r.metric_consistent, Some(true));
    let t = &cover.target;
    assert_eq!(t.edge_count() + 1, t.vertex_count());
    for te in 0..t.edge_count() {
        let over = cover.morphism.edges_over(te);
        assert_eq!(over.len(), 3);
        assert!(over.iter().all(|&e| cover.source.length(e) == t.length(te)));
        assert!(cover.source.graph().disconnected_by(&over));
    }
    let rt = verify_equivalence_roundtrip(cover).unwrap();
    assert!(rt.passed(), "{rt:?}");
}

#[test]
fn k4_cover() {
    let m = MetricGraph::unit(named::complete(4));
    let d = vertex_divisor(&[(0, 1), (1, 1), (2, 1)]);
    let cover = build_trigonal_cover(&m, &d).unwrap();
    assert_eq!(cover.target.vertex_count(), 2);
    assert_cover_ok(&cover);
}

#[test]
fn banana_cover_needs_separated_representatives() {
    let m = MetricGraph::unit(named::banana(3));
    let cover = build_trigonal_cover(&m, &vertex_divisor(&[(0, 3)])).unwrap();
    assert_eq!(cover.reps.len(), 2);
    assert_cover_ok(&cover);
    // x + 2y is its own representative at both vertices
    let err = build_trigonal_cover(&m, &vertex_divisor(&[(0, 1), (1, 2)]));
    assert!(err.is_err());
}

#[test]
fn uneven_prism_cover() {
    let m = fixtures::uneven_prism();
    let p = m.midpoint(1);
    let d = Divisor::from_points(&[Point::Vertex(0), Point::Vertex(4), p]);
    assert!(rank_at_least(&m, &d, 1).unwrap());
    let cover = build_trigonal_cover(&m, &d).unwrap();
    assert_eq!(cover.target.edge_count(), 3);
    assert_cover_ok(&cover);
    // path shaped tree
    let degs: Vec<usize> = (0..4).map(|t| cover.target.graph().valence(t)).collect();
    assert_eq!(degs.iter().filter(|&&x| x == 1).count(), 2);
}

#[test]
fn two_inequivalent_covers_on_genus_five() {
    let m = fixtures::two_triangles();
    assert_eq!(m.genus(), 5);
    let d1 = Divisor::from_points(&[Point::Vertex(6), Point::Vertex(7), Point::Edge(5, qi(2))]);
    let d2 = Divisor::from_points(&[Point::Vertex(6), Point::Vertex(7), Point::Edge(5, qi(1))]);
    assert_eq!(rank(&m, &d1).unwrap(), 1);
    assert_eq!(rank(&m, &d2).unwrap(), 1);
    assert!(!linearly_equivalent(&m, &d1, &d2).unwrap());
    for d in [&d1, &d2] {
        let cover = build_trigonal_cover(&m, d).unwrap();
        assert_eq!(cover.reps.len(), 4);
        assert_cover_ok(&cover);
    }
}

#[test]
fn looped_theta_cover() {
    let m = fixtures::looped_theta();
    let d = vertex_divisor(&[(0, 3)]);
    assert!(build_trigonal_cover(&m, &d).is_err());
    let cover = build_trigonal_cover_with_loops(&m, &d).unwrap();
    assert_eq!(cover.target.vertex_count(), 4);
    assert_cover_ok(&cover);
}

#[test]
fn representative_strategies_agree() {
    let cases: Vec<(MetricGraph, Divisor)> = vec![
        (MetricGraph::unit(named::complete(4)), vertex_divisor(&[(0, 1), (1, 1), (2, 1)])),
        (fixtures::uneven_prism(), Divisor::from_points(&[Point::Vertex(0), Point::Vertex(4), fixtures::uneven_prism().midpoint(1)])),
        (fixtures::two_triangles(), Divisor::from_points(&[Point::Vertex(6), Point::Vertex(7), Point::Edge(5, qi(2))])),
    ];
    let strategies = rep_strategies();
    for (m, d) in cases {
        let c = m.canonical_model().unwrap().model;
        for x in 0..c.vertex_count() {
            let outs: Vec<Divisor> = strategies.values().map(|f| f().rep(&c, &d, x).unwrap()).collect();
            assert!(outs.windows(2).all(|w| w[0] == w[1]), "base {x}: {outs:?}");
        }
    }
}

#[test]
fn small_cases() {
    let b3 = MetricGraph::unit(named::banana(3));
    let w = small_case_witness(&b3).unwrap();
    assert_eq!(w.vertex_count, 2);
    assert_eq!(w.divisor.degree(), 3);
    let tri = MetricGraph::from_edges(3, &[(0, 1, 1, 1), (0, 1, 1, 1), (1, 2, 1, 1), (1, 2, 2, 1), (0, 2, 1, 1), (0, 2, 3, 1)]).unwrap();
    let w = small_case_witness(&tri).unwrap();
    assert_eq!(w.vertex_count, 3);
    assert!(small_case_witness(&MetricGraph::unit(named::complete(4))).is_err());
}

#[test]
fn search_then_build() {
    let m = fixtures::uneven_prism();
    let hit = find_trigonal_divisor(&m).unwrap().unwrap();
    let cover = build_trigonal_cover(&m, &hit.divisor).unwrap();
    assert_cover_ok(&cover);
}
