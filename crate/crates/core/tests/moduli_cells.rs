use tropigon::graph::{named, WeightedGraph};
use tropigon::moduli::{
    all_ladders, build_3_ladders, enumerate_trees, facets_and_adjacency, ladder, maximal_cells, phi_contract_class,
    LadderChoice,
};

fn claw() -> WeightedGraph {
    WeightedGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
}

fn classes_up_to_iso(gs: &[WeightedGraph]) -> usize {
    let mut reps: Vec<&WeightedGraph> = Vec::new();
    for g in gs {
        if !reps.iter().any(|r| r.is_isomorphic(g)) {
            reps.push(g);
        }
    }
    reps.len()
}

#[test]
fn frozen_cell_counts() {
    let counts: Vec<usize> = (3..=6).map(|g| maximal_cells(g).unwrap().len()).collect();
    assert_eq!(counts, [1, 2, 2, 5]);
    for g in 4..=6 {
        for cell in maximal_cells(g).unwrap() {
            assert_eq!(cell.dimension(), 2 * g + 1);
        }
    }
}

#[test]
fn claw_ladders() {
    let t = claw();
    let raw = all_ladders(&t).unwrap();
    assert_eq!(raw.len(), 5);
    let sources: Vec<WeightedGraph> = raw.iter().map(|l| l.ttype.morphism.source.clone()).collect();
    assert_eq!(classes_up_to_iso(&sources), 3);
    assert_eq!(build_3_ladders(&t).unwrap().len(), 3);

    // middles on copies (1,1,2) and (1,2,2) give the same graph
    use LadderChoice::{Free, Middle};
    let a = ladder(&t, &[Free, Middle(1), Middle(1), Middle(2)]).unwrap();
    let b = ladder(&t, &[Free, Middle(1), Middle(2), Middle(2)]).unwrap();
    assert!(a.ttype.morphism.source.is_isomorphic(&b.ttype.morphism.source));
    assert!(a.ttype.is_isomorphic(&b.ttype));
}

#[test]
fn contractions_keep_genus_and_lower_dimension_by_at_most_one() {
    for t in enumerate_trees(4, 3) {
        for l in build_3_ladders(&t).unwrap() {
            let dim = l.ttype.cone().dimension;
            for c in 0..l.ttype.classes().len() {
                let out = phi_contract_class(&l.ttype, c).unwrap();
                assert_eq!(out.genus(), 4);
                let d = out.cone().dimension;
                assert!(d + 1 >= dim && d < dim, "class {c}: {dim} -> {d}");
            }
        }
    }
}

#[test]
fn adjacency_in_genus_four() {
    let cells = maximal_cells(4).unwrap();
    let adj = facets_and_adjacency(&cells).unwrap();
    assert!(adj.connected);
    assert_eq!(adj.edges, [(0, 1)]);
    assert!(adj.facets.iter().all(|f| !f.is_empty()));
}

#[test]
fn path_ladders_avoid_shared_pairs() {
    let p = named::path(5);
    for l in all_ladders(&p).unwrap() {
        let inner = &l.choices[1..4];
        assert!(!inner.iter().all(|c| *c == inner[0]), "{:?}", l.choices);
    }
}
