//! Acceptance run: one line per check, non-zero exit if any check fails.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tropigon::divisor::{divisor_of, linearly_equivalent, rank, rank_at_least, reduce, vertex_divisor, Divisor, RationalFn};
use tropigon::fixtures;
use tropigon::graph::{named, WeightedGraph};
use tropigon::metric::{model_vertex_points, MetricGraph, Point};
use tropigon::moduli::{
    admissibility_report, all_ladders, certify_admissible, enumerate_trees, facets_and_adjacency, maximal_cells_with_jobs,
};
use tropigon::morphism::{pullback, remove_contractions, EdgeImage, IndexedMorphism};
use tropigon::rational::{q, qi, Q};
use tropigon::trigonal::{build_trigonal_cover, build_trigonal_cover_with_loops, verify_equivalence_roundtrip, TrigonalCover};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: u64) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < Duration::from_secs(limit), || format!("took {t:?}, limit {limit}s"))
}

fn ladder_counts() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for n in 2..=7 {
        for t in enumerate_trees(n, 3) {
            for l in all_ladders(&t).map_err(|e| e.to_string())? {
                let s = &l.ttype.morphism.source;
                let got = (s.vertex_count(), s.edge_count(), s.genus(), l.ttype.classes().len());
                ensure(got == (3 * n, 4 * n - 1, n, 2 * n + 1), || format!("n={n} {:?}: {got:?}", l.choices))?;
                total += 1;
            }
        }
    }
    within(start, 10)?;
    Ok(format!("{total} ladders over trees with 2..7 vertices"))
}

fn pure_dimension() -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    for g in 3..=6 {
        let cells = maximal_cells_with_jobs(g, 4).map_err(|e| e.to_string())?;
        let want = if g == 3 { 6 } else { 2 * g + 1 };
        for c in &cells {
            for (_, d) in &c.types {
                ensure(*d == want, || format!("genus {g}: a cell of dimension {d}, expected {want}"))?;
            }
        }
        counts.push(cells.len());
    }
    within(start, 60)?;
    Ok(format!("cells per genus 3..6: {counts:?}"))
}

fn connected_through_facets() -> Outcome {
    let start = Instant::now();
    let mut out = Vec::new();
    for g in 3..=5 {
        let cells = maximal_cells_with_jobs(g, 4).map_err(|e| e.to_string())?;
        let adj = facets_and_adjacency(&cells).map_err(|e| e.to_string())?;
        ensure(adj.connected, || format!("genus {g}: adjacency graph is disconnected"))?;
        out.push(format!("g={g}: {} cells, {} adjacencies", cells.len(), adj.edges.len()));
    }
    within(start, 120)?;
    Ok(out.join("; "))
}

fn check_cover(name: &str, cover: &TrigonalCover) -> Result<(), String> {
    let r = cover.morphism.check().map_err(|e| e.to_string())?;
    ensure(r.harmonic && r.non_degenerate && r.degree == Some(3), || format!("{name}: {r:?}"))?;
    ensure(r.metric_consistent == Some(true), || format!("{name}: lengths do not match"))?;
    for te in 0..cover.target.edge_count() {
        let over = cover.morphism.edges_over(te);
        ensure(over.len() == 3, || format!("{name}: {} edges over tree edge {te}", over.len()))?;
        ensure(over.iter().all(|&e| cover.source.length(e) == cover.target.length(te)), || {
            format!("{name}: unequal lengths over tree edge {te}")
        })?;
        ensure(cover.source.graph().disconnected_by(&over), || format!("{name}: fiber over {te} does not disconnect"))?;
        let p = Point::Edge(te, cover.target.length(te) * q(1, 3));
        let pb = pullback(&cover.morphism, &Divisor::from_points(&[p])).map_err(|e| e.to_string())?;
        ensure(rank_at_least(&cover.source, &pb, 1).map_err(|e| e.to_string())?, || {
            format!("{name}: pullback over tree edge {te} has rank 0")
        })?;
    }
    let rt = verify_equivalence_roundtrip(cover).map_err(|e| e.to_string())?;
    ensure(rt.passed(), || format!("{name}: {rt:?}"))
}

fn cover_roundtrip() -> Outcome {
    let start = Instant::now();
    let prism = fixtures::uneven_prism();
    let tt = fixtures::two_triangles();
    let cases: Vec<(&str, MetricGraph, Divisor)> = vec![
        ("banana", MetricGraph::unit(named::banana(3)), vertex_divisor(&[(0, 3)])),
        ("K4", MetricGraph::unit(named::complete(4)), vertex_divisor(&[(0, 1), (1, 1), (2, 1)])),
        (
            "uneven prism",
            prism.clone(),
            Divisor::from_points(&[Point::Vertex(0), Point::Vertex(4), prism.midpoint(1)]),
        ),
        (
            "two triangles, first divisor",
            tt.clone(),
            Divisor::from_points(&[Point::Vertex(6), Point::Vertex(7), Point::Edge(5, qi(2))]),
        ),
        (
            "two triangles, second divisor",
            tt.clone(),
            Divisor::from_points(&[Point::Vertex(6), Point::Vertex(7), Point::Edge(5, qi(1))]),
        ),
        ("looped theta", fixtures::looped_theta(), vertex_divisor(&[(0, 3)])),
    ];
    for (name, m, d) in &cases {
        let cover = build_trigonal_cover_with_loops(m, d).map_err(|e| format!("{name}: {e}"))?;
        check_cover(name, &cover)?;
    }
    within(start, 10)?;
    Ok(format!("{} covers built and checked", cases.len()))
}

fn uneven_prism_specificity() -> Outcome {
    let prism = fixtures::uneven_prism();
    let g = prism.graph().clone();
    let target = WeightedGraph::from_edges(2, &[(0, 1)]).map_err(|e| e.to_string())?;
    for l in [qi(1), qi(2), qi(4)] {
        let naive = IndexedMorphism {
            source: g.clone(),
            target: target.clone(),
            vertex_map: vec![0, 1, 0, 1, 0, 1],
            edge_map: (0..9).map(|e| if e < 3 { EdgeImage::Edge(0) } else { EdgeImage::Vertex(if e < 6 { 0 } else { 1 }) }).collect(),
            index: (0..9).map(|e| if e < 3 { 1 } else { 0 }).collect(),
            source_lengths: Some(prism.lengths().to_vec()),
            target_lengths: Some(vec![l.clone()]),
        };
        let r = naive.check().map_err(|e| e.to_string())?;
        ensure(r.harmonic && r.degree == Some(3), || "naive map should be harmonic of degree 3".into())?;
        ensure(r.metric_consistent == Some(false), || format!("naive map fits a target edge of length {l}"))?;
    }
    let d = Divisor::from_points(&[Point::Vertex(0), Point::Vertex(4), prism.midpoint(1)]);
    let cover = build_trigonal_cover(&prism, &d).map_err(|e| e.to_string())?;
    check_cover("uneven prism", &cover)?;
    let leaves = (0..cover.target.vertex_count()).filter(|&t| cover.target.graph().valence(t) == 1).count();
    ensure(cover.target.edge_count() == 3 && leaves == 2, || "expected a path with three edges".into())?;
    Ok("parallel-rung map rejected for target lengths 1, 2, 4; constructed cover onto a 3-edge path accepted".into())
}

fn rank_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut by_rank = [0usize; 6];
    let cases = 60;
    for i in 0..cases {
        let g = common::random_three_connected(&mut rng);
        let n = g.vertex_count();
        let mut d = vec![0i64; n];
        let target_deg = rng.gen_range(0..=4);
        while d.iter().sum::<i64>() < target_deg {
            d[rng.gen_range(0..n)] += 1;
        }
        if rng.gen_bool(0.3) {
            d[rng.gen_range(0..n)] -= 1;
        }
        let oracle = common::chip_rank(&common::adjacency(&g), &d);
        let div = vertex_divisor(&d.iter().enumerate().map(|(v, &k)| (v, k)).collect::<Vec<_>>());
        let m = MetricGraph::unit(g.clone());
        let got = rank(&m, &div).map_err(|e| e.to_string())?;
        ensure(got == oracle, || format!("case {i}: graph {:?}, divisor {d:?}: metric {got}, oracle {oracle}", g.all_ends()))?;
        by_rank[(oracle + 1) as usize] += 1;
    }
    Ok(format!("{cases} cases, counts for ranks -1..4: {by_rank:?}"))
}

fn low_genus_laws() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    let cycles: Vec<MetricGraph> = vec![
        MetricGraph::from_edges(1, &[(0, 0, 3, 2)]).unwrap(),
        MetricGraph::from_edges(2, &[(0, 1, 1, 1), (1, 0, 2, 3)]).unwrap(),
        MetricGraph::from_edges(4, &[(0, 1, 1, 1), (1, 2, 1, 2), (2, 3, 5, 3), (3, 0, 1, 1)]).unwrap(),
    ];
    for m in &cycles {
        for d in 1..=4i64 {
            for _ in 0..3 {
                let mut div = Divisor::zero();
                while div.degree() < d {
                    div.add_chips(common::random_point(&mut rng, m), 1);
                }
                if rng.gen_bool(0.5) {
                    div.add_chips(common::random_point(&mut rng, m), 1);
                    div.add_chips(common::random_point(&mut rng, m), -1);
                }
                let r = rank(m, &div).map_err(|e| e.to_string())?;
                ensure(r == d - 1, || format!("cycle, degree {d}: rank {r} for {div:?}"))?;
                checked += 1;
            }
        }
    }
    let genus_two: Vec<MetricGraph> = vec![
        MetricGraph::from_edges(2, &[(0, 1, 1, 1), (0, 1, 2, 1), (0, 1, 3, 1)]).unwrap(),
        MetricGraph::from_edges(2, &[(0, 0, 1, 1), (0, 1, 1, 2), (1, 1, 2, 1)]).unwrap(),
        MetricGraph::from_edges(3, &[(0, 1, 1, 2), (0, 1, 1, 1), (0, 1, 5, 2), (1, 2, 1, 1)]).unwrap(),
    ];
    for m in &genus_two {
        for _ in 0..6 {
            let mut div = Divisor::zero();
            for _ in 0..3 {
                div.add_chips(common::random_point(&mut rng, m), 1);
            }
            if rng.gen_bool(0.5) {
                div.add_chips(common::random_point(&mut rng, m), 1);
                div.add_chips(common::random_point(&mut rng, m), -1);
            }
            let r = rank(m, &div).map_err(|e| e.to_string())?;
            ensure(r == 1, || format!("genus 2, degree 3: rank {r} for {div:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} divisors on cycles and genus-2 graphs"))
}

fn reduced_divisor_laws() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    let cases = 200;
    for i in 0..cases {
        let m = common::random_metric(&mut rng);
        let d = common::random_divisor(&mut rng, &m);
        let base = common::random_point(&mut rng, &m);
        let fail = |what: &str| format!("case {i} ({what}): divisor {d:?}, base {base:?}");
        let r = reduce(&m, &d, &base).map_err(|e| e.to_string())?;
        ensure(reduce(&m, &r, &base).map_err(|e| e.to_string())? == r, || fail("idempotence"))?;
        ensure(linearly_equivalent(&m, &d, &r).map_err(|e| e.to_string())?, || fail("equivalence"))?;
        let set: Vec<usize> = (0..m.vertex_count()).filter(|_| rng.gen_bool(0.5)).collect();
        let shortest: Q = m.lengths().iter().min().unwrap().clone();
        let eps = shortest * q(1, rng.gen_range(2..=4));
        let f = RationalFn::set_tent(&m, &set, &eps).map_err(|e| e.to_string())?;
        let moved = &d + &divisor_of(&f, &m).map_err(|e| e.to_string())?;
        ensure(reduce(&m, &moved, &base).map_err(|e| e.to_string())? == r, || fail("tent invariance"))?;
    }
    within(start, 30)?;
    Ok(format!("{cases} random cases with rational lengths"))
}

fn contraction_removal() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut cases = vec![fixtures::contracted_fibers_example()];
    cases.extend((0..20).map(|_| common::random_contracting_morphism(&mut rng)));
    for (i, f) in cases.iter().enumerate() {
        let before = f.check().map_err(|e| e.to_string())?;
        ensure(before.harmonic && !f.contracted_edges().is_empty(), || format!("case {i}: bad input"))?;
        let out = remove_contractions(f).map_err(|e| format!("case {i}: {e}"))?.morphism;
        let after = out.check().map_err(|e| e.to_string())?;
        ensure(out.contracted_edges().is_empty(), || format!("case {i}: contractions remain"))?;
        ensure(after.harmonic && after.non_degenerate, || format!("case {i}: {:?}", after.violations))?;
        ensure(after.degree == before.degree, || format!("case {i}: degree {:?} became {:?}", before.degree, after.degree))?;
        ensure(after.metric_consistent == Some(true), || format!("case {i}: lengths inconsistent"))?;
    }
    Ok(format!("{} morphisms, degrees 2 and 3", cases.len()))
}

fn admissible_certificates() -> Outcome {
    let mut total = 0;
    for g in 3..=6 {
        for t in enumerate_trees(g, 3) {
            for l in all_ladders(&t).map_err(|e| e.to_string())? {
                ensure(certify_admissible(&l.ttype).map_err(|e| e.to_string())?, || {
                    format!("genus {g}: ladder {:?} is not balanced", l.choices)
                })?;
                total += 1;
            }
        }
    }
    let t = enumerate_trees(4, 3).remove(0);
    let l = all_ladders(&t).map_err(|e| e.to_string())?.remove(0);
    let mut removal = remove_contractions(&l.ttype.morphism).map_err(|e| e.to_string())?;
    let e = (0..removal.morphism.index.len()).find(|&e| removal.morphism.index[e] == 1).unwrap();
    removal.morphism.index[e] = 2;
    let control = admissibility_report(&removal).map_err(|e| e.to_string())?;
    ensure(!control.balanced, || "perturbed index still balanced".into())?;
    Ok(format!("{total} ladder covers balanced; perturbed control rejected"))
}

fn no_degree_two_pencils() -> Outcome {
    let fixtures_3ec: Vec<(&str, MetricGraph)> = vec![
        ("K4", MetricGraph::unit(named::complete(4))),
        ("prism", MetricGraph::unit(named::prism())),
        ("uneven prism", fixtures::uneven_prism()),
        ("K33", MetricGraph::unit(WeightedGraph::from_edges(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]).unwrap())),
        ("Petersen", MetricGraph::unit(named::petersen())),
        ("two triangles", fixtures::two_triangles()),
    ];
    let mut checked = 0;
    for (name, m) in &fixtures_3ec {
        ensure(m.graph().edge_connectivity() >= Some(3), || format!("{name} is not 3-edge connected"))?;
        let c = m.canonical_model().map_err(|e| e.to_string())?.model;
        ensure(c.vertex_count() >= 3, || format!("{name}: canonical model too small"))?;
        let verts = model_vertex_points(&c);
        for i in 0..verts.len() {
            for j in i..verts.len() {
                let d = Divisor::from_points(&[verts[i].clone(), verts[j].clone()]);
                ensure(!rank_at_least(&c, &d, 1).map_err(|e| e.to_string())?, || format!("{name}: {d:?} has rank 1"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} degree-2 divisors on {} graphs", fixtures_3ec.len()))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("ladder vertex, edge, genus and class counts", ladder_counts),
        ("maximal cells have pure dimension", pure_dimension),
        ("maximal cells connected through facets", connected_through_facets),
        ("covers from divisors round trip", cover_roundtrip),
        ("uneven prism needs the constructed cover", uneven_prism_specificity),
        ("metric rank agrees with chip-firing rank", rank_oracle),
        ("rank on cycles and genus 2", low_genus_laws),
        ("reduced divisor laws", reduced_divisor_laws),
        ("removing contracted edges", contraction_removal),
        ("ladder covers are admissible", admissible_certificates),
        ("no degree-2 divisor of rank 1", no_degree_two_pencils),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{t:.2?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{t:.2?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
