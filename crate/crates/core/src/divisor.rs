//! Divisors, rational functions, Dhar burning, reduced divisors and rank.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::metric::{model_vertex_points, MetricGraph, Point, RefinementMap};
use crate::rational::{qi, Q};

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Divisor {
    chips: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    /// One chip at every listed point (repeats accumulate).
    pub fn from_points(pts: &[Point]) -> Self {
        let mut d = Divisor::zero();
        for p in pts {
            d.add_chips(p.clone(), 1);
        }
        d
    }

    pub fn from_pairs(pairs: &[(Point, i64)]) -> Self {
        let mut d = Divisor::zero();
        for (p, k) in pairs {
            d.add_chips(p.clone(), *k);
        }
        d
    }

    pub fn add_chips(&mut self, p: Point, k: i64) {
        let c = self.chips.entry(p.clone()).or_insert(0);
        *c += k;
        if *c == 0 {
            self.chips.remove(&p);
        }
    }

    pub fn coeff(&self, p: &Point) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn support(&self) -> Vec<Point> {
        self.chips.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &i64)> {
        self.chips.iter()
    }

    pub fn positive_part(&self) -> Divisor {
        Divisor {
            chips: self.chips.iter().filter(|(_, &c)| c > 0).map(|(p, &c)| (p.clone(), c)).collect(),
        }
    }

    pub fn negative_part(&self) -> Divisor {
        Divisor {
            chips: self.chips.iter().filter(|(_, &c)| c < 0).map(|(p, &c)| (p.clone(), -c)).collect(),
        }
    }

    /// Points must lie on `m`, and `m` must carry no vertex weights.
    pub fn check(&self, m: &MetricGraph) -> Result<()> {
        if m.graph().weights().iter().any(|&w| w > 0) {
            return Err(Error::Precondition("divisors on graphs with vertex weights are not supported".into()));
        }
        for p in self.chips.keys() {
            m.check_point(p)?;
        }
        Ok(())
    }

    /// Moves every point through a map to a coarser model.
    pub fn push_coarse(&self, map: &RefinementMap, fine: &MetricGraph, coarse: &MetricGraph) -> Divisor {
        let mut d = Divisor::zero();
        for (p, &c) in &self.chips {
            d.add_chips(map.to_coarse(fine, coarse, p), c);
        }
        d
    }

    /// Moves every point through a map to a finer model.
    pub fn push_fine(&self, map: &RefinementMap, coarse: &MetricGraph, fine: &MetricGraph) -> Divisor {
        let mut d = Divisor::zero();
        for (p, &c) in &self.chips {
            d.add_chips(map.to_fine(coarse, fine, p), c);
        }
        d
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (p, &c) in &rhs.chips {
            d.add_chips(p.clone(), c);
        }
        d
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        self + &(-rhs)
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor {
            chips: self.chips.iter().map(|(p, &c)| (p.clone(), -c)).collect(),
        }
    }
}

/// A continuous function, affine on every edge of `model` with integer slope.
/// `model` refines the ambient metric graph through `map`.
#[derive(Debug, Clone)]
pub struct RationalFn {
    pub model: MetricGraph,
    pub map: RefinementMap,
    pub values: Vec<Q>,
}

impl RationalFn {
    pub fn new(model: MetricGraph, map: RefinementMap, values: Vec<Q>) -> Result<Self> {
        if values.len() != model.vertex_count() {
            return Err(Error::Precondition("one value per vertex is required".into()));
        }
        let f = RationalFn { model, map, values };
        for e in 0..f.model.edge_count() {
            if !f.slope(e).is_integer() {
                return Err(Error::Precondition(format!("non-integer slope on edge {e}")));
            }
        }
        Ok(f)
    }

    /// Slope along `e` from its first end.
    pub fn slope(&self, e: usize) -> Q {
        let [a, b] = self.model.graph().ends(e);
        (&self.values[b] - &self.values[a]) / self.model.length(e)
    }

    /// Piecewise-linear interpolation of arbitrary vertex values: each edge is
    /// split in at most two pieces with consecutive integer slopes.
    pub fn interpolate(ambient: &MetricGraph, vertex_values: &[Q]) -> Result<Self> {
        let mut cuts = Vec::new();
        let mut cut_values = Vec::new();
        for e in 0..ambient.edge_count() {
            let [a, b] = ambient.graph().ends(e);
            let l = ambient.length(e);
            let delta = &vertex_values[b] - &vertex_values[a];
            let s = &delta / l;
            if !s.is_integer() {
                let lo = s.floor();
                let x = &delta - &lo * l; // the slope lo+1 runs for length x
                cuts.push(Point::Edge(e, x.clone()));
                cut_values.push(&vertex_values[a] + (&lo + qi(1)) * &x);
            }
        }
        let (model, map) = ambient.refine_at(&cuts)?;
        let mut values = vertex_values.to_vec();
        // refine_at appends new vertices in edge order, matching `cuts`
        values.extend(cut_values);
        RationalFn::new(model, map, values)
    }

    /// `-min(eps, dist(x, S))` for a set of vertices `S`; `eps` must not exceed
    /// half of the shortest edge.
    pub fn set_tent(ambient: &MetricGraph, set: &[usize], eps: &Q) -> Result<Self> {
        let mut cuts = Vec::new();
        for e in 0..ambient.edge_count() {
            let [a, b] = ambient.graph().ends(e);
            if set.contains(&a) {
                cuts.push(Point::Edge(e, eps.clone()));
            }
            if set.contains(&b) {
                cuts.push(Point::Edge(e, ambient.length(e) - eps));
            }
        }
        cuts.sort();
        cuts.dedup();
        let (model, map) = ambient.refine_at(&cuts)?;
        let values = (0..model.vertex_count())
            .map(|v| {
                if v < ambient.vertex_count() && set.contains(&v) {
                    qi(0)
                } else {
                    -eps.clone()
                }
            })
            .collect();
        RationalFn::new(model, map, values)
    }
}

/// Sum of outgoing slopes at every point, expressed on `ambient`.
pub fn divisor_of(f: &RationalFn, ambient: &MetricGraph) -> Result<Divisor> {
    let mut at = vec![0i64; f.model.vertex_count()];
    for e in 0..f.model.edge_count() {
        let s = f.slope(e);
        if !s.is_integer() {
            return Err(Error::Precondition(format!("non-integer slope on edge {e}")));
        }
        let s = crate::rational::to_i64(&s).ok_or_else(|| Error::Precondition("slope too large".into()))?;
        let [a, b] = f.model.graph().ends(e);
        at[a] += s;
        at[b] -= s;
    }
    let mut d = Divisor::zero();
    for (v, &k) in at.iter().enumerate() {
        if k != 0 {
            d.add_chips(f.map.to_coarse(&f.model, ambient, &Point::Vertex(v)), k);
        }
    }
    Ok(d)
}

/// Outcome of a burn from a start point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurnReport {
    pub all_burnt: bool,
    /// Burnt points among the support and the start.
    pub burnt_points: Vec<Point>,
    /// Points that stop the fire.
    pub blockers: Vec<Blocker>,
    /// Burnt closed segments `(edge, from, to)` with `from < to`.
    pub burnt_segments: Vec<(usize, Q, Q)>,
    /// Unburnt vertices of the model and unburnt support points.
    pub unburnt_points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocker {
    pub point: Point,
    pub chips: i64,
    pub burning_directions: usize,
}

fn step_guard() -> u64 {
    std::env::var("TROPIGON_STEP_GUARD")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000)
}

/// A refinement carrying chips on vertices, modified in place while firing.
struct Work {
    loc: Vec<Point>,
    fixed: Vec<bool>,
    chips: Vec<i64>,
    alive: Vec<bool>,
    ends: Vec<[usize; 2]>,
    len: Vec<Q>,
    src: Vec<(usize, Q, Q)>,
    inc: Vec<Vec<usize>>,
    index: HashMap<Point, usize>,
}

impl Work {
    fn new(m: &MetricGraph, d: &Divisor, extra: &[Point]) -> Result<Work> {
        d.check(m)?;
        let mut pts = d.support();
        pts.extend(extra.iter().cloned());
        let (f, map) = m.refine_at(&pts)?;
        let n = f.vertex_count();
        let mut inc = vec![Vec::new(); n];
        for e in 0..f.edge_count() {
            let [a, b] = f.graph().ends(e);
            inc[a].push(e);
            inc[b].push(e);
        }
        let loc = map.fine_vertex_image.clone();
        let index: HashMap<Point, usize> = loc.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut chips = vec![0; n];
        for (p, &c) in d.iter() {
            chips[index[p]] += c;
        }
        let mut fixed: Vec<bool> = (0..n).map(|v| v < m.vertex_count()).collect();
        for p in extra {
            fixed[index[p]] = true;
        }
        Ok(Work {
            loc,
            fixed,
            chips,
            alive: vec![true; n],
            ends: f.graph().all_ends().to_vec(),
            len: f.lengths().to_vec(),
            src: map.fine_edge_image.into_iter().map(|x| x.expect("refinement")).collect(),
            inc,
            index,
        })
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    fn burn(&self, start: usize) -> (Vec<bool>, Vec<usize>) {
        let n = self.loc.len();
        let mut burnt = vec![false; n];
        let mut dirs = vec![0usize; n];
        burnt[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &e in &self.inc[v] {
                let u = self.other(e, v);
                if u == v || burnt[u] {
                    continue;
                }
                dirs[u] += 1;
                if dirs[u] as i64 > self.chips[u] {
                    burnt[u] = true;
                    stack.push(u);
                }
            }
        }
        (burnt, dirs)
    }

    /// Splits `e` at distance `delta` from its first end; returns the new vertex.
    fn split(&mut self, e: usize, delta: &Q) -> usize {
        let [x0, x1] = self.ends[e];
        let (o, s0, s1) = self.src[e].clone();
        let pos = if s0 <= s1 { &s0 + delta } else { &s0 - delta };
        let z = self.loc.len();
        self.loc.push(Point::Edge(o, pos.clone()));
        self.index.insert(Point::Edge(o, pos.clone()), z);
        self.fixed.push(false);
        self.chips.push(0);
        self.alive.push(true);
        let e2 = self.ends.len();
        let total = self.len[e].clone();
        self.ends[e] = [x0, z];
        self.len[e] = delta.clone();
        self.src[e] = (o, s0, pos.clone());
        self.ends.push([z, x1]);
        self.len.push(total - delta);
        self.src.push((o, pos, s1));
        let slot = self.inc[x1].iter().position(|&x| x == e).unwrap();
        if x0 == x1 {
            // a loop appears twice at x0; retarget one occurrence
            let last = self.inc[x1].iter().rposition(|&x| x == e).unwrap();
            self.inc[x1][last] = e2;
        } else {
            self.inc[x1][slot] = e2;
        }
        self.inc.push(vec![e, e2]);
        z
    }

    fn fire(&mut self, burnt: &[bool]) {
        let mut boundary = Vec::new();
        for w in 0..self.loc.len() {
            if !self.alive[w] || burnt[w] {
                continue;
            }
            for &e in &self.inc[w] {
                let u = self.other(e, w);
                if burnt[u] {
                    boundary.push((w, e));
                }
            }
        }
        let eps = boundary
            .iter()
            .map(|&(_, e)| self.len[e].clone())
            .min()
            .expect("unburnt region has a boundary");
        for (w, e) in boundary {
            let u = self.other(e, w);
            self.chips[w] -= 1;
            if self.len[e] == eps {
                self.chips[u] += 1;
            } else {
                let delta = if self.ends[e][0] == w { eps.clone() } else { &self.len[e] - &eps };
                let z = self.split(e, &delta);
                self.chips[z] += 1;
            }
        }
    }

    /// Drops chip-free subdivision vertices of valence 2.
    fn tidy(&mut self) {
        for z in 0..self.loc.len() {
            if !self.alive[z] || self.fixed[z] || self.chips[z] != 0 || self.inc[z].len() != 2 {
                continue;
            }
            let (e1, e2) = (self.inc[z][0], self.inc[z][1]);
            if e1 == e2 {
                continue;
            }
            let a = self.other(e1, z);
            let b = self.other(e2, z);
            let (o, off_a) = if self.ends[e1][0] == z {
                (self.src[e1].0, self.src[e1].2.clone())
            } else {
                (self.src[e1].0, self.src[e1].1.clone())
            };
            let off_b = if self.ends[e2][0] == z {
                self.src[e2].2.clone()
            } else {
                self.src[e2].1.clone()
            };
            self.ends[e1] = [a, b];
            self.len[e1] = &self.len[e1] + &self.len[e2];
            self.src[e1] = (o, off_a, off_b);
            let slot = self.inc[b].iter().position(|&x| x == e2).unwrap();
            self.inc[b][slot] = e1;
            self.inc[z].clear();
            self.alive[z] = false;
            self.index.remove(&self.loc[z]);
        }
    }

    fn run_reduction(&mut self, base: usize) -> Result<()> {
        let guard = step_guard();
        let mut steps = 0u64;
        loop {
            let (burnt, _) = self.burn(base);
            if (0..self.loc.len()).all(|v| !self.alive[v] || burnt[v]) {
                return Ok(());
            }
            steps += 1;
            if steps > guard {
                return Err(Error::StepGuard(guard));
            }
            self.fire(&burnt);
            self.tidy();
        }
    }

    fn divisor(&self) -> Divisor {
        let mut d = Divisor::zero();
        for v in 0..self.loc.len() {
            if self.alive[v] && self.chips[v] != 0 {
                d.add_chips(self.loc[v].clone(), self.chips[v]);
            }
        }
        d
    }
}

/// Runs the burning algorithm for an effective divisor.
pub fn dhar_burn(m: &MetricGraph, d: &Divisor, start: &Point) -> Result<BurnReport> {
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    m.check_point(start)?;
    let w = Work::new(m, d, std::slice::from_ref(start))?;
    let s = w.index[start];
    let (burnt, dirs) = w.burn(s);
    let n = w.loc.len();
    let mut burnt_points = Vec::new();
    let mut blockers = Vec::new();
    let mut unburnt_points = Vec::new();
    for v in 0..n {
        let interesting = w.chips[v] != 0 || v == s;
        if burnt[v] {
            if interesting {
                burnt_points.push(w.loc[v].clone());
            }
        } else {
            unburnt_points.push(w.loc[v].clone());
            if dirs[v] > 0 {
                blockers.push(Blocker {
                    point: w.loc[v].clone(),
                    chips: w.chips[v],
                    burning_directions: dirs[v],
                });
            }
        }
    }
    let mut burnt_segments = Vec::new();
    for e in 0..w.ends.len() {
        let [a, b] = w.ends[e];
        if burnt[a] || burnt[b] {
            let (o, s0, s1) = w.src[e].clone();
            if s0 <= s1 {
                burnt_segments.push((o, s0, s1));
            } else {
                burnt_segments.push((o, s1, s0));
            }
        }
    }
    burnt_segments.sort();
    Ok(BurnReport {
        all_burnt: burnt.iter().all(|&b| b),
        burnt_points,
        blockers,
        burnt_segments,
        unburnt_points,
    })
}

/// Reduces a divisor that is effective away from `base`.
fn reduce_away(m: &MetricGraph, d: &Divisor, base: &Point) -> Result<Divisor> {
    let mut w = Work::new(m, d, std::slice::from_ref(base))?;
    let b = w.index[base];
    w.run_reduction(b)?;
    Ok(w.divisor())
}

/// The `base`-reduced divisor linearly equivalent to `d`.
pub fn reduce(m: &MetricGraph, d: &Divisor, base: &Point) -> Result<Divisor> {
    d.check(m)?;
    m.check_point(base)?;
    let mut away = d.clone();
    away.add_chips(base.clone(), -d.coeff(base));
    if away.is_effective() {
        return reduce_away(m, d, base);
    }
    // Lift the degree to the genus so an effective representative exists.
    let g = m.genus() as i64;
    let k = (g - d.degree()).max(0);
    let mut lifted = d.clone();
    lifted.add_chips(base.clone(), k);
    let e = effective_representative(m, &lifted)?.ok_or_else(|| {
        Error::Construction("no effective representative in degree at least the genus".into())
    })?;
    let mut r = reduce_away(m, &e, base)?;
    r.add_chips(base.clone(), -k);
    Ok(r)
}

/// Some effective divisor equivalent to `d`, or `None` when there is none.
pub fn effective_representative(m: &MetricGraph, d: &Divisor) -> Result<Option<Divisor>> {
    d.check(m)?;
    let mut current = d.positive_part();
    for (p, &a) in d.negative_part().iter() {
        let r = reduce_away(m, &current, p)?;
        if r.coeff(p) < a {
            return Ok(None);
        }
        current = r;
        current.add_chips(p.clone(), -a);
    }
    Ok(Some(current))
}

pub fn linearly_equivalent(m: &MetricGraph, d1: &Divisor, d2: &Divisor) -> Result<bool> {
    if d1.degree() != d2.degree() {
        return Ok(false);
    }
    let diff = d1 - d2;
    if diff.is_zero() {
        return Ok(true);
    }
    Ok(reduce(m, &diff, &Point::Vertex(0))?.is_zero())
}

/// Rank-determining set used for `d`: vertices of the canonical loopless model
/// together with the support of `d`.
pub fn rank_determining_set(m: &MetricGraph, d: &Divisor) -> Vec<Point> {
    let mut a = model_vertex_points(m);
    for p in d.support() {
        if !a.contains(&p) {
            a.push(p);
        }
    }
    a
}

pub fn rank_at_least(m: &MetricGraph, d: &Divisor, r: usize) -> Result<bool> {
    let Some(e) = effective_representative(m, d)? else {
        return Ok(false);
    };
    if r == 0 {
        return Ok(true);
    }
    if d.degree() < r as i64 {
        return Ok(false);
    }
    let a = rank_determining_set(m, d);
    rank_rec(m, &e, r, &a, 0)
}

/// Every multiset of `r` points of `a` (indices from `start`) can be removed.
fn rank_rec(m: &MetricGraph, e: &Divisor, r: usize, a: &[Point], start: usize) -> Result<bool> {
    for i in start..a.len() {
        let v = &a[i];
        let f = reduce_away(m, e, v)?;
        if f.coeff(v) < 1 {
            return Ok(false);
        }
        if r > 1 {
            let mut next = f;
            next.add_chips(v.clone(), -1);
            if !rank_rec(m, &next, r - 1, a, i)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Baker–Norine rank, bounded above by the degree and, for special degrees,
/// by half the degree.
pub fn rank(m: &MetricGraph, d: &Divisor) -> Result<i64> {
    if !rank_at_least(m, d, 0)? {
        return Ok(-1);
    }
    let deg = d.degree();
    let g = m.genus() as i64;
    let cap = if deg <= 2 * g - 2 { deg / 2 } else { deg };
    let mut r = 0;
    while r < cap && rank_at_least(m, d, (r + 1) as usize)? {
        r += 1;
    }
    Ok(r)
}

/// Equivalent divisor with at most one support point inside each edge of the
/// canonical model, obtained by repeated two-chip tent moves.
pub fn smooth_common_edge(m: &MetricGraph, d: &Divisor) -> Result<Divisor> {
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    d.check(m)?;
    let canon = if m.genus() >= 2 { m.canonical_model()? } else { m.core_model() };
    let c = &canon.model;
    let mut cur = d.push_coarse(&canon.map, m, c);
    loop {
        let mut per_edge: BTreeMap<usize, Vec<Q>> = BTreeMap::new();
        for (p, _) in cur.iter() {
            if let Point::Edge(e, t) = p {
                per_edge.entry(*e).or_default().push(t.clone());
            }
        }
        let Some((&e, ts)) = per_edge.iter().find(|(_, ts)| ts.len() >= 2) else {
            break;
        };
        let s = ts.iter().min().unwrap().clone();
        let t = ts.iter().max().unwrap().clone();
        let l = c.length(e).clone();
        let delta = std::cmp::min(s.clone(), &l - &t);
        cur.add_chips(Point::Edge(e, s.clone()), -1);
        cur.add_chips(Point::Edge(e, t.clone()), -1);
        cur.add_chips(c.point(e, &s - &delta)?, 1);
        cur.add_chips(c.point(e, &t + &delta)?, 1);
    }
    Ok(cur.push_fine(&canon.map, c, m))
}

/// True when `d` has degree `k` and rank at least 1.
pub fn is_divisorially_gonal_witness(m: &MetricGraph, d: &Divisor, k: i64) -> Result<bool> {
    if d.degree() != k {
        return Err(Error::DegreeMismatch {
            expected: k,
            found: d.degree(),
        });
    }
    rank_at_least(m, d, 1)
}

/// Convenience: `Point::Vertex` divisor from vertex multiplicities.
pub fn vertex_divisor(counts: &[(usize, i64)]) -> Divisor {
    Divisor::from_pairs(&counts.iter().map(|&(v, k)| (Point::Vertex(v), k)).collect::<Vec<_>>())
}
