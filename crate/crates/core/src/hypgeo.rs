//! Finite graphs as hyperbolic spaces: distances, the four-point constant,
//! logarithmic neighborhood bounds, excursions of cycle arcs, and a
//! constructive finder for short-cut subsegments of long cycles.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspec::FunctionSpec;
use crate::rational::{floor_rational, fmt_rational, int, log2, Enclosure, Rational};

/// Connected graph with unit edges and all-pairs distances.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    labels: Vec<u64>,
    index: BTreeMap<u64, usize>,
    adj: Vec<Vec<usize>>,
    dist: Vec<u32>,
}

impl MetricGraph {
    /// Vertices are the labels occurring in `edges`, indexed in increasing
    /// label order. Loops and repeated edges are ignored.
    pub fn from_edges(edges: &[(u64, u64)]) -> Result<MetricGraph> {
        let mut index = BTreeMap::new();
        for &(u, v) in edges {
            index.insert(u, 0);
            index.insert(v, 0);
        }
        let labels: Vec<u64> = index.keys().copied().collect();
        for (i, l) in labels.iter().enumerate() {
            index.insert(*l, i);
        }
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            let (a, b) = (index[&u], index[&v]);
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| bfs(&adj, s)).collect();
        if rows.iter().any(|r| r.contains(&u32::MAX)) {
            return Err(Error::Input("graph is not connected".into()));
        }
        let dist = rows.concat();
        Ok(MetricGraph { labels, index, adj, dist })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn d(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.len() + b]
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    pub fn label(&self, a: usize) -> u64 {
        self.labels[a]
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.index.get(&label).copied()
    }

    pub fn edges(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for (a, l) in self.adj.iter().enumerate() {
            for &b in l {
                if a < b {
                    out.push((self.labels[a], self.labels[b]));
                }
            }
        }
        out
    }

    /// The geodesic from `x` to `y` with lexicographically least vertex
    /// sequence (by vertex index).
    pub fn geodesic(&self, x: usize, y: usize) -> Vec<usize> {
        let mut path = vec![x];
        let mut cur = x;
        while cur != y {
            let want = self.d(cur, y) - 1;
            cur = *self.adj[cur].iter().find(|&&v| self.d(v, y) == want).expect("connected");
            path.push(cur);
        }
        path
    }

    /// Each edge replaced by a path of `k` edges. Original vertices keep
    /// their labels multiplied by `k`; new vertices fill the gaps with labels
    /// past the largest one. Returns the map from old to new indices.
    pub fn subdivide(&self, k: u64) -> Result<(MetricGraph, Vec<usize>)> {
        assert!(k >= 1);
        let base = (self.labels.iter().max().copied().unwrap_or(0) + 1) * k;
        let mut next = base;
        let mut edges = Vec::new();
        for (u, v) in self.edges() {
            let mut prev = u * k;
            for _ in 1..k {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, v * k));
        }
        if edges.is_empty() {
            edges.extend(self.labels.iter().map(|&l| (l * k, l * k)));
        }
        let g = MetricGraph::from_edges(&edges)?;
        let map = self.labels.iter().map(|&l| g.index_of(l * k).unwrap()).collect();
        Ok((g, map))
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<u32> {
    let mut d = vec![u32::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v] == u32::MAX {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    d
}

fn parse_label(tok: &str, line: usize, col: usize) -> Result<u64> {
    tok.parse::<u64>()
        .map_err(|_| Error::parse(line, col, format!("expected a vertex label, found `{tok}`")))
}

/// Tokens of a line with their 1-based columns, stopping at `#`.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

/// Edge list: one `u v` pair per line, `#` starts a comment.
pub fn parse_graph(src: &str) -> Result<MetricGraph> {
    let mut edges = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        let toks = tokens(line);
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            let col = toks.get(2).map_or(toks[0].0, |t| t.0);
            return Err(Error::parse(ln + 1, col, "expected exactly two vertex labels"));
        }
        edges.push((parse_label(toks[0].1, ln + 1, toks[0].0)?, parse_label(toks[1].1, ln + 1, toks[1].0)?));
    }
    if edges.is_empty() {
        return Err(Error::Input("graph has no edges".into()));
    }
    MetricGraph::from_edges(&edges)
}

/// A closed 1-Lipschitz vertex sequence `v_0 ... v_{n-1}`; the step from
/// `v_{n-1}` back to `v_0` is part of the cycle, so `|C| = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedCycle {
    pub vertices: Vec<usize>,
}

impl EmbeddedCycle {
    pub fn new(vertices: Vec<usize>, g: &MetricGraph) -> Result<EmbeddedCycle> {
        if vertices.is_empty() {
            return Err(Error::Input("empty cycle".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if g.d(a, b) > 1 {
                return Err(Error::Input(format!(
                    "cycle steps from {} to {} at position {i}, which are not adjacent",
                    g.label(a),
                    g.label(b)
                )));
            }
        }
        Ok(EmbeddedCycle { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn at(&self, i: usize) -> usize {
        self.vertices[i % self.len()]
    }

    /// The same cycle in `g.subdivide(k)`.
    pub fn subdivided(&self, fine: &MetricGraph, map: &[usize]) -> Result<EmbeddedCycle> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            let (a, b) = (map[self.vertices[i]], map[self.vertices[(i + 1) % n]]);
            out.extend(fine.geodesic(a, b));
            out.pop();
        }
        EmbeddedCycle::new(out, fine)
    }
}

/// Whitespace-separated vertex labels; `#` starts a comment.
pub fn parse_cycle(src: &str, g: &MetricGraph) -> Result<EmbeddedCycle> {
    let mut vs = Vec::new();
    for (ln, line) in src.lines().enumerate() {
        for (col, tok) in tokens(line) {
            let l = parse_label(tok, ln + 1, col)?;
            let v = g
                .index_of(l)
                .ok_or_else(|| Error::parse(ln + 1, col, format!("vertex {l} is not in the graph")))?;
            vs.push(v);
        }
    }
    EmbeddedCycle::new(vs, g)
}

/// The least `delta` with `(x|z)_w >= min((x|y)_w, (y|z)_w) - delta` for all
/// quadruples, i.e. half the largest gap between the two largest of the
/// three pair sums.
pub fn compute_delta(g: &MetricGraph) -> Rational {
    let diam = g.dist.iter().copied().max().unwrap_or(0);
    // Pair sums stay below 2^15, so the narrow lanes cannot overflow.
    let twice = if diam < 1 << 14 {
        let narrow: Vec<i16> = g.dist.iter().map(|&d| d as i16).collect();
        four_point_gap(&narrow, g.len()) as u32
    } else {
        four_point_gap(&g.dist, g.len())
    };
    Rational::new(twice as i128, 2)
}

/// Largest `(largest - second largest)` of the three pair sums over all quadruples.
fn four_point_gap<T>(dist: &[T], n: usize) -> T
where
    T: Copy + Ord + Default + Send + Sync + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let row = |v: usize| &dist[v * n..(v + 1) * n];
    (0..n)
        .into_par_iter()
        .map(|x| {
            let dx = row(x);
            let mut best = T::default();
            for y in x + 1..n {
                let dy = row(y);
                let dxy = dx[y];
                for z in y + 1..n {
                    let dz = &row(z)[z + 1..];
                    let (dxz, dyz) = (dx[z], dy[z]);
                    let (dxw, dyw) = (&dx[z + 1..], &dy[z + 1..]);
                    let gap = dz
                        .iter()
                        .zip(dyw)
                        .zip(dxw)
                        .map(|((&zw, &yw), &xw)| {
                            let (hi, mid) = top_two(dxy + zw, dxz + yw, xw + dyz);
                            hi - mid
                        })
                        .fold(T::default(), T::max);
                    best = best.max(gap);
                }
            }
            best
        })
        .max()
        .unwrap_or_default()
}

/// Largest and median of three values.
#[inline]
fn top_two<T: Copy + Ord>(a: T, b: T, c: T) -> (T, T) {
    let (lo, hi) = (a.min(b), a.max(b));
    (hi.max(c), lo.max(hi.min(c)))
}

/// `f(n) = delta log2(n) + 1` and `f'(n) = f(n + f(n)) + f(n)`.
pub fn neighborhood_bounds(n: u64, delta: Rational) -> (Enclosure, Enclosure) {
    assert!(n >= 1);
    let f = |x: Rational| log2(x).scale(delta).add(Enclosure::exact(int(1)));
    let fnv = f(int(n as i128));
    let lo = f(int(n as i128) + fnv.lo);
    let hi = f(int(n as i128) + fnv.hi);
    let fp = Enclosure { lo: lo.lo, hi: hi.hi }.add(fnv);
    (fnv, fp)
}

/// Largest integer distance certainly within the enclosed radius.
fn radius(d: Enclosure) -> u32 {
    floor_rational(&d.lo).max(0) as u32
}

#[derive(Clone, Debug, Serialize)]
pub struct NeighborhoodReport {
    pub pass: bool,
    /// Largest distance from a geodesic vertex to the path.
    #[serde(rename = "maxDistance")]
    pub max_distance: u32,
}

/// Whether the chosen geodesic between the path's endpoints lies in the
/// closed `D`-neighborhood of the path.
pub fn check_lipschitz_neighborhood(g: &MetricGraph, path: &[usize], d: Rational) -> Result<NeighborhoodReport> {
    if path.is_empty() {
        return Err(Error::Input("empty path".into()));
    }
    if path.windows(2).any(|w| g.d(w[0], w[1]) > 1) {
        return Err(Error::Input("path is not 1-Lipschitz".into()));
    }
    let geo = g.geodesic(path[0], path[path.len() - 1]);
    let max_distance = geo
        .iter()
        .map(|&v| path.iter().map(|&p| g.d(v, p)).min().unwrap())
        .max()
        .unwrap_or(0);
    Ok(NeighborhoodReport { pass: int(max_distance as i128) <= d, max_distance })
}

/// A maximal run of arc vertices outside the closed ball `B_D(z)`, given by
/// the arc indices of its two boundary vertices (both inside the ball).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Excursion {
    pub start: usize,
    pub end: usize,
}

impl Excursion {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// The `z`-excursions of the vertex sequence `arc` for the integer radius `d`.
pub fn find_excursions(g: &MetricGraph, arc: &[usize], z: usize, d: u32) -> Vec<Excursion> {
    let mut out = Vec::new();
    let mut last_inside: Option<usize> = None;
    for (i, &v) in arc.iter().enumerate() {
        if g.d(v, z) <= d {
            if let Some(s) = last_inside {
                if i > s + 1 {
                    out.push(Excursion { start: s, end: i });
                }
            }
            last_inside = Some(i);
        }
    }
    out
}

/// Cycle positions `start, start+1, ..., start+len` (mod `|C|`).
pub fn cycle_arc(c: &EmbeddedCycle, start: usize, len: usize) -> Vec<usize> {
    (0..=len).map(|k| c.at(start + k)).collect()
}

/// Right-hand side `12 f(n) + 3 delta + f'(n) + 3` of the growth requirement on `g`.
pub fn growth_requirement(n: u64, delta: Rational) -> Enclosure {
    let (f, fp) = neighborhood_bounds(n, delta);
    f.scale(int(12))
        .add(fp)
        .add(Enclosure::exact(delta * int(3) + int(3)))
}

/// Default upper end of the scan certifying `g(n) >= 12 f(n) + 3 delta + f'(n) + 3`.
pub const DEFAULT_HORIZON: u64 = 1 << 16;

/// Least `N >= 2` such that `g(n)` certainly dominates the growth requirement
/// for every `n` in `[N, horizon]`. Results are memoized per process.
pub fn required_n(delta: Rational, g: &FunctionSpec, horizon: u64) -> Result<u64> {
    type Key = (Rational, String, u64);
    static CACHE: OnceLock<Mutex<HashMap<Key, u64>>> = OnceLock::new();
    let key = (delta, g.to_string(), horizon);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&n) = cache.lock().unwrap().get(&key) {
        return Ok(n);
    }
    let n = scan_required_n(delta, g, horizon)?;
    cache.lock().unwrap().insert(key, n);
    Ok(n)
}

fn scan_required_n(delta: Rational, g: &FunctionSpec, horizon: u64) -> Result<u64> {
    let mut n = horizon;
    loop {
        let ok = match g.eval(n) {
            Ok(v) => v.lo >= growth_requirement(n, delta).hi,
            Err(_) => false,
        };
        if !ok {
            if n == horizon {
                return Err(Error::Input(format!(
                    "g = {g} does not dominate 12f + 3delta + f' + 3 at the horizon n = {horizon} (delta = {})",
                    fmt_rational(&delta)
                )));
            }
            return Ok((n + 1).max(2));
        }
        if n <= 2 {
            return Ok(2);
        }
        n -= 1;
    }
}

/// A subsegment of a cycle: positions `start .. start + length` (mod `|C|`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsegmentWitness {
    pub start: usize,
    pub end: usize,
    pub length: usize,
    #[serde(rename = "endpointDistance")]
    pub endpoint_distance: u32,
    #[serde(rename = "gValue")]
    pub g_value: Enclosure,
    pub l: u64,
    pub u: u64,
    pub valid: bool,
}

/// Builds and independently validates the witness for `start, length`.
pub fn validate_witness(
    c: &EmbeddedCycle,
    g: &MetricGraph,
    start: usize,
    length: usize,
    u: u64,
    l: u64,
    gf: &FunctionSpec,
) -> Result<SubsegmentWitness> {
    let n = c.len();
    let gv = gf.eval(n as u64)?;
    let end = (start + length) % n;
    let dist = g.d(c.at(start), c.at(start + length));
    let len_r = int(length as i128);
    let valid = length <= n
        && Rational::new(n as i128, l as i128) <= len_r
        && len_r <= Rational::new(n as i128, u as i128)
        && gv.certainly_ge(int(dist as i128));
    Ok(SubsegmentWitness {
        start: start % n,
        end,
        length,
        endpoint_distance: dist,
        g_value: gv,
        l,
        u,
        valid,
    })
}

/// Scans every subsegment (by start, then increasing length) and returns the
/// first one satisfying both inequalities.
pub fn exhaustive_subsegment_oracle(
    c: &EmbeddedCycle,
    g: &MetricGraph,
    u: u64,
    l: u64,
    gf: &FunctionSpec,
) -> Result<Option<SubsegmentWitness>> {
    let n = c.len();
    let gv = gf.eval(n as u64)?;
    if gv.lo < Rational::from_integer(0) {
        return Ok(None);
    }
    let bound = floor_rational(&gv.lo) as u64;
    let lo = (n as u64).div_ceil(l) as usize;
    let hi = ((n as u64) / u) as usize;
    for s in 0..n {
        for len in lo..=hi.min(n) {
            if (g.d(c.at(s), c.at(s + len)) as u64) <= bound {
                let w = validate_witness(c, g, s, len, u, l, gf)?;
                if w.valid {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

/// Diagnostics of a run of the constructive finder.
#[derive(Clone, Debug, Serialize)]
pub struct FinderTrace {
    pub delta: String,
    #[serde(rename = "requiredN")]
    pub required_n: u64,
    pub d: u32,
    #[serde(rename = "dPrime")]
    pub d_prime: u32,
    /// Lengths of the arcs visited by the recursion, starting with `|C|`.
    pub arcs: Vec<usize>,
    /// `diameter`, `longer-side` or `shorter-side`: which side's anchor
    /// starts the returned subsegment.
    pub outcome: String,
}

/// Constructive short-subsegment finder with `L = 32U`; computes `delta`.
pub fn find_short_subsegment(
    c: &EmbeddedCycle,
    g: &MetricGraph,
    u: u64,
    gf: &FunctionSpec,
) -> Result<(SubsegmentWitness, FinderTrace)> {
    let delta = compute_delta(g);
    find_short_subsegment_with_delta(c, g, u, gf, delta, DEFAULT_HORIZON)
}

/// One side of the split arc: vertices from `x_i` to `y` and the map back to
/// indices of the current arc.
struct Side {
    verts: Vec<usize>,
    to_arc: Vec<usize>,
    geo: Vec<usize>,
}

impl Side {
    fn len(&self) -> usize {
        self.verts.len() - 1
    }

    /// Index on the side and geodesic vertex realizing the distance to the geodesic.
    fn nearest_geo(&self, g: &MetricGraph, k: usize) -> (u32, usize) {
        let v = self.verts[k];
        self.geo
            .iter()
            .enumerate()
            .map(|(j, &z)| (g.d(v, z), j))
            .min()
            .unwrap()
    }
}

/// As [`find_short_subsegment`] with a supplied hyperbolicity constant and
/// the horizon used to certify the threshold `N`.
pub fn find_short_subsegment_with_delta(
    c: &EmbeddedCycle,
    g: &MetricGraph,
    u: u64,
    gf: &FunctionSpec,
    delta: Rational,
    horizon: u64,
) -> Result<(SubsegmentWitness, FinderTrace)> {
    if u == 0 {
        return Err(Error::Input("U must be at least 1".into()));
    }
    let n = c.len();
    let l = 32 * u;
    let need = required_n(delta, gf, horizon.max(n as u64))?;
    if (n as u64) < need {
        return Err(Error::Precondition(format!(
            "cycle length {n} is below the required N = {need} for delta = {} and g = {gf}",
            fmt_rational(&delta)
        )));
    }
    let (f, fp) = neighborhood_bounds(n as u64, delta);
    let dd = radius(f);
    let ddp = radius(fp);
    let gv = gf.eval(n as u64)?;
    let g_int = floor_rational(&gv.lo).max(0) as u32;
    let m1 = 4 * u as usize;
    let m2 = 16 * u as usize;
    let step = n.div_ceil(m2);
    let mut trace = FinderTrace {
        delta: fmt_rational(&delta),
        required_n: need,
        d: dd,
        d_prime: ddp,
        arcs: Vec::new(),
        outcome: String::new(),
    };
    let finish = |start: usize, len: usize, trace: FinderTrace| -> Result<(SubsegmentWitness, FinderTrace)> {
        let w = validate_witness(c, g, start, len, u, l, gf)?;
        if !w.valid {
            return Err(Error::Internal(format!(
                "constructed subsegment start={start} length={len} distance={} fails the bounds",
                w.endpoint_distance
            )));
        }
        Ok((w, trace))
    };

    // Current arc: cycle positions start .. start + len.
    let (mut a_start, mut a_len) = (0usize, n);
    for _ in 0..=n {
        trace.arcs.push(a_len);
        let arc = cycle_arc(c, a_start, a_len);
        let far = |v: usize| arc.iter().any(|&w| g.d(v, w) > g_int);
        if !arc.iter().any(|&v| far(v)) {
            trace.outcome = "diameter".into();
            return finish(a_start, step, trace);
        }
        let last = arc[a_len];
        let ky = (0..=a_len).max_by_key(|&k| (g.d(last, arc[k]), std::cmp::Reverse(k))).unwrap();
        let side = |from_left: bool| -> Side {
            let to_arc: Vec<usize> = if from_left {
                (0..=ky).collect()
            } else {
                (ky..=a_len).rev().collect()
            };
            let verts: Vec<usize> = to_arc.iter().map(|&k| arc[k]).collect();
            let geo = g.geodesic(verts[0], arc[ky]);
            Side { verts, to_arc, geo }
        };
        let mut sides = [side(true), side(false)];

        // A long excursion: recurse on it.
        let mut next = None;
        'search: for s in &sides {
            for &z in &s.geo {
                for e in find_excursions(g, &s.verts, z, dd) {
                    if e.len() * m1 >= n && e.len() < a_len {
                        let (p, q) = (s.to_arc[e.start], s.to_arc[e.end]);
                        next = Some((p.min(q), p.max(q) - p.min(q)));
                        break 'search;
                    }
                }
            }
        }
        if let Some((off, len)) = next {
            a_start += off;
            a_len = len;
            continue;
        }

        if sides[1].len() > sides[0].len() {
            sides.swap(0, 1);
        }
        let y = arc[ky];
        // (a_i', u_i) as (side index, geodesic index).
        let anchor = |s: &Side, first: bool| -> (usize, usize) {
            if !first && s.len() < step {
                return (0, 0);
            }
            let ka = s.len().saturating_sub(step);
            let (dist, j) = s.nearest_geo(g, ka);
            if dist <= dd {
                return (ka, j);
            }
            for (zj, &z) in s.geo.iter().enumerate() {
                for e in find_excursions(g, &s.verts, z, dd) {
                    if e.start < ka && ka < e.end {
                        return (e.start, zj);
                    }
                }
            }
            // Discrete fallback: the last vertex before a_i within D of the geodesic.
            let k = (0..ka).rev().find(|&k| s.nearest_geo(g, k).0 <= dd).unwrap_or(0);
            (k, s.nearest_geo(g, k).1)
        };
        let anchors = [anchor(&sides[0], true), anchor(&sides[1], false)];
        let dy = |i: usize| g.d(y, sides[i].geo[anchors[i].1]);
        let (p, q) = if dy(0) <= dy(1) + 2 * dd { (0, 1) } else { (1, 0) };
        let shift = int(dy(p) as i128) - int(2 * dd as i128) - delta;
        let t = floor_rational(&shift).max(0) as usize;
        let gq = &sides[q].geo;
        let u_prime = gq[gq.len() - 1 - t.min(gq.len() - 1)];
        let kq = (anchors[q].0..=sides[q].len())
            .min_by_key(|&k| (g.d(sides[q].verts[k], u_prime), k))
            .unwrap();
        let (i1, i2) = (sides[p].to_arc[anchors[p].0], sides[q].to_arc[kq]);
        let (lo, hi) = (i1.min(i2), i1.max(i2));
        trace.outcome = if p == 0 { "longer-side".into() } else { "shorter-side".into() };
        return finish(a_start + lo, hi - lo, trace);
    }
    Err(Error::Internal("recursion did not terminate within |C| steps".into()))
}
