//! Intersection graphs and the exact solvers run on them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::grid::CellSet;

/// Node budget used when the caller does not pick one.
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

/// Environment variable overriding [`DEFAULT_NODE_BUDGET`].
pub const BUDGET_ENV: &str = "GROUNDED_CHI_BUDGET";

pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("exact search exceeded the node budget of {limit}")]
    BudgetExceeded { limit: u64 },
    #[error("relation is not transitive on cuts {0}, {1}, {2}")]
    OrderViolation(usize, usize, usize),
    #[error("graph needs {chi} colors; the planar construction upstream is broken")]
    NotFourColorable { chi: usize },
    #[error("graph is not planar: {0}")]
    NotPlanar(String),
}

/// Simple undirected graph over labelled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionGraph {
    ids: Vec<String>,
    adj: Vec<Vec<bool>>,
}

impl IntersectionGraph {
    /// Vertices are the given regions; edges join regions sharing a cell.
    pub fn from_regions<S: AsRef<str>>(ids: &[S], regions: &[&CellSet]) -> Self {
        assert_eq!(ids.len(), regions.len());
        let n = regions.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if regions[i].intersects(regions[j]) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        IntersectionGraph { ids: ids.iter().map(|s| s.as_ref().to_string()).collect(), adj }
    }

    /// Graph on `0..n` with vertex ids `"0"`, `"1"`, ...
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
        IntersectionGraph { ids: (0..n).map(|i| i.to_string()).collect(), adj }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adj
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().enumerate().filter(|(_, &e)| e).map(|(u, _)| u)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&e| e).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.adj[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Edges as pairs of ids, each pair sorted, the list sorted.
    pub fn id_edges(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .edges()
            .into_iter()
            .map(|(a, b)| {
                let (x, y) = (self.ids[a].clone(), self.ids[b].clone());
                if x <= y { (x, y) } else { (y, x) }
            })
            .collect();
        out.sort();
        out
    }

    /// Subgraph induced on `verts`, keeping their order.
    pub fn induced(&self, verts: &[usize]) -> IntersectionGraph {
        let ids = verts.iter().map(|&v| self.ids[v].clone()).collect();
        let adj = verts
            .iter()
            .map(|&a| verts.iter().map(|&b| self.adj[a][b]).collect())
            .collect();
        IntersectionGraph { ids, adj }
    }

    /// Connected components as sorted vertex lists, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = vec![];
            while let Some(v) = stack.pop() {
                members.push(v);
                for u in self.neighbors(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = id;
                        stack.push(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// BFS distance from `src`; `None` for unreachable vertices.
    pub fn distances(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[src] = Some(0);
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for u in self.neighbors(v) {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for id in &self.ids {
            let _ = writeln!(s, "  \"{id}\";");
        }
        for (a, b) in self.edges() {
            let _ = writeln!(s, "  \"{}\" -- \"{}\";", self.ids[a], self.ids[b]);
        }
        s.push_str("}\n");
        s
    }
}

/// A vertex coloring, indexed like the graph's vertices.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Coloring {
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        Coloring { colors }
    }

    pub fn uniform(n: usize) -> Self {
        Coloring { colors: vec![0; n] }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// One more than the largest color used.
    pub fn palette(&self) -> usize {
        self.colors.iter().max().map_or(0, |m| m + 1)
    }

    /// Number of distinct colors actually used.
    pub fn distinct(&self) -> usize {
        let mut c = self.colors.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn is_proper(&self, g: &IntersectionGraph) -> bool {
        self.colors.len() == g.len() && g.edges().iter().all(|&(a, b)| self.colors[a] != self.colors[b])
    }

    /// Vertices grouped by color, in color order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.palette()];
        for (v, &c) in self.colors.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Renumber colors to `0..distinct` in order of first use.
    pub fn compacted(&self) -> Coloring {
        let mut map = BTreeMap::new();
        let mut next = 0;
        let colors = self
            .colors
            .iter()
            .map(|&c| {
                *map.entry(c).or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Coloring { colors }
    }

    pub fn to_json(&self, ids: &[String]) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            colors: BTreeMap<&'a str, usize>,
            palette: usize,
        }
        let colors = ids.iter().map(String::as_str).zip(self.colors.iter().copied()).collect();
        serde_json::to_value(Out { colors, palette: self.palette() }).expect("coloring serializes")
    }
}

/// All maximal cliques (Bron–Kerbosch with Tomita pivoting). Each clique is
/// sorted; the list is sorted lexicographically.
pub fn maximal_cliques(adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(adj, &mut r, (0..n).collect(), Vec::new(), &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn bron_kerbosch(adj: &[Vec<bool>], r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() {
        if x.is_empty() && !r.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let mut p = p;
    let mut x = x;
    for v in candidates {
        let np = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let nx = x.iter().copied().filter(|&u| adj[v][u]).collect();
        r.push(v);
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// Maximum clique size with a witness (sorted vertex list).
pub fn omega_exact(g: &IntersectionGraph) -> (usize, Vec<usize>) {
    let mut best = Vec::new();
    let mut cur = Vec::new();
    let order: Vec<usize> = (0..g.len()).collect();
    max_clique_branch(g, &mut cur, order, &mut best);
    best.sort_unstable();
    (best.len(), best)
}

fn max_clique_branch(g: &IntersectionGraph, cur: &mut Vec<usize>, cand: Vec<usize>, best: &mut Vec<usize>) {
    if cand.is_empty() {
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        return;
    }
    // greedy coloring bound on the candidate set
    let bound = greedy_color_count(g, &cand);
    if cur.len() + bound <= best.len() {
        return;
    }
    let mut cand = cand;
    while let Some(v) = cand.first().copied() {
        if cur.len() + cand.len() <= best.len() {
            return;
        }
        let next: Vec<usize> = cand.iter().copied().filter(|&u| g.adjacent(v, u)).collect();
        cur.push(v);
        max_clique_branch(g, cur, next, best);
        cur.pop();
        cand.remove(0);
    }
}

fn greedy_color_count(g: &IntersectionGraph, verts: &[usize]) -> usize {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in verts {
        match classes.iter_mut().find(|cl| cl.iter().all(|&u| !g.adjacent(u, v))) {
            Some(cl) => cl.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes.len()
}

/// Saturation-degree greedy coloring (DSATUR), used as an upper bound.
pub fn dsatur_greedy(g: &IntersectionGraph) -> Coloring {
    let n = g.len();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    for _ in 0..n {
        let v = pick_saturated(g, &colors).expect("uncolored vertex remains");
        let mut c = 0;
        while g.neighbors(v).any(|u| colors[u] == Some(c)) {
            c += 1;
        }
        colors[v] = Some(c);
    }
    Coloring::new(colors.into_iter().map(|c| c.unwrap()).collect())
}

fn saturation(g: &IntersectionGraph, colors: &[Option<usize>], v: usize) -> usize {
    let mut seen: Vec<usize> = g.neighbors(v).filter_map(|u| colors[u]).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn pick_saturated(g: &IntersectionGraph, colors: &[Option<usize>]) -> Option<usize> {
    (0..g.len())
        .filter(|&v| colors[v].is_none())
        .max_by(|&a, &b| {
            let ka = (saturation(g, colors, a), g.neighbors(a).filter(|&u| colors[u].is_none()).count());
            let kb = (saturation(g, colors, b), g.neighbors(b).filter(|&u| colors[u].is_none()).count());
            // ties go to the lower index
            ka.cmp(&kb).then(b.cmp(&a))
        })
}

/// Exact chromatic number with the default node budget.
pub fn chi_exact(g: &IntersectionGraph) -> Result<(usize, Coloring), GraphError> {
    chi_exact_with_budget(g, default_budget())
}

/// Exact chromatic number by iterative deepening from the clique bound to the
/// DSATUR bound; each depth is a DSATUR-ordered backtracking search.
pub fn chi_exact_with_budget(g: &IntersectionGraph, budget: u64) -> Result<(usize, Coloring), GraphError> {
    let n = g.len();
    if n == 0 {
        return Ok((0, Coloring::default()));
    }
    let (lower, clique) = omega_exact(g);
    let greedy = dsatur_greedy(g);
    let upper = greedy.palette();
    let mut nodes = 0u64;
    for target in lower..upper {
        if let Some(c) = color_with(g, target, &clique, &mut nodes, budget)? {
            return Ok((target, c));
        }
    }
    Ok((upper, greedy))
}

/// Proper coloring with at most `k` colors, if one exists.
pub fn k_coloring(g: &IntersectionGraph, k: usize, budget: u64) -> Result<Option<Coloring>, GraphError> {
    let (_, clique) = omega_exact(g);
    let mut nodes = 0;
    color_with(g, k, &clique, &mut nodes, budget)
}

fn color_with(
    g: &IntersectionGraph,
    k: usize,
    clique: &[usize],
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Coloring>, GraphError> {
    let n = g.len();
    if clique.len() > k {
        return Ok(None);
    }
    let mut colors: Vec<Option<usize>> = vec![None; n];
    // counts[v][c] = neighbours of v holding color c
    let mut counts = vec![vec![0u32; k.max(1)]; n];
    let mut used = 0;
    for (c, &v) in clique.iter().enumerate() {
        assign(g, &mut colors, &mut counts, v, c);
        used = c + 1;
    }
    if backtrack(g, k, &mut colors, &mut counts, used, nodes, budget)? {
        Ok(Some(Coloring::new(colors.into_iter().map(|c| c.unwrap()).collect())))
    } else {
        Ok(None)
    }
}

fn assign(g: &IntersectionGraph, colors: &mut [Option<usize>], counts: &mut [Vec<u32>], v: usize, c: usize) {
    colors[v] = Some(c);
    for u in g.neighbors(v) {
        counts[u][c] += 1;
    }
}

fn unassign(g: &IntersectionGraph, colors: &mut [Option<usize>], counts: &mut [Vec<u32>], v: usize, c: usize) {
    colors[v] = None;
    for u in g.neighbors(v) {
        counts[u][c] -= 1;
    }
}

fn backtrack(
    g: &IntersectionGraph,
    k: usize,
    colors: &mut Vec<Option<usize>>,
    counts: &mut Vec<Vec<u32>>,
    used: usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<bool, GraphError> {
    let mut pick: Option<(usize, usize, usize)> = None;
    for v in 0..g.len() {
        if colors[v].is_some() {
            continue;
        }
        let sat = counts[v].iter().filter(|&&c| c > 0).count();
        if sat >= k {
            return Ok(false);
        }
        let deg = g.neighbors(v).filter(|&u| colors[u].is_none()).count();
        let better = match pick {
            None => true,
            Some((_, s, d)) => (sat, deg) > (s, d),
        };
        if better {
            pick = Some((v, sat, deg));
        }
    }
    let Some((v, _, _)) = pick else {
        return Ok(true);
    };
    let limit = (used + 1).min(k);
    for c in 0..limit {
        if counts[v][c] > 0 {
            continue;
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(GraphError::BudgetExceeded { limit: budget });
        }
        assign(g, colors, counts, v, c);
        if backtrack(g, k, colors, counts, used.max(c + 1), nodes, budget)? {
            return Ok(true);
        }
        unassign(g, colors, counts, v, c);
    }
    Ok(false)
}

/// Left-endpoint greedy coloring of closed integer intervals `(lo, hi)`.
/// Uses exactly as many colors as the maximum point load.
pub fn interval_coloring(intervals: &[(i32, i32)]) -> Coloring {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by_key(|&i| (intervals[i].0, intervals[i].1, i));
    let mut last_end: Vec<i32> = Vec::new();
    let mut colors = vec![0; intervals.len()];
    for i in order {
        let (lo, hi) = intervals[i];
        match last_end.iter().position(|&e| e < lo) {
            Some(c) => {
                last_end[c] = hi;
                colors[i] = c;
            }
            None => {
                colors[i] = last_end.len();
                last_end.push(hi);
            }
        }
    }
    Coloring::new(colors)
}

/// Maximum number of intervals sharing a point.
pub fn interval_max_load(intervals: &[(i32, i32)]) -> usize {
    let mut events: Vec<(i32, i32)> = Vec::new();
    for &(lo, hi) in intervals {
        events.push((lo, 1));
        events.push((hi + 1, -1));
    }
    // closings at a coordinate are processed before openings
    events.sort_by_key(|&(x, d)| (x, d));
    let (mut cur, mut best) = (0i32, 0i32);
    for (_, d) in events {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

/// Colors sets listed in left-to-right order so that same-colored sets are
/// pairwise disjoint, using exactly as many colors as the largest pairwise
/// intersecting subfamily.
///
/// `i < j` (in list order) and disjoint is a strict partial order whose
/// incomparability graph is the intersection graph; color classes are the
/// chains of a minimum chain cover, found by bipartite matching.
pub fn pillar_order_coloring(cuts: &[CellSet]) -> Result<Coloring, GraphError> {
    let n = cuts.len();
    let mut less = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            less[i][j] = !cuts[i].intersects(&cuts[j]);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !less[i][j] {
                continue;
            }
            for l in j + 1..n {
                if less[j][l] && !less[i][l] {
                    return Err(GraphError::OrderViolation(i, j, l));
                }
            }
        }
    }
    // successor[i] = next element of i's chain
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut succ: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        augment(i, &less, &mut seen, &mut pred, &mut succ);
    }
    let mut colors = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if pred[start].is_some() {
            continue;
        }
        let mut v = Some(start);
        while let Some(u) = v {
            colors[u] = next;
            v = succ[u];
        }
        next += 1;
    }
    Ok(Coloring::new(colors))
}

fn augment(
    u: usize,
    less: &[Vec<bool>],
    seen: &mut [bool],
    pred: &mut [Option<usize>],
    succ: &mut [Option<usize>],
) -> bool {
    for v in 0..less.len() {
        if !less[u][v] || seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match pred[v] {
            None => true,
            Some(w) => augment(w, less, seen, pred, succ),
        };
        if free {
            if let Some(old) = succ[u] {
                if pred[old] == Some(u) {
                    pred[old] = None;
                }
            }
            pred[v] = Some(u);
            succ[u] = Some(v);
            return true;
        }
    }
    false
}

/// Proper coloring with at most four colors by exact search.
///
/// Runs a cheap planarity screen first: the edge bound `|E| <= 3|V| - 6` and,
/// after stripping low-degree vertices, a search for a K5 or K3,3 subgraph.
pub fn planar_color(g: &IntersectionGraph) -> Result<Coloring, GraphError> {
    planarity_screen(g)?;
    let (chi, coloring) = chi_exact(g)?;
    if chi > 4 {
        return Err(GraphError::NotFourColorable { chi });
    }
    Ok(coloring)
}

pub fn planarity_screen(g: &IntersectionGraph) -> Result<(), GraphError> {
    let (n, e) = (g.len(), g.edge_count());
    if n >= 3 && e > 3 * n - 6 {
        return Err(GraphError::NotPlanar(format!("{e} edges on {n} vertices exceeds 3n-6")));
    }
    let core = reduce_for_kuratowski(g);
    if core.len() <= 12 {
        if let Some(w) = find_k5(&core) {
            return Err(GraphError::NotPlanar(format!("K5 on reduced vertices {w:?}")));
        }
        if let Some(w) = find_k33(&core) {
            return Err(GraphError::NotPlanar(format!("K3,3 on reduced vertices {w:?}")));
        }
    }
    Ok(())
}

/// Adjacency of a topological minor of `g`: degree <= 1 vertices dropped,
/// degree-2 vertices smoothed (or dropped when their neighbours are already
/// adjacent).
fn reduce_for_kuratowski(g: &IntersectionGraph) -> Vec<Vec<bool>> {
    let mut adj: Vec<Vec<bool>> = g.adjacency().to_vec();
    let n = adj.len();
    let mut alive = vec![true; n];
    loop {
        let mut changed = false;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
            if nb.len() <= 2 {
                if nb.len() == 2 && !adj[nb[0]][nb[1]] {
                    adj[nb[0]][nb[1]] = true;
                    adj[nb[1]][nb[0]] = true;
                }
                alive[v] = false;
                for u in nb {
                    adj[v][u] = false;
                    adj[u][v] = false;
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    keep.iter().map(|&a| keep.iter().map(|&b| adj[a][b]).collect()).collect()
}

fn find_k5(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut pick = Vec::new();
    fn rec(adj: &[Vec<bool>], start: usize, pick: &mut Vec<usize>) -> bool {
        if pick.len() == 5 {
            return true;
        }
        for v in start..adj.len() {
            if pick.iter().all(|&u| adj[u][v]) {
                pick.push(v);
                if rec(adj, v + 1, pick) {
                    return true;
                }
                pick.pop();
            }
        }
        false
    }
    if n >= 5 && rec(adj, 0, &mut pick) { Some(pick) } else { None }
}

fn find_k33(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = adj.len();
    if n < 6 {
        return None;
    }
    let triples: Vec<[usize; 3]> = (0..n)
        .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
        .collect();
    for left in &triples {
        for right in &triples {
            if right.iter().any(|r| left.contains(r)) || left[0] > right[0] {
                continue;
            }
            if left.iter().all(|&l| right.iter().all(|&r| adj[l][r])) {
                return Some(left.iter().chain(right.iter()).copied().collect());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> IntersectionGraph {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        IntersectionGraph::from_edges(n, &edges)
    }

    fn cycle(n: usize) -> IntersectionGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        IntersectionGraph::from_edges(n, &edges)
    }

    #[test]
    fn omega_small_graphs() {
        assert_eq!(omega_exact(&IntersectionGraph::from_edges(0, &[])).0, 0);
        assert_eq!(omega_exact(&complete(4)), (4, vec![0, 1, 2, 3]));
        let (w, c) = omega_exact(&cycle(5));
        assert_eq!(w, 2);
        assert!(cycle(5).adjacent(c[0], c[1]));
    }

    #[test]
    fn chi_small_graphs() {
        assert_eq!(chi_exact(&IntersectionGraph::from_edges(0, &[])).unwrap().0, 0);
        let (k, c) = chi_exact(&complete(4)).unwrap();
        assert_eq!(k, 4);
        assert!(c.is_proper(&complete(4)));
        let (k, c) = chi_exact(&cycle(5)).unwrap();
        assert_eq!(k, 3);
        assert!(c.is_proper(&cycle(5)));
        assert_eq!(chi_exact(&cycle(6)).unwrap().0, 2);
    }

    #[test]
    fn budget_is_enforced() {
        // Mycielski graph of C5 (Grötzsch): chi = 4, omega = 2
        let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        for i in 0..5 {
            for j in [(i + 1) % 5, (i + 4) % 5] {
                edges.push((5 + i, j));
            }
            edges.push((5 + i, 10));
        }
        let g = IntersectionGraph::from_edges(11, &edges);
        assert_eq!(chi_exact(&g).unwrap().0, 4);
        assert_eq!(chi_exact_with_budget(&g, 3), Err(GraphError::BudgetExceeded { limit: 3 }));
    }

    #[test]
    fn interval_coloring_matches_load() {
        assert_eq!(interval_coloring(&[(0, 1), (3, 4)]).palette(), 1);
        assert_eq!(interval_coloring(&[(0, 10), (2, 8), (4, 6)]).palette(), 3);
        let stairs = [(0, 2), (2, 4), (4, 6), (6, 8)];
        assert_eq!(interval_coloring(&stairs).palette(), 2);
        assert_eq!(interval_max_load(&stairs), 2);
    }

    #[test]
    fn pillar_order_extremes() {
        let disjoint: Vec<CellSet> = (0..3).map(|i| CellSet::rect(3 * i, 3 * i, 0, 2)).collect();
        assert_eq!(pillar_order_coloring(&disjoint).unwrap().palette(), 1);
        let shared: Vec<CellSet> = (0..3).map(|i| CellSet::rect(i, 5, i, i).union(&CellSet::rect(5, 5, 0, 3))).collect();
        assert_eq!(pillar_order_coloring(&shared).unwrap().palette(), 3);
    }

    #[test]
    fn pillar_order_detects_intransitivity() {
        // 0 and 2 overlap while 1 sits between them disjoint from both
        let a = CellSet::rect(0, 0, 0, 3).union(&CellSet::rect(0, 6, 3, 3));
        let b = CellSet::rect(3, 3, 0, 1);
        let c = CellSet::rect(6, 6, 0, 3);
        assert_eq!(pillar_order_coloring(&[a, b, c]), Err(GraphError::OrderViolation(0, 1, 2)));
    }

    #[test]
    fn planar_color_cases() {
        let tree = IntersectionGraph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)]);
        assert_eq!(planar_color(&tree).unwrap().palette(), 2);
        assert_eq!(planar_color(&complete(4)).unwrap().palette(), 4);
        assert!(matches!(planar_color(&complete(5)), Err(GraphError::NotPlanar(_))));
        let k33 = IntersectionGraph::from_edges(
            6,
            &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)],
        );
        assert!(matches!(planar_color(&k33), Err(GraphError::NotPlanar(_))));
    }

    #[test]
    fn dot_export_lists_edges() {
        let dot = IntersectionGraph::from_regions(
            &["A", "B"],
            &[&CellSet::rect(0, 2, 0, 0), &CellSet::rect(2, 4, 0, 0)],
        )
        .to_dot();
        assert!(dot.contains("\"A\" -- \"B\""));
    }
}
