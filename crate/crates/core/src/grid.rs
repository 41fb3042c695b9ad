//! Discrete topology of the closed upper half-plane.
//!
//! Sets are finite collections of unit cells; connectivity is 4-adjacency
//! both for the sets themselves and for their complements. A 4-connected
//! barrier can never be slipped through by a 4-path, so two 4-connected sets
//! "cross" only by sharing a cell. Unbounded complement components are
//! decided inside a finite [`Frame`] that keeps a one-cell margin around
//! everything in play.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::maximal_cliques;

/// A unit cell. Row 0 is the baseline.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    /// The four orthogonal neighbours, in a fixed order (left, right, down, up).
    pub fn neighbors(self) -> [Cell; 4] {
        [
            Cell::new(self.x - 1, self.y),
            Cell::new(self.x + 1, self.y),
            Cell::new(self.x, self.y - 1),
            Cell::new(self.x, self.y + 1),
        ]
    }

    pub fn is_adjacent(self, other: Cell) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }

    pub fn on_baseline(self) -> bool {
        self.y == 0
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

// Row-major: rows bottom to top, then columns left to right.
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: i32,
    pub max_x: i32,
    pub min_y: i32,
    pub max_y: i32,
}

/// A finite set of cells with its bounding box kept alongside.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct CellSet {
    cells: BTreeSet<Cell>,
    bbox: Option<BBox>,
}

impl CellSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_coords(coords: &[(i32, i32)]) -> Self {
        coords.iter().map(|&(x, y)| Cell::new(x, y)).collect()
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`, inclusive.
    pub fn rect(x0: i32, x1: i32, y0: i32, y1: i32) -> Self {
        let mut s = CellSet::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                s.insert(Cell::new(x, y));
            }
        }
        s
    }

    pub fn insert(&mut self, c: Cell) -> bool {
        let fresh = self.cells.insert(c);
        if fresh {
            self.bbox = Some(match self.bbox {
                None => BBox { min_x: c.x, max_x: c.x, min_y: c.y, max_y: c.y },
                Some(b) => BBox {
                    min_x: b.min_x.min(c.x),
                    max_x: b.max_x.max(c.x),
                    min_y: b.min_y.min(c.y),
                    max_y: b.max_y.max(c.y),
                },
            });
        }
        fresh
    }

    pub fn remove(&mut self, c: Cell) -> bool {
        let hit = self.cells.remove(&c);
        if hit {
            self.recompute_bbox();
        }
        hit
    }

    fn recompute_bbox(&mut self) {
        self.bbox = None;
        let cells = std::mem::take(&mut self.cells);
        for c in cells {
            self.insert(c);
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        self.cells.contains(&c)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }

    pub fn bbox(&self) -> Option<BBox> {
        self.bbox
    }

    pub fn first(&self) -> Option<Cell> {
        self.cells.first().copied()
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        for c in small.iter() {
            out.insert(c);
        }
        out
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().filter(|&c| big.contains(c)).collect()
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.iter().filter(|&c| !other.contains(c)).collect()
    }

    pub fn intersects(&self, other: &CellSet) -> bool {
        if let (Some(a), Some(b)) = (self.bbox, other.bbox) {
            if a.max_x < b.min_x || b.max_x < a.min_x || a.max_y < b.min_y || b.max_y < a.min_y {
                return false;
            }
        }
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|c| big.contains(c))
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    /// Cells lying on row `y`, left to right.
    pub fn row(&self, y: i32) -> impl Iterator<Item = Cell> + '_ {
        self.cells
            .range(Cell::new(i32::MIN, y)..=Cell::new(i32::MAX, y))
            .copied()
    }

    pub fn baseline(&self) -> CellSet {
        self.row(0).collect()
    }

    pub fn translate(&self, dx: i32, dy: i32) -> CellSet {
        self.iter().map(|c| Cell::new(c.x + dx, c.y + dy)).collect()
    }

    /// Mirror image under `x -> axis - x`.
    pub fn reflect_x(&self, axis: i32) -> CellSet {
        self.iter().map(|c| Cell::new(axis - c.x, c.y)).collect()
    }

    /// Mirror image under `y -> -y`.
    pub fn reflect_y(&self) -> CellSet {
        self.iter().map(|c| Cell::new(c.x, -c.y)).collect()
    }

    pub fn to_coords(&self) -> Vec<[i32; 2]> {
        self.iter().map(|c| [c.x, c.y]).collect()
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.cells.iter()).finish()
    }
}

impl FromIterator<Cell> for CellSet {
    fn from_iter<I: IntoIterator<Item = Cell>>(iter: I) -> Self {
        let mut s = CellSet::new();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl Extend<Cell> for CellSet {
    fn extend<I: IntoIterator<Item = Cell>>(&mut self, iter: I) {
        for c in iter {
            self.insert(c);
        }
    }
}

impl<'a> IntoIterator for &'a CellSet {
    type Item = Cell;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Cell>>;
    fn into_iter(self) -> Self::IntoIter {
        self.cells.iter().copied()
    }
}

impl Serialize for CellSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CellSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<[i32; 2]> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|[x, y]| Cell::new(x, y)).collect())
    }
}

/// Finite working window `[x_min, x_min + width) x [0, height)`.
///
/// Cells on the left column, right column and top row form the frame
/// boundary; touching it stands in for being unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    #[serde(default, skip_serializing_if = "is_zero")]
    pub x_min: i32,
    pub width: u32,
    pub height: u32,
}

fn is_zero(v: &i32) -> bool {
    *v == 0
}

impl Frame {
    pub fn new(width: u32, height: u32) -> Self {
        Frame { x_min: 0, width, height }
    }

    pub fn with_origin(x_min: i32, width: u32, height: u32) -> Self {
        Frame { x_min, width, height }
    }

    /// Smallest frame holding every set with `margin` free cells on the left,
    /// right and top.
    pub fn enclosing<'a>(sets: impl IntoIterator<Item = &'a CellSet>, margin: u32) -> Frame {
        let mut bb: Option<BBox> = None;
        for s in sets {
            if let Some(b) = s.bbox() {
                bb = Some(match bb {
                    None => b,
                    Some(a) => BBox {
                        min_x: a.min_x.min(b.min_x),
                        max_x: a.max_x.max(b.max_x),
                        min_y: a.min_y.min(b.min_y),
                        max_y: a.max_y.max(b.max_y),
                    },
                });
            }
        }
        let m = margin.max(1) as i32;
        match bb {
            None => Frame::with_origin(-m, (2 * m + 1) as u32, (m + 1) as u32),
            Some(b) => Frame::with_origin(
                b.min_x - m,
                (b.max_x - b.min_x + 1 + 2 * m) as u32,
                (b.max_y.max(0) + 1 + m) as u32,
            ),
        }
    }

    pub fn x_max(&self) -> i32 {
        self.x_min + self.width as i32 - 1
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= self.x_min && c.x <= self.x_max() && c.y >= 0 && c.y < self.height as i32
    }

    pub fn is_boundary(&self, c: Cell) -> bool {
        self.contains(c) && (c.x == self.x_min || c.x == self.x_max() || c.y == self.height as i32 - 1)
    }

    /// True if `c` lies inside the frame and off its boundary.
    pub fn is_interior(&self, c: Cell) -> bool {
        self.contains(c) && !self.is_boundary(c)
    }

    pub fn fits(&self, s: &CellSet) -> bool {
        match s.bbox() {
            None => true,
            Some(b) => {
                b.min_y >= 0
                    && b.min_x > self.x_min
                    && b.max_x < self.x_max()
                    && b.max_y < self.height as i32 - 1
            }
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let (x0, x1) = (self.x_min, self.x_max());
        (0..self.height as i32).flat_map(move |y| (x0..=x1).map(move |x| Cell::new(x, y)))
    }

    pub fn cell_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn union(&self, other: &Frame) -> Frame {
        let x_min = self.x_min.min(other.x_min);
        let x_max = self.x_max().max(other.x_max());
        Frame::with_origin(x_min, (x_max - x_min + 1) as u32, self.height.max(other.height))
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TopologyError {
    #[error("set does not fit in frame {frame:?} with a one-cell margin")]
    FrameTooSmall { frame: Frame },
    #[error("base of the set is not surrounded by the separator")]
    BaseNotSurrounded,
    #[error("set has no baseline cells")]
    EmptyBase,
    #[error("endpoint {0:?} is not in the set")]
    EndpointOutside(Cell),
    #[error("endpoints are not connected inside the set")]
    NotConnected,
    #[error("intersection with constraint set {index} is disconnected ({} components)", .components.len())]
    SimplicityHypothesisViolated { index: usize, components: Vec<CellSet> },
    #[error("intersections with constraint sets {0} and {1} overlap")]
    ConstraintsOverlap(usize, usize),
}

/// Flood fill from `seeds` through cells accepted by `allowed`.
pub fn flood(seeds: impl IntoIterator<Item = Cell>, allowed: impl Fn(Cell) -> bool) -> CellSet {
    let mut seen: HashSet<Cell> = HashSet::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if allowed(s) && seen.insert(s) {
            queue.push_back(s);
        }
    }
    while let Some(c) = queue.pop_front() {
        for n in c.neighbors() {
            if !seen.contains(&n) && allowed(n) {
                seen.insert(n);
                queue.push_back(n);
            }
        }
    }
    seen.into_iter().collect()
}

/// Shortest 4-path from `from` to any cell satisfying `is_target`, through
/// cells accepted by `allowed`. Neighbour expansion order is fixed, so the
/// result is deterministic.
pub fn shortest_path_to(
    from: &[Cell],
    is_target: impl Fn(Cell) -> bool,
    allowed: impl Fn(Cell) -> bool,
) -> Option<Vec<Cell>> {
    let mut parent: std::collections::HashMap<Cell, Option<Cell>> = Default::default();
    let mut queue = VecDeque::new();
    for &s in from {
        if allowed(s) && !parent.contains_key(&s) {
            parent.insert(s, None);
            queue.push_back(s);
        }
    }
    while let Some(c) = queue.pop_front() {
        if is_target(c) {
            let mut path = vec![c];
            let mut cur = c;
            while let Some(Some(p)) = parent.get(&cur) {
                path.push(*p);
                cur = *p;
            }
            path.reverse();
            return Some(path);
        }
        for n in c.neighbors() {
            if !parent.contains_key(&n) && allowed(n) {
                parent.insert(n, Some(c));
                queue.push_back(n);
            }
        }
    }
    None
}

pub fn shortest_path(a: Cell, b: Cell, within: &CellSet) -> Option<Vec<Cell>> {
    shortest_path_to(&[a], |c| c == b, |c| within.contains(c))
}

/// Maximal 4-connected parts of `r`, ordered by their least cell.
pub fn connected_components(r: &CellSet) -> Vec<CellSet> {
    let mut seen: HashSet<Cell> = HashSet::new();
    let mut out = Vec::new();
    for c in r.iter() {
        if seen.contains(&c) {
            continue;
        }
        let comp = flood([c], |n| r.contains(n));
        seen.extend(comp.iter());
        out.push(comp);
    }
    out
}

/// Empty sets count as connected.
pub fn is_connected(r: &CellSet) -> bool {
    match r.first() {
        None => true,
        Some(c) => flood([c], |n| r.contains(n)).len() == r.len(),
    }
}

/// The component of `r` containing `c`, or empty if `c` is not in `r`.
pub fn component_containing(r: &CellSet, c: Cell) -> CellSet {
    flood([c], |n| r.contains(n))
}

/// The unbounded component of the frame minus `r`.
pub fn ext(r: &CellSet, f: &Frame) -> Result<CellSet, TopologyError> {
    if !f.fits(r) {
        return Err(TopologyError::FrameTooSmall { frame: *f });
    }
    let seeds: Vec<Cell> = f.cells().filter(|&c| f.is_boundary(c)).collect();
    Ok(flood(seeds, |c| f.contains(c) && !r.contains(c)))
}

/// True iff `x` avoids both `s` and `ext(s)`.
pub fn surrounded_by(x: &CellSet, s: &CellSet, f: &Frame) -> Result<bool, TopologyError> {
    if !f.fits(x) {
        return Err(TopologyError::FrameTooSmall { frame: *f });
    }
    let e = ext(s, f)?;
    Ok(!x.intersects(s) && !x.intersects(&e))
}

/// The component of `r \ s` containing the base of `r`.
///
/// The frame is chosen internally; surroundedness does not depend on it once
/// the margin is respected.
pub fn cut(r: &CellSet, s: &CellSet) -> Result<CellSet, TopologyError> {
    let base = r.baseline();
    let Some(b0) = base.first() else {
        return Err(TopologyError::EmptyBase);
    };
    let f = Frame::enclosing([r, s], 1);
    if !surrounded_by(&base, s, &f)? {
        return Err(TopologyError::BaseNotSurrounded);
    }
    Ok(flood([b0], |c| r.contains(c) && !s.contains(c)))
}

/// A simple 4-path from `a` to `b` in `x` whose intersection with each
/// constraint set is a contiguous stretch.
///
/// Starts from a shortest path and, for each constraint set in turn, replaces
/// the stretch between the first and last visit by a path inside `x ∩ Y`.
pub fn simple_arc(x: &CellSet, a: Cell, b: Cell, ys: &[CellSet]) -> Result<Vec<Cell>, TopologyError> {
    for &e in &[a, b] {
        if !x.contains(e) {
            return Err(TopologyError::EndpointOutside(e));
        }
    }
    let parts: Vec<CellSet> = ys.iter().map(|y| x.intersection(y)).collect();
    for (i, p) in parts.iter().enumerate() {
        let comps = connected_components(p);
        if comps.len() > 1 {
            return Err(TopologyError::SimplicityHypothesisViolated { index: i, components: comps });
        }
        for (j, q) in parts.iter().enumerate().skip(i + 1) {
            if p.intersects(q) {
                return Err(TopologyError::ConstraintsOverlap(i, j));
            }
        }
    }
    let mut path = shortest_path(a, b, x).ok_or(TopologyError::NotConnected)?;
    for part in &parts {
        let first = path.iter().position(|&c| part.contains(c));
        let last = path.iter().rposition(|&c| part.contains(c));
        if let (Some(i), Some(j)) = (first, last) {
            if i == j {
                continue;
            }
            let detour = shortest_path(path[i], path[j], part).ok_or(TopologyError::NotConnected)?;
            let mut next = path[..i].to_vec();
            next.extend(detour);
            next.extend_from_slice(&path[j + 1..]);
            path = next;
        }
    }
    Ok(path)
}

/// True if the indices of `path` inside `y` form one interval.
pub fn visits_contiguously(path: &[Cell], y: &CellSet) -> bool {
    let hits: Vec<usize> = (0..path.len()).filter(|&i| y.contains(path[i])).collect();
    hits.windows(2).all(|w| w[1] == w[0] + 1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplicityViolation {
    /// Indices into the checked list, ascending.
    pub members: Vec<usize>,
    pub components: Vec<CellSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplicityReport {
    pub passed: bool,
    pub subfamilies_checked: usize,
    pub violation: Option<SimplicityViolation>,
}

/// Check that every subfamily with a nonempty common intersection has a
/// 4-connected intersection.
///
/// Only subsets of maximal cliques of the pairwise-intersection graph can have
/// a common cell, so enumeration walks those, pruning as soon as the running
/// intersection empties.
pub fn check_simple(sets: &[CellSet]) -> SimplicityReport {
    let n = sets.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if sets[i].intersects(&sets[j]) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut violations: Vec<SimplicityViolation> = Vec::new();
    for clique in maximal_cliques(&adj) {
        let mut chosen = Vec::new();
        walk_subfamilies(sets, &clique, 0, &mut chosen, None, &mut visited, &mut violations);
    }
    let checked = visited.len();
    violations.sort_by(|a, b| a.members.len().cmp(&b.members.len()).then_with(|| a.members.cmp(&b.members)));
    let violation = violations.into_iter().next();
    SimplicityReport { passed: violation.is_none(), subfamilies_checked: checked, violation }
}

fn walk_subfamilies(
    sets: &[CellSet],
    clique: &[usize],
    from: usize,
    chosen: &mut Vec<usize>,
    running: Option<&CellSet>,
    visited: &mut HashSet<Vec<usize>>,
    violations: &mut Vec<SimplicityViolation>,
) {
    for pos in from..clique.len() {
        let idx = clique[pos];
        let inter = match running {
            None => sets[idx].clone(),
            Some(r) => r.intersection(&sets[idx]),
        };
        if inter.is_empty() {
            continue;
        }
        chosen.push(idx);
        if visited.insert(chosen.clone()) {
            let comps = connected_components(&inter);
            if comps.len() > 1 {
                violations.push(SimplicityViolation { members: chosen.clone(), components: comps });
            }
        }
        walk_subfamilies(sets, clique, pos + 1, chosen, Some(&inter), visited, violations);
        chosen.pop();
    }
}
