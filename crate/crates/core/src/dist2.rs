//! Coloring a family hanging off pillars under an arc.
//!
//! A scene is an arc `S` over the baseline, pillars standing on the baseline
//! under `S` and reaching it, and a family `D` under `S` whose members all
//! touch some pillar. Pillars are grouped into classes of pairwise disjoint
//! cuts; inside one class each member is clipped on the left and on the
//! right, the clipped families are colored by an oracle, and what remains is
//! settled by a four-coloring of a planar component graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::family::{FamilyError, GroundedFamily, GroundedSet, PillarScene};
use crate::graph::{chi_exact, dsatur_greedy, omega_exact, pillar_order_coloring, planar_color, Coloring, GraphError, IntersectionGraph};
use crate::grid::{check_simple, connected_components, flood, is_connected, shortest_path_to, BBox, Cell, CellSet, Frame, TopologyError};

#[derive(Debug, Error)]
pub enum Dist2Error {
    #[error("no pillars")]
    NoPillars,
    #[error("pillar {0} misses S")]
    PillarMissesS(String),
    #[error("{0} is not surrounded by S")]
    NotSurrounded(String),
    #[error("pillars {0} and {1} are not disjoint")]
    PillarsNotDisjoint(String, String),
    #[error("S does not enclose a single baseline run: {0}")]
    NotArcLike(String),
    #[error("pillar context inconsistent: {0}")]
    ContextViolation(String),
    #[error("hypothesis violated by {0}")]
    HypothesisViolated(String),
    #[error("clique number {omega} exceeds k = {k}")]
    OmegaExceeded { omega: usize, k: usize },
    #[error("{0} meets no pillar")]
    MemberMissesAllPillars(String),
    #[error("clipped family has clique number {omega} > {bound}")]
    CliqueBoundViolated { omega: usize, bound: usize },
    #[error("clips of {0} and {1} overlap")]
    ClipDisjointnessViolated(String, String),
    #[error("cannot route {members:?} to the baseline from corridor {corridor}")]
    RoutingFailed { corridor: usize, members: Vec<String> },
    #[error("audit failed: {0}")]
    AuditFailed(String),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Dist2Error>,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

type Result<T> = std::result::Result<T, Dist2Error>;

fn staged<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        e @ Dist2Error::Stage { .. } => e,
        e => Dist2Error::Stage { stage, source: Box::new(e) },
    })
}

/// The disc under `S` cut up by pairwise disjoint pillars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PillarContext {
    pub s: CellSet,
    pub frame: Frame,
    /// Cells enclosed by `S` and the baseline run from `p` to `q`.
    pub j: CellSet,
    pub p: i32,
    pub q: i32,
    pub pillar_ids: Vec<String>,
    /// Pillar cuts, left to right.
    pub pillars: Vec<CellSet>,
    /// Free cells of `J` reachable from each pillar without touching another.
    pub neighbors: Vec<CellSet>,
    /// `corridors[i]`: cells that neighbor both pillar `i` and pillar `i + 1`.
    pub corridors: Vec<CellSet>,
}

impl PillarContext {
    pub fn m(&self) -> usize {
        self.pillars.len()
    }

    pub fn free(&self) -> CellSet {
        self.pillars.iter().fold(self.j.clone(), |acc, r| acc.difference(r))
    }

    /// Mirror image: pillars come out in reversed order.
    pub fn reflected(&self) -> PillarContext {
        let axis = self.frame.x_min + self.frame.x_max();
        let rev = |v: &[CellSet]| v.iter().rev().map(|c| c.reflect_x(axis)).collect::<Vec<_>>();
        PillarContext {
            s: self.s.reflect_x(axis),
            frame: self.frame,
            j: self.j.reflect_x(axis),
            p: axis - self.q,
            q: axis - self.p,
            pillar_ids: self.pillar_ids.iter().rev().cloned().collect(),
            pillars: rev(&self.pillars),
            neighbors: rev(&self.neighbors),
            corridors: rev(&self.corridors),
        }
    }
}

/// Cut every pillar at `S`, locate the enclosed disc and its corridors.
pub fn build_pillar_context(s: &CellSet, pillars: &[&GroundedSet], frame: &Frame) -> Result<PillarContext> {
    if pillars.is_empty() {
        return Err(Dist2Error::NoPillars);
    }
    if !frame.fits(s) {
        return Err(Dist2Error::Topology(TopologyError::FrameTooSmall { frame: *frame }));
    }
    let seed = pillars[0].base_cells().first().expect("grounded sets have a base");
    if s.contains(seed) {
        return Err(Dist2Error::NotSurrounded(pillars[0].id().to_string()));
    }
    let j = flood([seed], |c| frame.contains(c) && !s.contains(c));
    if j.iter().any(|c| frame.is_boundary(c)) {
        return Err(Dist2Error::NotSurrounded(pillars[0].id().to_string()));
    }
    let run: Vec<i32> = j.row(0).map(|c| c.x).collect();
    let (lo, hi) = (run[0], run[run.len() - 1]);
    if run.len() as i32 != hi - lo + 1 {
        return Err(Dist2Error::NotArcLike(format!("baseline cells of the enclosed region are not contiguous: {run:?}")));
    }

    let mut cuts = Vec::with_capacity(pillars.len());
    for r in pillars {
        if !r.region().intersects(s) {
            return Err(Dist2Error::PillarMissesS(r.id().to_string()));
        }
        if !r.base_cells().is_subset(&j) {
            return Err(Dist2Error::NotSurrounded(r.id().to_string()));
        }
        let b0 = r.base_cells().first().expect("grounded sets have a base");
        cuts.push(flood([b0], |c| r.region().contains(c) && !s.contains(c)));
    }
    for a in 0..cuts.len() {
        for b in a + 1..cuts.len() {
            if cuts[a].intersects(&cuts[b]) {
                return Err(Dist2Error::PillarsNotDisjoint(pillars[a].id().to_string(), pillars[b].id().to_string()));
            }
        }
    }

    let all: CellSet = cuts.iter().fold(CellSet::new(), |acc, c| acc.union(c));
    let free = j.difference(&all);
    let neighbors: Vec<CellSet> = cuts
        .iter()
        .map(|r| {
            let seeds: Vec<Cell> = r.iter().flat_map(|c| c.neighbors()).filter(|n| free.contains(*n)).collect();
            flood(seeds, |c| free.contains(c))
        })
        .collect();
    let corridors = neighbors.windows(2).map(|w| w[0].intersection(&w[1])).collect();
    let ctx = PillarContext {
        s: s.clone(),
        frame: *frame,
        j,
        p: lo - 1,
        q: hi + 1,
        pillar_ids: pillars.iter().map(|r| r.id().to_string()).collect(),
        pillars: cuts,
        neighbors,
        corridors,
    };
    audit_context(&ctx)?;
    Ok(ctx)
}

/// Corridors pairwise disjoint and off the pillars, every free cell a
/// neighbor of at most two pillars and those consecutive.
pub fn audit_context(ctx: &PillarContext) -> Result<()> {
    let bad = |msg: String| Err(Dist2Error::ContextViolation(msg));
    for (i, a) in ctx.corridors.iter().enumerate() {
        if ctx.pillars.iter().any(|r| r.intersects(a)) {
            return bad(format!("corridor {i} meets a pillar"));
        }
        for (j, b) in ctx.corridors.iter().enumerate().skip(i + 1) {
            if a.intersects(b) {
                return bad(format!("corridors {i} and {j} overlap"));
            }
        }
    }
    for c in ctx.free().iter() {
        let owners: Vec<usize> = (0..ctx.m()).filter(|&i| ctx.neighbors[i].contains(c)).collect();
        let ok = match owners.as_slice() {
            [] | [_] => true,
            [a, b] => b - a == 1,
            _ => false,
        };
        if !ok {
            return bad(format!("cell {c:?} neighbors pillars {owners:?}"));
        }
    }
    Ok(())
}

/// For each pair of pillars and each pillar between them: removing the
/// middle one must not leave a path in `J` between the outer two.
pub fn audit_separation(ctx: &PillarContext) -> Result<usize> {
    let mut probes = 0;
    for i in 0..ctx.m() {
        for t in i + 1..ctx.m() {
            for j in t + 1..ctx.m() {
                probes += 1;
                let mid = &ctx.pillars[t];
                let target = &ctx.pillars[j];
                let seeds: Vec<Cell> = ctx.pillars[i].iter().collect();
                let path = shortest_path_to(&seeds, |c| target.contains(c), |c| ctx.j.contains(c) && !mid.contains(c));
                if let Some(path) = path {
                    return Err(Dist2Error::AuditFailed(format!(
                        "path of length {} joins pillars {i} and {j} avoiding pillar {t}",
                        path.len()
                    )));
                }
            }
        }
    }
    Ok(probes)
}

/// Positions in the sequence `R_0, I_0, R_1, ..., I_{m-2}, R_{m-1}` met by
/// `x`: pillar `i` is `2i`, corridor `i` is `2i + 1`.
pub fn sequence_profile(ctx: &PillarContext, x: &CellSet) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..ctx.m() {
        if ctx.pillars[i].intersects(x) {
            out.push(2 * i);
        }
        if i + 1 < ctx.m() && ctx.corridors[i].intersects(x) {
            out.push(2 * i + 1);
        }
    }
    out
}

/// True if the positions met by `x` form one run.
pub fn meets_interval(ctx: &PillarContext, x: &CellSet) -> bool {
    let p = sequence_profile(ctx, x);
    p.windows(2).all(|w| w[1] == w[0] + 1)
}

/// Pillar class of each pillar (by cut disjointness) and, for each `D`
/// member, the class of the first pillar whose cut it meets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PillarClasses {
    pub pillar_class: Vec<usize>,
    pub member_class: Vec<usize>,
    pub classes: Vec<PillarClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PillarClass {
    /// Positions in the scene's pillar list.
    pub pillars: Vec<usize>,
    /// Positions in the scene's `D` list.
    pub members: Vec<usize>,
}

/// Cuts of the scene's pillars, in base order. Fails if a pillar misses `S`
/// or has a base outside it.
pub fn pillar_cuts(scene: &PillarScene) -> Result<Vec<CellSet>> {
    let frame = scene.frame();
    let ext_s = crate::grid::ext(&scene.s, &frame)?;
    scene
        .pillar_sets()
        .into_iter()
        .map(|r| {
            let base = r.base_cells();
            if base.intersects(&scene.s) || base.intersects(&ext_s) {
                return Err(Dist2Error::NotSurrounded(r.id().to_string()));
            }
            if !r.region().intersects(&scene.s) {
                return Err(Dist2Error::PillarMissesS(r.id().to_string()));
            }
            let b0 = base.first().expect("grounded sets have a base");
            Ok(flood([b0], |c| r.region().contains(c) && !scene.s.contains(c)))
        })
        .collect()
}

pub fn pillar_classes(scene: &PillarScene) -> Result<PillarClasses> {
    let cuts = pillar_cuts(scene)?;
    let phi = pillar_order_coloring(&cuts)?;
    let n_classes = phi.palette();
    let mut classes: Vec<PillarClass> = (0..n_classes).map(|_| PillarClass { pillars: vec![], members: vec![] }).collect();
    for (i, &c) in phi.colors().iter().enumerate() {
        classes[c].pillars.push(i);
    }
    let mut member_class = Vec::with_capacity(scene.d.len());
    for (pos, x) in scene.d_sets().into_iter().enumerate() {
        let first = cuts.iter().position(|c| c.intersects(x.region())).ok_or_else(|| Dist2Error::HypothesisViolated(x.id().to_string()))?;
        let c = phi.color(first);
        classes[c].members.push(pos);
        member_class.push(c);
    }
    Ok(PillarClasses { pillar_class: phi.colors().to_vec(), member_class, classes })
}

/// One member split at its first and last pillar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clip {
    pub id: String,
    pub first: usize,
    pub last: usize,
    pub left: CellSet,
    pub right: CellSet,
}

impl Clip {
    pub fn left_grounded(&self) -> bool {
        self.left.row(0).next().is_some()
    }

    pub fn right_grounded(&self) -> bool {
        self.right.row(0).next().is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClipView {
    pub clips: Vec<Clip>,
}

pub fn clip_one(ctx: &PillarContext, x: &GroundedSet) -> Result<Clip> {
    let hits: Vec<usize> = (0..ctx.m()).filter(|&i| ctx.pillars[i].intersects(x.region())).collect();
    let (Some(&first), Some(&last)) = (hits.first(), hits.last()) else {
        return Err(Dist2Error::MemberMissesAllPillars(x.id().to_string()));
    };
    let left = if first == 0 { x.region().clone() } else { x.region().difference(&ctx.corridors[first - 1]) };
    let right = if last + 1 == ctx.m() { x.region().clone() } else { x.region().difference(&ctx.corridors[last]) };
    Ok(Clip { id: x.id().to_string(), first, last, left, right })
}

pub fn clip(ctx: &PillarContext, members: &[&GroundedSet]) -> Result<ClipView> {
    Ok(ClipView { clips: members.iter().map(|x| clip_one(ctx, x)).collect::<Result<_>>()? })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClipAudit {
    pub connected: bool,
    pub left_simple: bool,
    pub right_simple: bool,
    pub omega_left: usize,
    pub omega_right: usize,
}

impl ClipAudit {
    pub fn holds(&self, omega_scene: usize) -> bool {
        let cap = omega_scene.saturating_sub(1);
        self.connected && self.left_simple && self.right_simple && self.omega_left <= cap && self.omega_right <= cap
    }
}

pub fn audit_clips(view: &ClipView) -> ClipAudit {
    let lefts: Vec<CellSet> = view.clips.iter().map(|c| c.left.clone()).collect();
    let rights: Vec<CellSet> = view.clips.iter().map(|c| c.right.clone()).collect();
    let omega = |sets: &[CellSet]| {
        let ids: Vec<String> = (0..sets.len()).map(|i| i.to_string()).collect();
        omega_exact(&IntersectionGraph::from_regions(&ids, &sets.iter().collect::<Vec<_>>())).0
    };
    ClipAudit {
        connected: lefts.iter().chain(&rights).all(|s| !s.is_empty() && is_connected(s)),
        left_simple: check_simple(&lefts).passed,
        right_simple: check_simple(&rights).passed,
        omega_left: omega(&lefts),
        omega_right: omega(&rights),
    }
}

/// How the clipped grounded families get colored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Oracle {
    /// Optimal coloring by exact search.
    #[default]
    Exact,
    /// The inductive route: a family without intersections takes one color,
    /// anything else is colored greedily and must stay within `xi_{k-1}`.
    Recursive,
}

impl Oracle {
    /// Colors `f`, whose clique number must be below `k`.
    pub fn color(self, f: &GroundedFamily, k: usize) -> Result<Coloring> {
        let g = f.graph();
        let (omega, _) = omega_exact(&g);
        if omega >= k.max(1) && !f.is_empty() {
            return Err(Dist2Error::CliqueBoundViolated { omega, bound: k.saturating_sub(1) });
        }
        match self {
            Oracle::Exact => Ok(chi_exact(&g)?.1),
            Oracle::Recursive if omega <= 1 => Ok(Coloring::uniform(f.len())),
            Oracle::Recursive => {
                let c = dsatur_greedy(&g);
                let cap = crate::bounds::compute_bounds(k - 1).xi(k - 1).clone();
                if num_bigint::BigUint::from(c.palette()) > cap {
                    return Err(Dist2Error::AuditFailed(format!("greedy palette {} exceeds xi_{}", c.palette(), k - 1)));
                }
                Ok(c)
            }
        }
    }
}

/// Thin copy of `r` at scale `s`: cell `(x, y)` goes to `(s x, s y)` and
/// each pair of adjacent cells is joined by a straight link. Intersections
/// map to the skeletons of the intersections, so the intersection pattern
/// and simplicity survive while free room opens up between sets.
pub fn refine(r: &CellSet, s: i32) -> CellSet {
    if s == 1 {
        return r.clone();
    }
    let mut out = CellSet::new();
    for c in r.iter() {
        out.insert(Cell::new(s * c.x, s * c.y));
        for (dx, dy) in [(1, 0), (0, 1)] {
            if r.contains(Cell::new(c.x + dx, c.y + dy)) {
                out.extend((1..s).map(|t| Cell::new(s * c.x + t * dx, s * c.y + t * dy)));
            }
        }
    }
    out
}

pub fn refine_frame(f: &Frame, s: i32) -> Frame {
    let s_u = s as u32;
    Frame::with_origin(s * f.x_min, s_u * (f.width - 1) + 1, s_u * (f.height - 1) + 1)
}

pub const ATTACH_SCALES: [i32; 4] = [1, 3, 5, 7];

/// A grounded stand-in for the left clips of one class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attached {
    pub family: GroundedFamily,
    /// `map[i]`: position in the input of `family` member `i`.
    pub map: Vec<usize>,
    pub scale: i32,
    /// Added cells for each floating member, by id.
    pub tails: Vec<(String, Vec<Cell>)>,
}

/// Hang every floating left clip from the baseline by a private path.
///
/// Members whose left clip already reaches the baseline are kept as they
/// are. Floating ones, lowest first, get a shortest path down to a free
/// baseline cell that avoids every other clip and every earlier path. If
/// that fails at one scale the whole picture is refined and routing starts
/// over.
pub fn attach_to_baseline(ctx: &PillarContext, members: &[&GroundedSet]) -> Result<Attached> {
    let view = clip(ctx, members)?;
    for (i, r) in ctx.pillars.iter().enumerate() {
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let (ra, rb) = (r.intersection(members[a].region()), r.intersection(members[b].region()));
                if ra.intersects(&rb) {
                    return Err(Dist2Error::AuditFailed(format!(
                        "{} and {} share cells of pillar {i}",
                        members[a].id(),
                        members[b].id()
                    )));
                }
            }
        }
    }
    let lefts: Vec<&CellSet> = view.clips.iter().map(|c| &c.left).collect();
    let mut floating: Vec<usize> = (0..members.len()).filter(|&i| !view.clips[i].left_grounded()).collect();
    floating.sort_by_key(|&i| (lefts[i].bbox().map(|b| b.min_y), i));

    let mut stuck = Vec::new();
    for s in ATTACH_SCALES {
        let frame = refine_frame(&ctx.frame, s);
        let mut sets: Vec<CellSet> = lefts.iter().map(|l| refine(l, s)).collect();
        let mut taken: CellSet = sets.iter().fold(CellSet::new(), |acc, r| acc.union(r));
        let mut tails = Vec::new();
        stuck.clear();
        for &i in &floating {
            let own = &sets[i];
            let seeds: Vec<Cell> = own.iter().collect();
            let path = shortest_path_to(&seeds, |c| c.y == 0, |c| own.contains(c) || (frame.is_interior(c) && !taken.contains(c)));
            match path {
                Some(path) => {
                    let tail: Vec<Cell> = path.into_iter().filter(|c| !own.contains(*c)).collect();
                    taken.extend(tail.iter().copied());
                    sets[i].extend(tail.iter().copied());
                    tails.push((members[i].id().to_string(), tail));
                }
                None => stuck.push(i),
            }
        }
        if !stuck.is_empty() {
            continue;
        }
        let grounded = sets
            .into_iter()
            .enumerate()
            .map(|(i, r)| GroundedSet::new(members[i].id(), r))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let family = GroundedFamily::new(grounded, frame)?;
        let map = family.members().iter().map(|m| members.iter().position(|x| x.id() == m.id()).expect("ids carried over")).collect();
        let attached = Attached { family, map, scale: s, tails };
        audit_attach(&attached, &view)?;
        return Ok(attached);
    }
    let corridor = stuck.first().map_or(0, |&i| view.clips[i].first.saturating_sub(1));
    Err(Dist2Error::RoutingFailed { corridor, members: stuck.iter().map(|&i| members[i].id().to_string()).collect() })
}

/// The attached family must have exactly the intersection graph of the left
/// clips it came from.
pub fn audit_attach(a: &Attached, view: &ClipView) -> Result<()> {
    let g = a.family.graph();
    for x in 0..a.family.len() {
        for y in x + 1..a.family.len() {
            let (cx, cy) = (&view.clips[a.map[x]], &view.clips[a.map[y]]);
            if g.adjacent(x, y) != cx.left.intersects(&cy.left) {
                return Err(Dist2Error::AuditFailed(format!("attaching changed whether {} and {} meet", cx.id, cy.id)));
            }
        }
    }
    Ok(())
}

/// Where the clipped-off parts of a family sit: the components of the
/// clipped-off cells inside each corridor, merged so that each member's
/// clipped-off part on one side lies in a single component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentMap {
    /// Corridor index and cells of each component.
    pub components: Vec<(usize, CellSet)>,
    pub left_of: Vec<Option<usize>>,
    pub right_of: Vec<Option<usize>>,
    /// One edge per member clipped on both sides.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalColoring {
    pub psi: Coloring,
    pub component_colors: Coloring,
    pub map: ComponentMap,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

/// Four-color a family whose left clips are pairwise disjoint and whose
/// right clips are pairwise disjoint.
pub fn final_four_color(ctx: &PillarContext, members: &[&GroundedSet]) -> Result<FinalColoring> {
    let view = clip(ctx, members)?;
    let n = members.len();
    for a in 0..n {
        for b in a + 1..n {
            let (ca, cb) = (&view.clips[a], &view.clips[b]);
            if ca.left.intersects(&cb.left) || ca.right.intersects(&cb.right) {
                return Err(Dist2Error::ClipDisjointnessViolated(ca.id.clone(), cb.id.clone()));
            }
        }
    }
    // clipped-off parts: (member, corridor, cells, is_left)
    let mut parts: Vec<(usize, usize, CellSet, bool)> = Vec::new();
    for (x, c) in view.clips.iter().enumerate() {
        let region = members[x].region();
        let gone_left = region.difference(&c.left);
        if !gone_left.is_empty() {
            parts.push((x, c.first - 1, gone_left, true));
        }
        let gone_right = region.difference(&c.right);
        if !gone_right.is_empty() {
            parts.push((x, c.last, gone_right, false));
        }
    }
    let mut raw: Vec<(usize, CellSet)> = Vec::new();
    for i in 0..ctx.corridors.len() {
        let union = parts.iter().filter(|p| p.1 == i).fold(CellSet::new(), |acc, p| acc.union(&p.2));
        raw.extend(connected_components(&union).into_iter().map(|c| (i, c)));
    }
    let mut parent: Vec<usize> = (0..raw.len()).collect();
    for (_, i, cells, _) in &parts {
        let touched: Vec<usize> = (0..raw.len()).filter(|&r| raw[r].0 == *i && raw[r].1.intersects(cells)).collect();
        for w in touched.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut index_of_root = BTreeMap::new();
    let mut components: Vec<(usize, CellSet)> = Vec::new();
    for r in 0..raw.len() {
        let root = find(&mut parent, r);
        let id = *index_of_root.entry(root).or_insert_with(|| {
            components.push((raw[root].0, CellSet::new()));
            components.len() - 1
        });
        components[id].1 = components[id].1.union(&raw[r].1);
    }
    let mut left_of = vec![None; n];
    let mut right_of = vec![None; n];
    for (x, i, cells, is_left) in &parts {
        let r = (0..raw.len()).find(|&r| raw[r].0 == *i && raw[r].1.intersects(cells)).expect("part lies in a component");
        let id = index_of_root[&find(&mut parent, r)];
        if *is_left {
            left_of[*x] = Some(id);
        } else {
            right_of[*x] = Some(id);
        }
    }
    let mut edges = BTreeSet::new();
    for x in 0..n {
        if let (Some(l), Some(r)) = (left_of[x], right_of[x]) {
            if l == r {
                return Err(Dist2Error::AuditFailed(format!("{} has both clipped parts in one component", members[x].id())));
            }
            edges.insert((l.min(r), l.max(r)));
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let g = IntersectionGraph::from_edges(components.len(), &edges);
    let phi = planar_color(&g)?;
    let psi: Vec<usize> = (0..n)
        .map(|x| match (left_of[x], right_of[x]) {
            (Some(l), _) => phi.color(l),
            (None, Some(r)) => usize::from(phi.color(r) == 0),
            (None, None) => 0,
        })
        .collect();
    let psi = Coloring::new(psi);
    let regions: Vec<&CellSet> = members.iter().map(|m| m.region()).collect();
    let ids: Vec<&str> = members.iter().map(|m| m.id()).collect();
    if !psi.is_proper(&IntersectionGraph::from_regions(&ids, &regions)) {
        return Err(Dist2Error::AuditFailed("four-coloring is not proper".into()));
    }
    Ok(FinalColoring { psi, component_colors: phi, map: ComponentMap { components, left_of, right_of, edges } })
}

fn bbox_json(b: Option<BBox>) -> serde_json::Value {
    match b {
        Some(b) => json!([b.min_x, b.min_y, b.max_x, b.max_y]),
        None => serde_json::Value::Null,
    }
}

/// Colors of one side: `(phi_r, phi_l, psi)` per member plus the trace.
struct SideOutcome {
    colors: Vec<(usize, usize, usize)>,
    oracle_palette: usize,
    trace: serde_json::Value,
}

fn grounded_clips(clips: &[(&str, &CellSet)], frame: Frame) -> Result<(GroundedFamily, Vec<usize>)> {
    let sets = clips.iter().map(|(id, r)| GroundedSet::new(*id, (*r).clone())).collect::<std::result::Result<Vec<_>, _>>()?;
    let family = GroundedFamily::new(sets, frame)?;
    let map = family.members().iter().map(|m| clips.iter().position(|(id, _)| *id == m.id()).expect("ids carried over")).collect();
    Ok((family, map))
}

fn pull_back(c: &Coloring, map: &[usize], n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for (i, &pos) in map.iter().enumerate() {
        out[pos] = c.color(i);
    }
    out
}

fn color_side(ctx: &PillarContext, members: &[&GroundedSet], k: usize, oracle: Oracle) -> Result<SideOutcome> {
    let n = members.len();
    let view = staged("clip", clip(ctx, members))?;
    let rights: Vec<(&str, &CellSet)> = view.clips.iter().map(|c| (c.id.as_str(), &c.right)).collect();
    let (fam_r, map_r) = staged("right clips", grounded_clips(&rights, ctx.frame))?;
    let phi_r = pull_back(&staged("right oracle", oracle.color(&fam_r, k))?, &map_r, n);
    let right_palette = phi_r.iter().max().map_or(0, |m| m + 1);
    let mut oracle_palette = right_palette;

    let mut colors = vec![(0, 0, 0); n];
    let mut classes_trace = Vec::new();
    for cr in 0..right_palette {
        let m_pos: Vec<usize> = (0..n).filter(|&x| phi_r[x] == cr).collect();
        let m_sets: Vec<&GroundedSet> = m_pos.iter().map(|&x| members[x]).collect();
        let attached = staged("attach", attach_to_baseline(ctx, &m_sets))?;
        let phi_l_fam = staged("left oracle", oracle.color(&attached.family, k))?;
        let phi_l = pull_back(&phi_l_fam, &attached.map, m_sets.len());
        let pl = phi_l.iter().max().map_or(0, |m| m + 1);
        oracle_palette = oracle_palette.max(pl);
        let mut finals = Vec::new();
        for cl in 0..pl {
            let n_pos: Vec<usize> = (0..m_sets.len()).filter(|&x| phi_l[x] == cl).collect();
            let n_sets: Vec<&GroundedSet> = n_pos.iter().map(|&x| m_sets[x]).collect();
            let fin = staged("final", final_four_color(ctx, &n_sets))?;
            for (i, &x) in n_pos.iter().enumerate() {
                colors[m_pos[x]] = (cr, cl, fin.psi.color(i));
            }
            finals.push(json!({
                "members": n_sets.iter().map(|m| m.id()).collect::<Vec<_>>(),
                "components": fin.map.components.iter().map(|(i, c)| json!({"corridor": i, "bbox": bbox_json(c.bbox())})).collect::<Vec<_>>(),
                "edges": fin.map.edges,
                "psi": fin.psi.colors(),
            }));
        }
        classes_trace.push(json!({
            "phi_r": cr,
            "members": m_sets.iter().map(|m| m.id()).collect::<Vec<_>>(),
            "attach_scale": attached.scale,
            "tails": attached.tails.iter().map(|(id, t)| json!({"id": id, "len": t.len()})).collect::<Vec<_>>(),
            "phi_l": phi_l,
            "final": finals,
        }));
    }
    let trace = json!({
        "clips": view.clips.iter().map(|c| json!({
            "id": c.id,
            "first": ctx.pillar_ids[c.first],
            "last": ctx.pillar_ids[c.last],
            "left": bbox_json(c.left.bbox()),
            "right": bbox_json(c.right.bbox()),
        })).collect::<Vec<_>>(),
        "phi_r": phi_r,
        "classes": classes_trace,
    });
    Ok(SideOutcome { colors, oracle_palette, trace })
}

/// One side of one pillar class as the pipeline colors it. The left side is
/// handed over mirrored, so both sides are colored from their right clips.
#[derive(Clone, Debug)]
pub struct SideInput {
    pub class: usize,
    pub mirrored: bool,
    pub ctx: PillarContext,
    /// Members in the context's coordinates.
    pub members: Vec<GroundedSet>,
    /// Position of each member in the scene's `D` list.
    pub positions: Vec<usize>,
}

/// Splits every pillar class into the members whose right clip is grounded
/// and the rest, which are mirrored.
pub fn side_inputs(scene: &PillarScene) -> Result<Vec<SideInput>> {
    side_inputs_for(scene, &pillar_classes(scene)?)
}

fn side_inputs_for(scene: &PillarScene, classes: &PillarClasses) -> Result<Vec<SideInput>> {
    let frame = scene.frame();
    let d_sets = scene.d_sets();
    let pillar_sets = scene.pillar_sets();
    let mut out = Vec::new();
    for (c, class) in classes.classes.iter().enumerate() {
        if class.members.is_empty() {
            continue;
        }
        let pillars: Vec<&GroundedSet> = class.pillars.iter().map(|&i| pillar_sets[i]).collect();
        let ctx = staged("context", build_pillar_context(&scene.s, &pillars, &frame))?;
        let members: Vec<&GroundedSet> = class.members.iter().map(|&i| d_sets[i]).collect();
        let view = staged("clip", clip(&ctx, &members))?;
        let (right, left): (Vec<usize>, Vec<usize>) = (0..members.len()).partition(|&x| view.clips[x].right_grounded());
        if let Some(&x) = left.iter().find(|&&x| !view.clips[x].left_grounded()) {
            return Err(Dist2Error::AuditFailed(format!("{} keeps no base on either side", members[x].id())));
        }
        if !right.is_empty() {
            out.push(SideInput {
                class: c,
                mirrored: false,
                ctx: ctx.clone(),
                members: right.iter().map(|&x| members[x].clone()).collect(),
                positions: right.iter().map(|&x| class.members[x]).collect(),
            });
        }
        if !left.is_empty() {
            let axis = frame.x_min + frame.x_max();
            let flipped = left
                .iter()
                .map(|&x| GroundedSet::new(members[x].id(), members[x].region().reflect_x(axis)))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            out.push(SideInput {
                class: c,
                mirrored: true,
                ctx: ctx.reflected(),
                members: flipped,
                positions: left.iter().map(|&x| class.members[x]).collect(),
            });
        }
    }
    Ok(out)
}

/// Groups of `members` sharing a color of `oracle` on their right clips.
pub fn right_groups(ctx: &PillarContext, members: &[&GroundedSet], k: usize, oracle: Oracle) -> Result<Vec<Vec<usize>>> {
    let view = clip(ctx, members)?;
    let rights: Vec<(&str, &CellSet)> = view.clips.iter().map(|c| (c.id.as_str(), &c.right)).collect();
    let (fam, map) = grounded_clips(&rights, ctx.frame)?;
    let phi = pull_back(&oracle.color(&fam, k)?, &map, members.len());
    Ok(Coloring::new(phi).classes().into_iter().filter(|c| !c.is_empty()).collect())
}

/// Groups of an attached family's members sharing a color of `oracle`,
/// as positions in the list handed to [`attach_to_baseline`].
pub fn left_groups(attached: &Attached, k: usize, oracle: Oracle) -> Result<Vec<Vec<usize>>> {
    let phi = pull_back(&oracle.color(&attached.family, k)?, &attached.map, attached.map.len());
    Ok(Coloring::new(phi).classes().into_iter().filter(|c| !c.is_empty()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dist2Outcome {
    /// Colors of the scene's `D` members, in scene order.
    pub coloring: Coloring,
    pub palette: usize,
    /// Largest palette used by the oracle anywhere.
    pub oracle_palette: usize,
    pub pillar_classes: usize,
    /// `8 * classes * oracle_palette^2`.
    pub palette_bound: usize,
    pub trace: serde_json::Value,
}

/// Checks the scene's hypotheses and colors its `D` members.
pub fn color_dist2(scene: &PillarScene, k: usize, oracle: Oracle) -> Result<Dist2Outcome> {
    let frame = scene.frame();
    for x in scene.d_sets() {
        if !crate::grid::surrounded_by(x.region(), &scene.s, &frame)? {
            return Err(Dist2Error::NotSurrounded(x.id().to_string()));
        }
    }
    let classes = staged("classes", pillar_classes(scene))?;
    let (omega, _) = omega_exact(&scene.family.graph());
    if omega > k {
        return Err(Dist2Error::OmegaExceeded { omega, k });
    }

    let d_sets = scene.d_sets();
    let mut tuples: Vec<(usize, usize, usize, usize, usize)> = vec![(0, 0, 0, 0, 0); d_sets.len()];
    let mut oracle_palette = 0;
    let mut class_trace = Vec::new();
    let sides = side_inputs_for(scene, &classes)?;
    for (c, class) in classes.classes.iter().enumerate() {
        if class.members.is_empty() {
            continue;
        }
        let mut side_traces = Vec::new();
        let mut corridors = json!([]);
        for side in sides.iter().filter(|s| s.class == c) {
            if !side.mirrored {
                corridors = json!(side.ctx.corridors.iter().map(|i| bbox_json(i.bbox())).collect::<Vec<_>>());
            }
            let refs: Vec<&GroundedSet> = side.members.iter().collect();
            let out = color_side(&side.ctx, &refs, k, oracle)?;
            oracle_palette = oracle_palette.max(out.oracle_palette);
            for (i, &x) in side.positions.iter().enumerate() {
                let (a, b, p) = out.colors[i];
                tuples[x] = (c, usize::from(side.mirrored), a, b, p);
            }
            if side.mirrored {
                side_traces.push(json!({"side": "left", "mirrored": true, "detail": out.trace}));
            } else {
                side_traces.push(json!({"side": "right", "detail": out.trace}));
            }
        }
        if sides.iter().all(|s| s.class != c || s.mirrored) {
            if let Some(side) = sides.iter().find(|s| s.class == c) {
                corridors = json!(side.ctx.reflected().corridors.iter().map(|i| bbox_json(i.bbox())).collect::<Vec<_>>());
            }
        }
        class_trace.push(json!({
            "class": c,
            "pillars": class.pillars.iter().map(|&i| scene.pillar_sets()[i].id()).collect::<Vec<_>>(),
            "members": class.members.iter().map(|&i| d_sets[i].id()).collect::<Vec<_>>(),
            "corridors": corridors,
            "sides": side_traces,
        }));
    }

    let distinct: BTreeMap<_, usize> = tuples.iter().collect::<BTreeSet<_>>().into_iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let coloring = Coloring::new(tuples.iter().map(|t| distinct[t]).collect());
    let d_family = scene.d_family();
    let order: Vec<usize> = d_family.members().iter().map(|m| d_sets.iter().position(|x| x.id() == m.id()).expect("same members")).collect();
    let in_family_order = Coloring::new(order.iter().map(|&i| coloring.color(i)).collect());
    if !in_family_order.is_proper(&d_family.graph()) {
        return Err(Dist2Error::AuditFailed("combined coloring is not proper".into()));
    }
    let n_classes = classes.classes.len();
    let palette_bound = 8 * n_classes * oracle_palette * oracle_palette;
    let palette = distinct.len();
    if palette > palette_bound.max(usize::from(palette > 0)) {
        return Err(Dist2Error::AuditFailed(format!("palette {palette} exceeds {palette_bound}")));
    }
    let trace = json!({
        "omega": omega,
        "k": k,
        "oracle": oracle,
        "pillar_class": classes.pillar_class,
        "member_class": classes.member_class,
        "classes": class_trace,
        "palette": palette,
        "palette_bound": palette_bound,
        "colors": d_sets.iter().zip(coloring.colors()).map(|(m, c)| json!({"id": m.id(), "color": c})).collect::<Vec<_>>(),
    });
    Ok(Dist2Outcome { coloring, palette, oracle_palette, pillar_classes: n_classes, palette_bound, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_pillars, gen_scene, hook, SceneLayout, SceneParams};

    fn set(id: &str, cells: CellSet) -> GroundedSet {
        GroundedSet::new(id, cells).unwrap()
    }

    fn rect(x0: i32, x1: i32, y0: i32, y1: i32) -> CellSet {
        CellSet::rect(x0, x1, y0, y1)
    }

    fn scene(layout: &SceneLayout, d: Vec<GroundedSet>) -> PillarScene {
        let pillars = layout
            .pillar_x
            .iter()
            .enumerate()
            .map(|(i, &x)| set(&format!("R{}", i + 1), rect(x, x, 0, layout.top)))
            .collect();
        PillarScene::new(layout.arch(), pillars, d, layout.frame()).unwrap()
    }

    fn context(sc: &PillarScene) -> PillarContext {
        build_pillar_context(&sc.s, &sc.pillar_sets(), &sc.frame()).unwrap()
    }

    /// Odd members rise left of the first pillar and poke right across it,
    /// even members rise right of the second and poke left across it; each
    /// meets its neighbours in the chain inside the corridor.
    fn alternating_chain() -> PillarScene {
        let layout = SceneLayout::new(2, 4, 8);
        scene(
            &layout,
            vec![
                set("X1", hook(3, 2, 4, 0)),
                set("X3", hook(2, 4, 6, 0)),
                set("X5", hook(1, 6, 7, 0)),
                set("X2", hook(12, 3, -5, 0).union(&CellSet::from_coords(&[(7, 2), (7, 4)]))),
                set("X4", hook(13, 5, -5, 0).union(&CellSet::from_coords(&[(8, 4), (8, 6)]))),
            ],
        )
    }

    #[test]
    fn single_pillar_has_no_corridors() {
        let ctx = context(&gen_pillars(1).unwrap());
        assert_eq!(ctx.m(), 1);
        assert!(ctx.corridors.is_empty());
        assert_eq!(ctx.p, 0);
    }

    #[test]
    fn canonical_scene_corridors() {
        let sc = gen_pillars(3).unwrap();
        let ctx = context(&sc);
        assert_eq!(ctx.corridors.len(), 2);
        assert!(ctx.corridors.iter().all(|c| !c.is_empty()));
        assert!(!ctx.corridors[0].intersects(&ctx.corridors[1]));
        // the corridor between two columns under the bar is the full gap
        assert_eq!(ctx.corridors[0], rect(5, 7, 0, 5));
        assert_eq!(audit_separation(&ctx).unwrap(), 1);
        for x in sc.d_sets() {
            assert!(meets_interval(&ctx, x.region()));
        }
    }

    #[test]
    fn context_errors() {
        let layout = SceneLayout::new(2, 3, 6);
        let short = set("R1", rect(4, 4, 0, 3));
        let tall = set("R2", rect(8, 8, 0, 6));
        let f = layout.frame();
        assert!(matches!(build_pillar_context(&layout.arch(), &[&short, &tall], &f), Err(Dist2Error::PillarMissesS(id)) if id == "R1"));
        let a = set("A", rect(4, 4, 0, 6));
        let b = set("B", rect(5, 5, 0, 6).union(&rect(4, 5, 2, 2)));
        assert!(matches!(build_pillar_context(&layout.arch(), &[&a, &b], &f), Err(Dist2Error::PillarsNotDisjoint(..))));
        let open = rect(0, 0, 0, 6).union(&rect(0, 6, 6, 6));
        assert!(matches!(build_pillar_context(&open, &[&a], &f), Err(Dist2Error::NotSurrounded(_))));
        assert!(matches!(build_pillar_context(&layout.arch(), &[], &f), Err(Dist2Error::NoPillars)));
    }

    #[test]
    fn classes_follow_cut_overlaps() {
        let sc = gen_pillars(3).unwrap();
        let cl = pillar_classes(&sc).unwrap();
        assert_eq!(cl.classes.len(), 1);
        assert_eq!(cl.classes[0].members.len(), 6);

        // R1 carries an arm onto R2, so their cuts meet
        let layout = SceneLayout::new(2, 4, 8);
        let pillars = vec![set("R1", rect(5, 5, 0, 8).union(&rect(5, 10, 4, 4))), set("R2", rect(10, 10, 0, 8))];
        let d = vec![set("A", hook(3, 1, 3, 0)), set("B", hook(12, 1, -3, 0)), set("C", hook(13, 2, -8, 0))];
        let sc = PillarScene::new(layout.arch(), pillars, d, layout.frame()).unwrap();
        let cl = pillar_classes(&sc).unwrap();
        assert_eq!(cl.pillar_class, vec![0, 1]);
        let id = |i: usize| sc.d_sets()[i].id().to_string();
        let by_id: BTreeMap<String, usize> = (0..3).map(|i| (id(i), cl.member_class[i])).collect();
        assert_eq!(by_id["A"], 0);
        assert_eq!(by_id["B"], 1);
        // C meets both cuts and goes with the first pillar
        assert_eq!(by_id["C"], 0);
    }

    #[test]
    fn member_missing_cuts_is_rejected() {
        let layout = SceneLayout::new(1, 4, 8);
        let sc = scene(&layout, vec![set("lost", rect(2, 2, 0, 2))]);
        assert!(matches!(pillar_classes(&sc), Err(Dist2Error::HypothesisViolated(id)) if id == "lost"));
        assert!(matches!(color_dist2(&sc, 2, Oracle::Exact), Err(Dist2Error::Stage { stage: "classes", .. })));
    }

    #[test]
    fn clipping_canonical_hooks() {
        let sc = gen_pillars(3).unwrap();
        let ctx = context(&sc);
        let d1r = sc.family.member(sc.family.index_of("D1r").unwrap());
        let c = clip_one(&ctx, d1r).unwrap();
        assert_eq!((c.first, c.last), (0, 0));
        assert_eq!(&c.left, d1r.region());
        // D2r rises in the first corridor and crosses the second pillar
        let d2r = sc.family.member(sc.family.index_of("D2r").unwrap());
        let c = clip_one(&ctx, d2r).unwrap();
        assert_eq!(c.first, 1);
        assert_eq!(c.left, CellSet::from_coords(&[(8, 3), (9, 3)]));
        assert!(!c.left_grounded());
        let view = clip(&ctx, &sc.d_sets()).unwrap();
        assert!(audit_clips(&view).holds(2));
    }

    #[test]
    fn grounded_members_attach_unchanged() {
        let sc = gen_pillars(2).unwrap();
        let ctx = context(&sc);
        let left_only: Vec<&GroundedSet> = sc.d_sets().into_iter().filter(|m| m.id().ends_with('l')).collect();
        let a = attach_to_baseline(&ctx, &left_only).unwrap();
        assert_eq!(a.scale, 1);
        assert!(a.tails.is_empty());
    }

    #[test]
    fn two_floating_members_share_a_corridor() {
        let layout = SceneLayout::new(3, 4, 8);
        let sc = scene(&layout, vec![set("X", hook(6, 4, 6, 0)), set("Y", hook(8, 2, 4, 0))]);
        let ctx = context(&sc);
        let view = clip(&ctx, &sc.d_sets()).unwrap();
        assert!(view.clips.iter().all(|c| !c.left_grounded()));
        let a = attach_to_baseline(&ctx, &sc.d_sets()).unwrap();
        assert_eq!(a.tails.len(), 2);
        let tails: Vec<CellSet> = a.tails.iter().map(|(_, t)| t.iter().copied().collect()).collect();
        assert!(!tails[0].intersects(&tails[1]));
        assert_eq!(a.family.graph().edge_count(), 0);
    }

    #[test]
    fn refinement_keeps_intersections() {
        let a = hook(0, 3, 4, 1);
        let b = rect(2, 2, 0, 4);
        for s in [3, 5] {
            let (ra, rb) = (refine(&a, s), refine(&b, s));
            assert!(is_connected(&ra));
            assert_eq!(ra.intersection(&rb), refine(&a.intersection(&b), s));
            assert_eq!(ra.row(0).count(), 1);
        }
    }

    #[test]
    fn crossing_pair_gets_two_colors() {
        let layout = SceneLayout::new(2, 4, 8);
        let sc = scene(&layout, vec![set("X", hook(3, 3, 4, 0)), set("Y", hook(12, 3, -5, 0))]);
        let ctx = context(&sc);
        let fin = final_four_color(&ctx, &sc.d_sets()).unwrap();
        assert_eq!(fin.map.components.len(), 1);
        assert!(fin.map.edges.is_empty());
        let psi = fin.psi.colors();
        assert_ne!(psi[0], psi[1]);
    }

    #[test]
    fn alternating_chain_is_four_colored() {
        let sc = alternating_chain();
        let ctx = context(&sc);
        let members = sc.d_sets();
        let g = sc.d_family().graph();
        assert_eq!(g.edge_count(), 4);
        let fin = final_four_color(&ctx, &members).unwrap();
        assert!(fin.psi.palette() <= 4);
        // independent properness check over every pair
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                if members[a].region().intersects(members[b].region()) {
                    assert_ne!(fin.psi.color(a), fin.psi.color(b));
                }
            }
        }
    }

    #[test]
    fn empty_family_gets_empty_coloring() {
        let layout = SceneLayout::new(2, 4, 8);
        let out = color_dist2(&scene(&layout, vec![]), 2, Oracle::Exact).unwrap();
        assert!(out.coloring.is_empty());
        assert_eq!(out.palette, 0);
    }

    #[test]
    fn canonical_scene_end_to_end() {
        let sc = gen_pillars(3).unwrap();
        for oracle in [Oracle::Exact, Oracle::Recursive] {
            let out = color_dist2(&sc, 2, oracle).unwrap();
            assert_eq!(out.coloring.len(), 6);
            assert!(out.palette <= 16, "palette {}", out.palette);
            assert!(out.palette <= out.palette_bound);
            let members = sc.d_sets();
            for a in 0..members.len() {
                for b in a + 1..members.len() {
                    if members[a].region().intersects(members[b].region()) {
                        assert_ne!(out.coloring.color(a), out.coloring.color(b));
                    }
                }
            }
        }
    }

    #[test]
    fn chain_end_to_end() {
        let out = color_dist2(&alternating_chain(), 2, Oracle::Exact).unwrap();
        assert!(out.palette >= 2 && out.palette <= 16);
    }

    #[test]
    fn omega_hypothesis() {
        let sc = alternating_chain();
        assert!(matches!(color_dist2(&sc, 1, Oracle::Exact), Err(Dist2Error::OmegaExceeded { omega: 2, k: 1 })));
    }

    #[test]
    fn random_scenes_color_within_bound() {
        let params = SceneParams { max_clique: Some(2), ..SceneParams::default() };
        for seed in 0..20 {
            let (sc, _) = gen_scene(seed, &params).unwrap();
            let out = color_dist2(&sc, 2, Oracle::Exact).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert!(out.palette <= 16, "seed {seed}: palette {}", out.palette);
            let ctx = build_pillar_context(&sc.s, &sc.pillar_sets(), &sc.frame());
            if let Ok(ctx) = ctx {
                audit_separation(&ctx).unwrap();
            }
        }
    }
}
