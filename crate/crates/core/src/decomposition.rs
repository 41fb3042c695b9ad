//! Ladder and layer decompositions, clique and bracket interiors, the
//! piercing checks, and the scaffold-building induction step.

use serde::Serialize;
use thiserror::Error;

use crate::family::{GroundedFamily, GroundedSet};
use crate::generate::Side;
use crate::graph::{chi_exact, maximal_cliques, Coloring, GraphError, IntersectionGraph};
use crate::grid::{connected_components, ext, Cell, CellSet, Frame, TopologyError};

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("precondition failed: chromatic number {chi} does not exceed {threshold}")]
    PreconditionFailed { chi: usize, threshold: usize },
    #[error("no layer at distance >= 1 has chromatic number above {a}")]
    NoSupportedLayer { a: usize },
    #[error("sets {0} and {1} do not intersect, so they are not a clique")]
    NotAClique(String, String),
    #[error("a clique needs at least two members")]
    CliqueTooSmall,
    #[error("probe set {0} belongs to the structure")]
    InputOverlap(String),
    #[error("step infeasible at stage {stage}: {reason}")]
    StepInfeasible { stage: String, reason: String },
    #[error("audit failed: {0}")]
    AuditFailed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

type Result<T> = std::result::Result<T, DecompositionError>;

fn chi_of(f: &GroundedFamily, idx: &[usize]) -> Result<usize> {
    if idx.is_empty() {
        return Ok(0);
    }
    Ok(chi_exact(&f.subfamily(idx).graph())?.0)
}

/// Ladder decomposition output. Indices refer to the input family.
#[derive(Clone, Debug, Serialize)]
pub struct LadderResult {
    /// Consecutive blocks in base order; all but the last have chromatic
    /// number `b + 1`.
    pub blocks: Vec<Vec<usize>>,
    /// Proper coloring of each block with at most `b + 1` colors.
    pub block_colorings: Vec<Coloring>,
    pub parity: usize,
    pub parity_chi: [usize; 2],
    /// Color picked inside the chosen parity.
    pub color: usize,
    pub h: Vec<usize>,
    pub h_chi: usize,
}

/// Split `f` into base-ordered blocks of chromatic number `b + 1`, keep the
/// even or odd blocks, and return the color class (from per-block colorings)
/// with the largest chromatic number.
pub fn ladder_split(f: &GroundedFamily, a: usize, b: usize) -> Result<LadderResult> {
    let g = f.graph();
    let (chi, _) = chi_exact(&g)?;
    let threshold = 2 * a * (b + 1);
    if chi <= threshold {
        return Err(DecompositionError::PreconditionFailed { chi, threshold });
    }

    let mut blocks: Vec<Vec<usize>> = vec![];
    let mut block_colorings = vec![];
    let mut current: Vec<usize> = vec![];
    for i in 0..f.len() {
        current.push(i);
        let (c, col) = chi_exact(&g.induced(&current))?;
        if c == b + 1 {
            blocks.push(std::mem::take(&mut current));
            block_colorings.push(col);
        }
    }
    if !current.is_empty() {
        block_colorings.push(chi_exact(&g.induced(&current))?.1);
        blocks.push(current);
    }

    let side = |p: usize| -> Vec<usize> { blocks.iter().skip(p).step_by(2).flatten().copied().collect() };
    let parity_chi = [chi_of(f, &side(0))?, chi_of(f, &side(1))?];
    let parity = usize::from(parity_chi[1] > parity_chi[0]);

    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for color in 0..=b {
        let class: Vec<usize> = blocks
            .iter()
            .zip(&block_colorings)
            .skip(parity)
            .step_by(2)
            .flat_map(|(blk, col)| blk.iter().enumerate().filter(move |&(pos, _)| col.color(pos) == color).map(|(_, &v)| v))
            .collect();
        let c = chi_of(f, &class)?;
        if best.as_ref().is_none_or(|(bc, _, _)| c > *bc) {
            best = Some((c, color, class));
        }
    }
    let (h_chi, color, mut h) = best.expect("at least one color");
    h.sort_unstable();
    let result = LadderResult { blocks, block_colorings, parity, parity_chi, color, h, h_chi };
    audit_ladder(f, a, b, &result)?;
    Ok(result)
}

/// Check `chi(H) > a` and `chi(F(H1, H2)) > b` for intersecting pairs.
pub fn audit_ladder(f: &GroundedFamily, a: usize, b: usize, r: &LadderResult) -> Result<()> {
    let covered: usize = r.blocks.iter().map(Vec::len).sum();
    if covered != f.len() {
        return Err(DecompositionError::AuditFailed("blocks do not partition the family".into()));
    }
    for blk in r.blocks.iter().take(r.blocks.len().saturating_sub(1)) {
        if chi_of(f, blk)? != b + 1 {
            return Err(DecompositionError::AuditFailed("inner block with chromatic number other than b+1".into()));
        }
    }
    if chi_of(f, &r.h)? <= a {
        return Err(DecompositionError::AuditFailed(format!("chi(H) <= {a}")));
    }
    for (x, &i) in r.h.iter().enumerate() {
        for &j in &r.h[x + 1..] {
            if !f.member(i).region().intersects(f.member(j).region()) {
                continue;
            }
            let gap = f.between(Some(f.member(i)), Some(f.member(j)));
            if chi_of(f, &gap)? <= b {
                return Err(DecompositionError::AuditFailed(format!(
                    "gap family between {} and {} has chromatic number <= {b}",
                    f.member(i).id(),
                    f.member(j).id()
                )));
            }
        }
    }
    Ok(())
}

/// A BFS layer of the most chromatic component.
#[derive(Clone, Debug, Serialize)]
pub struct SupportedLayer {
    pub component: Vec<usize>,
    pub root: usize,
    pub distance: usize,
    pub layer: Vec<usize>,
    pub chi: usize,
}

/// The first BFS layer (distance >= 1 from the leftmost member of the most
/// chromatic component) whose chromatic number exceeds `a`.
pub fn externally_supported(f: &GroundedFamily, a: usize) -> Result<SupportedLayer> {
    let g = f.graph();
    let (chi, _) = chi_exact(&g)?;
    if chi <= 2 * a {
        return Err(DecompositionError::PreconditionFailed { chi, threshold: 2 * a });
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for comp in g.components() {
        let c = chi_exact(&g.induced(&comp))?.0;
        if best.as_ref().is_none_or(|(bc, _)| c > *bc) {
            best = Some((c, comp));
        }
    }
    let (_, component) = best.expect("nonempty family");
    let root = component[0];
    let dist = g.distances(root);
    let max_d = component.iter().filter_map(|&v| dist[v]).max().unwrap_or(0);
    for d in 1..=max_d {
        let layer: Vec<usize> = component.iter().copied().filter(|&v| dist[v] == Some(d)).collect();
        let c = chi_of(f, &layer)?;
        if c > a {
            let out = SupportedLayer { component, root, distance: d, layer, chi: c };
            if let Some(v) = unsupported_member(f, &out.layer)? {
                return Err(DecompositionError::AuditFailed(format!("{} has no external supporter", f.member(v).id())));
            }
            return Ok(out);
        }
    }
    Err(DecompositionError::NoSupportedLayer { a })
}

/// A member of `sub` with no supporter in `f`, if any. A supporter meets the
/// member and the exterior of `sub`'s union.
pub fn unsupported_member(f: &GroundedFamily, sub: &[usize]) -> Result<Option<usize>> {
    let union: CellSet = sub.iter().flat_map(|&i| f.member(i).region().iter()).collect();
    let outside = ext(&union, &f.frame())?;
    Ok(sub.iter().copied().find(|&x| {
        let xr = f.member(x).region();
        !f.members().iter().any(|y| y.region().intersects(xr) && y.region().intersects(&outside))
    }))
}

fn sorted_by_base<'a>(sets: &[&'a GroundedSet]) -> Vec<&'a GroundedSet> {
    let mut v = sets.to_vec();
    v.sort_by_key(|s| s.base().0);
    v
}

fn ensure_clique(k: &[&GroundedSet]) -> Result<()> {
    if k.len() < 2 {
        return Err(DecompositionError::CliqueTooSmall);
    }
    for (i, a) in k.iter().enumerate() {
        for b in &k[i + 1..] {
            if !a.region().intersects(b.region()) {
                return Err(DecompositionError::NotAClique(a.id().into(), b.id().into()));
            }
        }
    }
    Ok(())
}

fn union_of(sets: &[&GroundedSet]) -> CellSet {
    sets.iter().flat_map(|s| s.region().iter()).collect()
}

/// Complement component of `blockers` containing the baseline cells strictly
/// between columns `lo` and `hi`; empty when there are none.
fn gap_component(blockers: &CellSet, lo: i32, hi: i32, frame: &Frame) -> Result<CellSet> {
    if !frame.fits(blockers) {
        return Err(TopologyError::FrameTooSmall { frame: *frame }.into());
    }
    let seeds: Vec<Cell> = (lo + 1..hi).map(|x| Cell::new(x, 0)).filter(|c| !blockers.contains(*c)).collect();
    Ok(crate::grid::flood(seeds, |c| frame.contains(c) && !blockers.contains(c)))
}

/// Region enclosed under a clique: the complement component holding the
/// baseline gap between its two leftmost members.
pub fn int_of_clique(k: &[&GroundedSet], frame: &Frame) -> Result<CellSet> {
    ensure_clique(k)?;
    let sorted = sorted_by_base(k);
    gap_component(&union_of(k), sorted[0].base().1, sorted[1].base().0, frame)
}

/// Region enclosed between a support and its clique: the complement
/// component of the bracket's union holding the baseline gap between the
/// support and the nearest clique member.
pub fn int_of_bracket(k: &[&GroundedSet], support: &GroundedSet, side: Side, frame: &Frame) -> Result<CellSet> {
    ensure_clique(k)?;
    let sorted = sorted_by_base(k);
    let mut all = k.to_vec();
    all.push(support);
    let (lo, hi) = match side {
        Side::Left => (support.base().1, sorted[0].base().0),
        Side::Right => (sorted[sorted.len() - 1].base().1, support.base().0),
    };
    gap_component(&union_of(&all), lo, hi, frame)
}

/// Exterior of the bracket's union.
pub fn ext_of(sets: &[&GroundedSet], frame: &Frame) -> Result<CellSet> {
    Ok(ext(&union_of(sets), frame)?)
}

/// A clique, a support standing on one side of it, and both interiors.
#[derive(Clone, Debug, Serialize)]
pub struct BracketWitness {
    pub clique: Vec<usize>,
    pub support: usize,
    pub side: Side,
    pub int_clique: CellSet,
    pub int_bracket: CellSet,
}

impl BracketWitness {
    pub fn clique_sets<'a>(&self, f: &'a GroundedFamily) -> Vec<&'a GroundedSet> {
        self.clique.iter().map(|&i| f.member(i)).collect()
    }
}

/// All `k`-cliques of `g` in lexicographic order.
pub fn k_cliques(g: &IntersectionGraph, k: usize) -> Vec<Vec<usize>> {
    let mut out = std::collections::BTreeSet::new();
    for c in maximal_cliques(g.adjacency()) {
        if c.len() >= k {
            subsets(&c, k, 0, &mut vec![], &mut out);
        }
    }
    out.into_iter().collect()
}

fn subsets(c: &[usize], k: usize, from: usize, cur: &mut Vec<usize>, out: &mut std::collections::BTreeSet<Vec<usize>>) {
    if cur.len() == k {
        out.insert(cur.clone());
        return;
    }
    for i in from..c.len() {
        if c.len() - i < k - cur.len() {
            break;
        }
        cur.push(c[i]);
        subsets(c, k, i + 1, cur, out);
        cur.pop();
    }
}

/// First bracket with a `k`-clique: cliques in lexicographic order, then
/// supports in base order.
pub fn find_bracket(f: &GroundedFamily, k: usize) -> Result<Option<BracketWitness>> {
    if k < 2 {
        return Ok(None);
    }
    let frame = f.frame();
    for clique in k_cliques(&f.graph(), k) {
        let sets: Vec<&GroundedSet> = clique.iter().map(|&i| f.member(i)).collect();
        let int_k = int_of_clique(&sets, &frame)?;
        if int_k.is_empty() {
            continue;
        }
        let (first, last) = (clique[0], clique[clique.len() - 1]);
        for s in 0..f.len() {
            let side = if s < first {
                Side::Left
            } else if s > last {
                Side::Right
            } else {
                continue;
            };
            let support = f.member(s);
            if support.region().intersects(&int_k) {
                let int_b = int_of_bracket(&sets, support, side, &frame)?;
                return Ok(Some(BracketWitness { clique, support: s, side, int_clique: int_k, int_bracket: int_b }));
            }
        }
    }
    Ok(None)
}

/// Whether a corollary's hypotheses held and whether its conclusion did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PiercingVerdict {
    pub hypotheses: bool,
    pub conclusion: bool,
}

impl PiercingVerdict {
    pub fn is_counterexample(&self) -> bool {
        self.hypotheses && !self.conclusion
    }
}

fn reject_overlap(x: &GroundedSet, structure: &[&GroundedSet]) -> Result<()> {
    match structure.iter().find(|s| s.id() == x.id() || s.region() == x.region()) {
        Some(s) => Err(DecompositionError::InputOverlap(s.id().into())),
        None => Ok(()),
    }
}

/// Piercing check for a clique: `a` and `b` lie in `x`, both inside the
/// clique interior (or both in its exterior), and no path inside `x` joins
/// them without visiting the exterior (interior). Conclusion: `x` meets
/// every clique member.
pub fn check_cor_clique(x: &GroundedSet, k: &[&GroundedSet], cells: (Cell, Cell), frame: &Frame) -> Result<PiercingVerdict> {
    reject_overlap(x, k)?;
    let inside = int_of_clique(k, frame)?;
    let outside = ext(&union_of(k), frame)?;
    let (a, b) = cells;
    let region = x.region();
    let hypotheses = region.contains(a) && region.contains(b) && {
        let separated_by = |region_a: &CellSet, avoid: &CellSet| {
            region_a.contains(a) && region_a.contains(b) && {
                let rest = region.difference(avoid);
                !crate::grid::component_containing(&rest, a).contains(b)
            }
        };
        separated_by(&inside, &outside) || separated_by(&outside, &inside)
    };
    let conclusion = k.iter().all(|m| m.region().intersects(region));
    Ok(PiercingVerdict { hypotheses, conclusion })
}

/// Two cells of `x` meeting the clique-corollary hypotheses, if any exist.
pub fn find_cor_clique_pair(x: &GroundedSet, k: &[&GroundedSet], frame: &Frame) -> Result<Option<(Cell, Cell)>> {
    let inside = int_of_clique(k, frame)?;
    let outside = ext(&union_of(k), frame)?;
    for (target, avoid) in [(&inside, &outside), (&outside, &inside)] {
        let hits: Vec<Cell> = connected_components(&x.region().difference(avoid))
            .iter()
            .filter_map(|c| c.iter().find(|&cell| target.contains(cell)))
            .collect();
        if hits.len() >= 2 {
            return Ok(Some((hits[0], hits[1])));
        }
    }
    Ok(None)
}

/// Piercing check for a bracket: if `x` meets both the bracket interior and
/// its exterior, it must meet the support or every clique member.
pub fn check_cor_bracket(
    x: &GroundedSet,
    k: &[&GroundedSet],
    support: &GroundedSet,
    side: Side,
    frame: &Frame,
) -> Result<PiercingVerdict> {
    let mut structure = k.to_vec();
    structure.push(support);
    reject_overlap(x, &structure)?;
    let inside = int_of_bracket(k, support, side, frame)?;
    let outside = ext_of(&structure, frame)?;
    let region = x.region();
    let hypotheses = region.intersects(&inside) && region.intersects(&outside);
    let conclusion = region.intersects(support.region()) || k.iter().all(|m| m.region().intersects(region));
    Ok(PiercingVerdict { hypotheses, conclusion })
}

/// Chromatic targets for one induction step. The exact values from the bound
/// table are far beyond desk scale, so callers usually pass smaller ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    /// The working family handed in must exceed this.
    pub incoming: usize,
    /// Chromatic number of each outer slice of the split.
    pub side_chi: usize,
    /// Ladder parameters for the middle slice.
    pub ladder_a: usize,
    pub ladder_b: usize,
    /// Bound checked on the removed pillar-touching part.
    pub removed_bound: usize,
    /// The new working family must exceed this.
    pub outgoing: usize,
}

impl Thresholds {
    /// Targets for step `j >= 1` at clique size `k`, saturating at
    /// `usize::MAX`.
    pub fn exact(k: usize, j: usize, table: &crate::bounds::BoundTable) -> Thresholds {
        let big = |v: &num_bigint::BigUint| usize::try_from(v).unwrap_or(usize::MAX);
        let xi = big(table.xi(k - 1));
        let delta = |j: usize| big(table.delta(k, j).expect("delta in table"));
        let beta = big(table.beta(k).expect("beta in table"));
        let side = delta(j).saturating_add((k + 1).saturating_mul(xi)).saturating_add(1);
        Thresholds {
            incoming: delta(j - 1),
            side_chi: side,
            ladder_a: xi,
            ladder_b: k.saturating_mul(xi),
            removed_bound: beta,
            outgoing: delta(j),
        }
    }
}

/// One line of the step log.
#[derive(Clone, Debug, Serialize)]
pub struct ProvenanceRecord {
    pub level: usize,
    pub stage: String,
    pub chosen: Vec<String>,
    pub assertions: Vec<(String, bool)>,
}

/// Scaffold, working family and supports after some number of steps.
/// Indices refer to the whole family passed to [`claim_step`].
#[derive(Clone, Debug, Serialize)]
pub struct ClaimStepState {
    pub level: usize,
    pub scaffold: Vec<usize>,
    pub working: Vec<usize>,
    pub supports: Vec<usize>,
    pub log: Vec<ProvenanceRecord>,
}

fn infeasible(stage: &str, reason: impl Into<String>) -> DecompositionError {
    DecompositionError::StepInfeasible { stage: stage.into(), reason: reason.into() }
}

fn ids_of(f: &GroundedFamily, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| f.member(i).id().to_string()).collect()
}

fn union_idx(f: &GroundedFamily, idx: &[usize]) -> CellSet {
    idx.iter().flat_map(|&i| f.member(i).region().iter()).collect()
}

impl ClaimStepState {
    pub fn from_parts(level: usize, scaffold: Vec<usize>, working: Vec<usize>, supports: Vec<usize>) -> Self {
        ClaimStepState { level, scaffold, working, supports, log: vec![] }
    }

    /// Level 0: ladder-split `start` with `a = 1`, take the first intersecting
    /// pair of the result as the scaffold, and keep the members strictly
    /// between them that avoid both.
    pub fn bootstrap(f: &GroundedFamily, start: &[usize], ladder_b: usize, outgoing: usize) -> Result<Self> {
        let sub = f.subfamily(start);
        let to_f = |i: usize| f.index_of(sub.member(i).id()).expect("subfamily member");
        let ladder = ladder_split(&sub, 1, ladder_b).map_err(|e| infeasible("ladder", e.to_string()))?;
        let pair = ladder
            .h
            .iter()
            .enumerate()
            .flat_map(|(x, &i)| ladder.h[x + 1..].iter().map(move |&j| (i, j)))
            .find(|&(i, j)| sub.member(i).region().intersects(sub.member(j).region()))
            .ok_or_else(|| infeasible("pair", "no intersecting pair in the ladder class"))?;
        let (h1, h2) = (to_f(pair.0), to_f(pair.1));
        let walls = f.member(h1).region().union(f.member(h2).region());
        let working: Vec<usize> = sub
            .between(Some(sub.member(pair.0)), Some(sub.member(pair.1)))
            .into_iter()
            .filter(|&i| !sub.member(i).region().intersects(&walls))
            .map(to_f)
            .collect();
        let mut state = ClaimStepState::from_parts(0, vec![h1, h2], working, vec![]);
        let chi = chi_of(f, &state.working)?;
        state.log.push(ProvenanceRecord {
            level: 0,
            stage: "bootstrap".into(),
            chosen: ids_of(f, &[h1, h2]),
            assertions: vec![(format!("chi(G) = {chi} > {outgoing}"), chi > outgoing)],
        });
        if chi <= outgoing {
            return Err(infeasible("target", format!("chi(G) = {chi} <= {outgoing}")));
        }
        state.audit(f)?;
        Ok(state)
    }

    /// Properties (i), (iii) and (iv); (ii) depends on the chosen targets and
    /// is checked by the caller.
    pub fn audit(&self, f: &GroundedFamily) -> Result<()> {
        let scaffold = union_idx(f, &self.scaffold);
        let outside = ext(&scaffold, &f.frame())?;
        for &g in &self.working {
            let r = f.member(g).region();
            if r.intersects(&scaffold) || r.intersects(&outside) {
                return Err(DecompositionError::AuditFailed(format!("{} is not surrounded by the scaffold", f.member(g).id())));
            }
        }
        for (x, &a) in self.supports.iter().enumerate() {
            for &b in &self.supports[x + 1..] {
                if !f.member(a).region().intersects(f.member(b).region()) {
                    return Err(DecompositionError::AuditFailed(format!(
                        "supports {} and {} are disjoint",
                        f.member(a).id(),
                        f.member(b).id()
                    )));
                }
            }
        }
        let working = union_idx(f, &self.working);
        for m in f.members() {
            let r = m.region();
            if r.intersects(&outside) && r.intersects(&working) {
                if let Some(&s) = self.supports.iter().find(|&&s| !f.member(s).region().intersects(r)) {
                    return Err(DecompositionError::AuditFailed(format!(
                        "{} reaches the exterior and the working family but misses support {}",
                        m.id(),
                        f.member(s).id()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The log as JSON lines.
    pub fn log_jsonl(&self) -> String {
        self.log.iter().map(|r| serde_json::to_string(r).expect("record serializes") + "\n").collect()
    }
}

/// Shortest prefix (or suffix, when `from_right`) of `idx` whose chromatic
/// number reaches `target`.
fn slice_reaching(f: &GroundedFamily, idx: &[usize], target: usize, from_right: bool) -> Result<Option<usize>> {
    for len in 1..=idx.len() {
        let part = if from_right { &idx[idx.len() - len..] } else { &idx[..len] };
        if chi_of(f, part)? >= target {
            return Ok(Some(len));
        }
    }
    Ok(None)
}

/// One induction step: from a scaffold and working family at level `j - 1`,
/// build the next bracket and shrink the working family to one side of it.
///
/// `fj` is the family the new support is drawn from; `f` is the whole
/// family and fixes the indices.
pub fn claim_step(state: &ClaimStepState, fj: &GroundedFamily, f: &GroundedFamily, k: usize, th: &Thresholds) -> Result<ClaimStepState> {
    let level = state.level + 1;
    let frame = f.frame();
    let mut log = state.log.clone();
    let mut record = |stage: &str, chosen: Vec<String>, assertions: Vec<(String, bool)>| {
        log.push(ProvenanceRecord { level, stage: stage.into(), chosen, assertions });
    };

    let chi_in = chi_of(f, &state.working)?;
    record("precondition", vec![], vec![(format!("chi(G') = {chi_in} > {}", th.incoming), chi_in > th.incoming)]);
    if chi_in <= th.incoming {
        return Err(infeasible("precondition", format!("chi(G') = {chi_in} <= {}", th.incoming)));
    }

    let scaffold = union_idx(f, &state.scaffold);
    let mut pillars = vec![];
    let mut cuts = CellSet::new();
    for i in 0..f.len() {
        let r = f.member(i).region();
        if r.intersects(&scaffold) && crate::grid::surrounded_by(&f.member(i).base_cells(), &scaffold, &frame)? {
            pillars.push(i);
            cuts.extend(crate::grid::cut(r, &scaffold)?.iter());
        }
    }
    let (removed, kept): (Vec<usize>, Vec<usize>) = state.working.iter().partition(|&&d| f.member(d).region().intersects(&cuts));
    let chi_removed = chi_of(f, &removed)?;
    record(
        "pillars",
        ids_of(f, &pillars),
        vec![(format!("chi(D) = {chi_removed} <= {}", th.removed_bound), chi_removed <= th.removed_bound)],
    );
    if chi_removed > th.removed_bound {
        return Err(infeasible("pillars", format!("chi(D) = {chi_removed} > {}", th.removed_bound)));
    }

    let kept_fam = f.subfamily(&kept);
    let mut component: Vec<usize> = vec![];
    let mut comp_chi = 0;
    for comp in kept_fam.graph().components() {
        let idx: Vec<usize> = comp.iter().map(|&v| kept[v]).collect();
        let c = chi_of(f, &idx)?;
        if c > comp_chi {
            comp_chi = c;
            component = idx;
        }
    }
    record("component", ids_of(f, &component), vec![(format!("chi(G'') = {comp_chi}"), true)]);

    let left_len = slice_reaching(f, &component, th.side_chi, false)?;
    let right_len = slice_reaching(f, &component, th.side_chi, true)?;
    let (Some(l), Some(r)) = (left_len, right_len) else {
        return Err(infeasible("split", format!("no slice reaches chromatic number {}", th.side_chi)));
    };
    if l + r >= component.len() {
        return Err(infeasible("split", "outer slices leave no middle"));
    }
    let xs = component[..l].to_vec();
    let ys = component[l..component.len() - r].to_vec();
    let zs = component[component.len() - r..].to_vec();
    record("split", ids_of(f, &ys), vec![(format!("|X| = {}, |Y| = {}, |Z| = {}", xs.len(), ys.len(), zs.len()), true)]);

    let y_fam = f.subfamily(&ys);
    let ladder = ladder_split(&y_fam, th.ladder_a, th.ladder_b).map_err(|e| infeasible("ladder", e.to_string()))?;
    let h: Vec<usize> = ladder.h.iter().map(|&i| ys[i]).collect();
    record("ladder", ids_of(f, &h), vec![(format!("chi(H) = {} > {}", ladder.h_chi, th.ladder_a), true)]);

    let h_fam = f.subfamily(&h);
    let clique: Vec<usize> = k_cliques(&h_fam.graph(), k)
        .into_iter()
        .next()
        .ok_or_else(|| infeasible("clique", format!("no {k}-clique in H")))?
        .into_iter()
        .map(|i| h[i])
        .collect();
    let clique_sets: Vec<&GroundedSet> = clique.iter().map(|&i| f.member(i)).collect();
    let int_k = int_of_clique(&clique_sets, &frame)?;
    record("clique", ids_of(f, &clique), vec![(format!("|int(K)| = {}", int_k.len()), !int_k.is_empty())]);

    let p = ys
        .iter()
        .copied()
        .find(|&y| !clique.contains(&y) && f.member(y).region().is_subset(&int_k))
        .ok_or_else(|| infeasible("interior", "no member of Y lies inside int(K)"))?;
    record("interior", ids_of(f, &[p]), vec![]);

    let outside = ext(&scaffold, &frame)?;
    let pr = f.member(p).region();
    let support = fj
        .members()
        .iter()
        .find(|s| s.region().intersects(pr) && s.region().intersects(&outside))
        .and_then(|s| f.index_of(s.id()))
        .ok_or_else(|| infeasible("support", "no member of F_j meets P and the exterior of the scaffold"))?;
    let support_set = f.member(support);

    let side = if component.iter().all(|&g| precedes_idx(support, g)) {
        Side::Left
    } else if component.iter().all(|&g| precedes_idx(g, support)) {
        Side::Right
    } else {
        return Err(infeasible("side", format!("{} has its base among the working family", support_set.id())));
    };
    record("support", ids_of(f, &[support]), vec![(format!("side = {side:?}"), true)]);

    let walls = union_idx(f, &clique).union(support_set.region());
    let pool = if side == Side::Left { &xs } else { &zs };
    let working: Vec<usize> = pool.iter().copied().filter(|&x| !f.member(x).region().intersects(&walls)).collect();
    let mut scaffold_new = state.scaffold.clone();
    scaffold_new.extend(&clique);
    scaffold_new.push(support);
    scaffold_new.sort_unstable();
    scaffold_new.dedup();
    let mut supports = state.supports.clone();
    supports.push(support);

    let chi_out = chi_of(f, &working)?;
    let next = ClaimStepState { level, scaffold: scaffold_new, working, supports, log: vec![] };
    let audit = next.audit(f);
    record(
        "audit",
        ids_of(f, &next.working),
        vec![
            ("(i) working family surrounded, (iii) supports meet, (iv) exterior piercing".into(), audit.is_ok()),
            (format!("(ii) chi(G) = {chi_out} > {}", th.outgoing), chi_out > th.outgoing),
        ],
    );
    audit?;
    if chi_out <= th.outgoing {
        return Err(infeasible("target", format!("chi(G) = {chi_out} <= {}", th.outgoing)));
    }
    Ok(ClaimStepState { log, ..next })
}

/// Indices into a family are already in base order.
fn precedes_idx(a: usize, b: usize) -> bool {
    a < b
}
