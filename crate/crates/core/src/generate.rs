//! Seeded instance generators and canonical fixtures.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::family::{FamilyError, GroundedFamily, GroundedSet, PiercedFamily, PillarScene};
use crate::graph::{omega_exact, IntersectionGraph};
use crate::grid::{check_simple, Cell, CellSet, Frame};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("generation budget exceeded: {attempts} attempts without a valid member {member}")]
    BudgetExceeded { member: usize, attempts: usize },
    #[error("frame too small for the requested structure")]
    FrameTooSmall,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Rejection counts from a randomized generator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GenReport {
    pub seed: u64,
    /// Attempts spent on each member, accepted one included.
    pub attempts: Vec<usize>,
    pub rejected_not_simple: usize,
    pub rejected_clique: usize,
    pub rejected_other: usize,
    /// Members given up on after exhausting their attempts.
    pub skipped: usize,
}

impl GenReport {
    fn new(seed: u64) -> Self {
        GenReport { seed, ..Default::default() }
    }

    pub fn rejections(&self) -> usize {
        self.rejected_not_simple + self.rejected_clique + self.rejected_other
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// True if adding `new` keeps the family simple, given that `existing`
/// already is.
pub fn extends_simply<'a>(existing: impl IntoIterator<Item = &'a CellSet>, new: &CellSet) -> bool {
    let parts: Vec<CellSet> = existing.into_iter().filter(|e| e.intersects(new)).map(|e| e.intersection(new)).collect();
    check_simple(&parts).passed
}

/// Largest clique through `new` when added to `existing`.
pub fn clique_through<'a>(existing: impl IntoIterator<Item = &'a CellSet>, new: &CellSet) -> usize {
    let nbrs: Vec<&CellSet> = existing.into_iter().filter(|e| e.intersects(new)).collect();
    let ids: Vec<String> = (0..nbrs.len()).map(|i| i.to_string()).collect();
    1 + omega_exact(&IntersectionGraph::from_regions(&ids, &nbrs)).0
}

fn letter_id(i: usize, count: usize) -> String {
    if count <= 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("K{}", i + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    /// Number of baseline columns available to bases; defaults to `3n + 4`.
    pub width: Option<u32>,
    pub height: u32,
    pub growth_steps: usize,
    /// Probability that a walk step is horizontal.
    pub attach_bias: f64,
    /// Probability of restarting the walk from a random cell of the set.
    pub branch_prob: f64,
    /// Reject steps that would create a clique larger than this.
    pub max_clique: Option<usize>,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            n: 10,
            width: None,
            height: 8,
            growth_steps: 12,
            attach_bias: 0.6,
            branch_prob: 0.15,
            max_clique: None,
        }
    }
}

/// Grow `n` grounded sets as random walks above disjoint base runs. A walk
/// step is rejected when it would break simplicity or the clique cap.
pub fn gen_random(seed: u64, params: &RandomParams) -> Result<(GroundedFamily, GenReport), GenerateError> {
    if params.n == 0 || params.height < 3 {
        return Err(GenerateError::InvalidParams("n must be positive and height at least 3".into()));
    }
    let width = params.width.unwrap_or(3 * params.n as u32 + 4);
    if (width as usize) < params.n {
        return Err(GenerateError::FrameTooSmall);
    }
    let frame = Frame::with_origin(-1, width + 2, params.height);
    let mut rng = rng(seed);
    let mut report = GenReport::new(seed);

    let mut cols: Vec<i32> = sample(&mut rng, width as usize, params.n).into_iter().map(|c| c as i32).collect();
    cols.sort_unstable();
    let mut bases = Vec::with_capacity(params.n);
    for (i, &c) in cols.iter().enumerate() {
        let next = cols.get(i + 1).copied().unwrap_or(width as i32);
        let hi = if c + 1 < next && rng.gen_bool(0.3) { c + 1 } else { c };
        bases.push((c, hi));
    }

    // each member starts with its base and the cells right above it, which
    // no other walk may enter
    let stems: Vec<CellSet> = bases.iter().map(|&(lo, hi)| CellSet::rect(lo, hi, 0, 1)).collect();
    let mut regions: Vec<CellSet> = Vec::with_capacity(params.n);
    for (i, &(lo, hi)) in bases.iter().enumerate() {
        let start = CellSet::rect(lo, hi, 0, 0).union(&CellSet::from_coords(&[(rng.gen_range(lo..=hi), 1)]));
        let foreign = |r: &CellSet| stems.iter().enumerate().any(|(j, st)| j != i && st.intersects(r));
        let region = random_walk(&mut rng, start, &frame, params, |r| {
            !foreign(r) && admissible(&regions, r, params.max_clique, &mut report)
        });
        regions.push(region);
        report.attempts.push(1);
    }
    let members = regions
        .into_iter()
        .enumerate()
        .map(|(i, r)| GroundedSet::new(format!("F{i}"), r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((GroundedFamily::new_unchecked_simplicity(members, frame)?, report))
}

/// Simple after adding `region`, and no clique above `max_clique`.
fn admissible(existing: &[CellSet], region: &CellSet, max_clique: Option<usize>, report: &mut GenReport) -> bool {
    if !extends_simply(existing, region) {
        report.rejected_not_simple += 1;
        return false;
    }
    if max_clique.is_some_and(|w| clique_through(existing, region) > w) {
        report.rejected_clique += 1;
        return false;
    }
    true
}

/// Grow `region` by a random walk above the baseline. Each step is kept only
/// if `accept` approves the enlarged set.
fn random_walk(
    rng: &mut ChaCha8Rng,
    mut region: CellSet,
    frame: &Frame,
    params: &RandomParams,
    mut accept: impl FnMut(&CellSet) -> bool,
) -> CellSet {
    let top = frame.height as i32 - 2;
    let (left, right) = (frame.x_min + 1, frame.x_max() - 1);
    let upper = |r: &CellSet| -> Vec<Cell> { r.iter().filter(|c| c.y >= 1).collect() };
    let mut head = *upper(&region).last().expect("walk starts above the baseline");
    for _ in 0..params.growth_steps {
        if rng.gen_bool(params.branch_prob) {
            let cells = upper(&region);
            head = cells[rng.gen_range(0..cells.len())];
        }
        let next = if rng.gen_bool(params.attach_bias) {
            Cell::new(head.x + if rng.gen_bool(0.5) { 1 } else { -1 }, head.y)
        } else {
            Cell::new(head.x, head.y + if rng.gen_bool(0.6) { 1 } else { -1 })
        };
        if next.y < 1 || next.y > top || next.x < left || next.x > right {
            continue;
        }
        if !region.contains(next) {
            let mut grown = region.clone();
            grown.insert(next);
            if !accept(&grown) {
                continue;
            }
            region = grown;
        }
        head = next;
    }
    region
}

/// A random grounded set that extends `existing` simply: a one-column stem
/// on a free baseline cell grown by `steps` walk steps. `None` if no
/// baseline cell is free.
pub fn gen_probe(rng: &mut ChaCha8Rng, existing: &[CellSet], frame: &Frame, steps: usize) -> Option<CellSet> {
    let taken: CellSet = existing.iter().fold(CellSet::new(), |acc, r| acc.union(r));
    let free: Vec<i32> = (frame.x_min + 1..frame.x_max())
        .filter(|&x| !taken.contains(Cell::new(x, 0)) && extends_simply(existing, &CellSet::rect(x, x, 0, 1)))
        .collect();
    if free.is_empty() {
        return None;
    }
    let x = free[rng.gen_range(0..free.len())];
    let params = RandomParams { growth_steps: steps, ..RandomParams::default() };
    Some(random_walk(rng, CellSet::rect(x, x, 0, 1), frame, &params, |r| extends_simply(existing, r)))
}

/// A family with a designated clique.
#[derive(Clone, Debug)]
pub struct CliqueFixture {
    pub family: GroundedFamily,
    pub clique: Vec<usize>,
}

/// Arches meeting over a common column: left members rise at x = 0, 2, ...
/// and run right along row 2 to the center column, right members rise to
/// the right of it and run left. `k = 2` gives the two-arch fixture.
pub fn gen_clique(k: usize) -> Result<CliqueFixture, GenerateError> {
    if k == 0 {
        return Err(GenerateError::InvalidParams("k must be positive".into()));
    }
    let frame = clique_frame(k, -2);
    let members = clique_sets(k)?;
    let family = GroundedFamily::new(members, frame)?;
    Ok(CliqueFixture { clique: (0..k).collect(), family })
}

const ARCH_ROW: i32 = 2;

fn clique_frame(k: usize, x_min: i32) -> Frame {
    let last = 2 * k as i32;
    Frame::with_origin(x_min, (last + 3 - x_min) as u32, ARCH_ROW as u32 + 3)
}

fn clique_sets(k: usize) -> Result<Vec<GroundedSet>, GenerateError> {
    let left = k.div_ceil(2);
    let center = 2 * left as i32;
    (0..k)
        .map(|i| {
            let (leg, lo, hi) = if i < left {
                let x = 2 * i as i32;
                (x, x, center)
            } else {
                let x = center + 2 * (i - left + 1) as i32;
                (x, center, x)
            };
            let region = CellSet::rect(leg, leg, 0, ARCH_ROW).union(&CellSet::rect(lo, hi, ARCH_ROW, ARCH_ROW));
            GroundedSet::new(letter_id(i, k), region).map_err(GenerateError::from)
        })
        .collect()
}

/// Which side of the clique the support stands on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// A clique plus a support set.
#[derive(Clone, Debug)]
pub struct BracketFixture {
    pub family: GroundedFamily,
    pub clique: Vec<usize>,
    pub support: usize,
    pub side: Side,
}

/// [`gen_clique`] plus a support `S` standing left of the clique whose arm
/// pokes through the first leg into the region under the arches.
pub fn gen_bracket(k: usize) -> Result<BracketFixture, GenerateError> {
    if k < 2 {
        return Err(GenerateError::InvalidParams("a bracket needs k >= 2".into()));
    }
    let mut members = clique_sets(k)?;
    let support = CellSet::rect(-2, -2, 0, 1).union(&CellSet::rect(-1, 1, 1, 1));
    members.push(GroundedSet::new("S", support)?);
    let family = GroundedFamily::new(members, clique_frame(k, -4))?;
    let support = family.index_of("S").expect("support present");
    let clique = (0..family.len()).filter(|&i| i != support).collect();
    Ok(BracketFixture { family, clique, support, side: Side::Left })
}

/// Geometry of a pillar scene: an arch `S` with legs at `p` and `q` and its
/// bar on row `top`, and pillar columns between the legs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SceneLayout {
    pub p: i32,
    pub q: i32,
    pub top: i32,
    pub pillar_x: Vec<i32>,
}

impl SceneLayout {
    /// `m` pillars separated by corridors `corridor` cells wide.
    pub fn new(m: usize, corridor: i32, top: i32) -> Self {
        let step = corridor + 1;
        SceneLayout { p: 0, q: (m as i32 + 1) * step, top, pillar_x: (1..=m as i32).map(|i| i * step).collect() }
    }

    pub fn arch(&self) -> CellSet {
        CellSet::rect(self.p, self.p, 0, self.top)
            .union(&CellSet::rect(self.q, self.q, 0, self.top))
            .union(&CellSet::rect(self.p, self.q, self.top, self.top))
    }

    pub fn frame(&self) -> Frame {
        Frame::with_origin(self.p - 2, (self.q - self.p + 5) as u32, self.top as u32 + 3)
    }

    fn pillar(&self, i: usize) -> CellSet {
        let x = self.pillar_x[i];
        CellSet::rect(x, x, 0, self.top)
    }
}

/// An L-shaped set: a stem up from the baseline at `x`, then a bar along row
/// `height` reaching `reach` columns to the right (negative: left), then an
/// optional drop of `drop` cells at the far end.
pub fn hook(x: i32, height: i32, reach: i32, drop: i32) -> CellSet {
    let end = x + reach;
    CellSet::rect(x, x, 0, height)
        .union(&CellSet::rect(x.min(end), x.max(end), height, height))
        .union(&CellSet::rect(end, end, height - drop, height))
}

/// The canonical scene with `m` plain pillars. Around each pillar sit two
/// disjoint hooks: one rising just left of it and crossing it on row 3, one
/// rising just right of it and crossing it on row 2.
pub fn gen_pillars(m: usize) -> Result<PillarScene, GenerateError> {
    if m == 0 {
        return Err(GenerateError::InvalidParams("m must be positive".into()));
    }
    let layout = SceneLayout::new(m, 3, 6);
    let pillars = (0..m)
        .map(|i| GroundedSet::new(format!("R{}", i + 1), layout.pillar(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut d = Vec::new();
    for (i, &x) in layout.pillar_x.iter().enumerate() {
        d.push(GroundedSet::new(format!("D{}r", i + 1), hook(x - 2, 3, 3, 0))?);
        d.push(GroundedSet::new(format!("D{}l", i + 1), hook(x + 1, 2, -2, 0))?);
    }
    Ok(PillarScene::new(layout.arch(), pillars, d, layout.frame())?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneParams {
    pub m: usize,
    pub n_d: usize,
    pub corridor: i32,
    pub top: i32,
    /// Probability that a pillar carries an arm across to the next one.
    pub arm_prob: f64,
    /// Probability that a hook ends in a downward drop.
    pub drop_prob: f64,
    /// Reject members that would create a clique larger than this.
    pub max_clique: Option<usize>,
    pub max_attempts: usize,
}

impl Default for SceneParams {
    fn default() -> Self {
        SceneParams {
            m: 3,
            n_d: 8,
            corridor: 4,
            top: 8,
            arm_prob: 0.3,
            drop_prob: 0.3,
            max_clique: None,
            max_attempts: 60,
        }
    }
}

/// A random pillar scene. Pillars are columns under the arch bar, some with
/// an arm crossing into the next pillar; `D` members are hooks that cross at
/// least one pillar below the bar.
pub fn gen_scene(seed: u64, params: &SceneParams) -> Result<(PillarScene, GenReport), GenerateError> {
    if params.m == 0 || params.corridor < 2 || params.top < 4 {
        return Err(GenerateError::InvalidParams("need m >= 1, corridor >= 2, top >= 4".into()));
    }
    let layout = SceneLayout::new(params.m, params.corridor, params.top);
    let mut rng = rng(seed);
    let mut report = GenReport::new(seed);

    let mut pillars: Vec<CellSet> = (0..params.m).map(|i| layout.pillar(i)).collect();
    for i in 0..params.m.saturating_sub(1) {
        if rng.gen_bool(params.arm_prob) {
            let row = rng.gen_range(2..params.top - 1);
            let arm = CellSet::rect(layout.pillar_x[i], layout.pillar_x[i + 1], row, row);
            let with_arm = pillars[i].union(&arm);
            let others = pillars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r);
            if extends_simply(others, &with_arm) {
                pillars[i] = with_arm;
            }
        }
    }

    let mut free: Vec<i32> = (layout.p + 1..layout.q).filter(|x| !layout.pillar_x.contains(x)).collect();
    let mut d: Vec<CellSet> = Vec::new();
    for _ in 0..params.n_d {
        if free.is_empty() {
            break;
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > params.max_attempts {
                report.skipped += 1;
                break;
            }
            let x = free[rng.gen_range(0..free.len())];
            let height = rng.gen_range(1..params.top - 1);
            let (room_right, room_left) = (layout.q - 1 - x, x - layout.p - 1);
            let go_right = room_left == 0 || (room_right > 0 && rng.gen_bool(0.5));
            let reach = if go_right { rng.gen_range(1..=room_right) } else { -rng.gen_range(1..=room_left) };
            let drop = if height > 1 && rng.gen_bool(params.drop_prob) { rng.gen_range(1..height) } else { 0 };
            let region = hook(x, height, reach, drop);
            if !pillars.iter().any(|r| r.intersects(&region)) {
                report.rejected_other += 1;
                continue;
            }
            let existing = || pillars.iter().chain(d.iter());
            if !extends_simply(existing(), &region) {
                report.rejected_not_simple += 1;
                continue;
            }
            if params.max_clique.is_some_and(|w| clique_through(existing(), &region) > w) {
                report.rejected_clique += 1;
                continue;
            }
            free.retain(|&f| f != x);
            d.push(region);
            report.attempts.push(attempts);
            break;
        }
    }

    let pillars = pillars
        .into_iter()
        .enumerate()
        .map(|(i, r)| GroundedSet::new(format!("R{}", i + 1), r))
        .collect::<Result<Vec<_>, _>>()?;
    let d = d
        .into_iter()
        .enumerate()
        .map(|(i, r)| GroundedSet::new(format!("D{i}"), r))
        .collect::<Result<Vec<_>, _>>()?;
    if d.is_empty() && params.n_d > 0 {
        return Err(GenerateError::BudgetExceeded { member: 0, attempts: params.max_attempts });
    }
    Ok((PillarScene::new(layout.arch(), pillars, d, layout.frame())?, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiercedParams {
    pub n: usize,
    /// Baseline columns available; defaults to `2n + 4`.
    pub width: Option<u32>,
    /// Cells satisfy `|y| <= height - 2`.
    pub height: u32,
    pub growth_steps: usize,
    pub max_base: i32,
    pub max_attempts: usize,
}

impl Default for PiercedParams {
    fn default() -> Self {
        PiercedParams { n: 8, width: None, height: 6, growth_steps: 8, max_base: 4, max_attempts: 400 }
    }
}

/// Random pierced family: base runs may overlap; the parts above and below
/// the baseline are random walks, kept simple on each side.
pub fn gen_pierced(seed: u64, params: &PiercedParams) -> Result<(PiercedFamily, GenReport), GenerateError> {
    if params.n == 0 || params.height < 3 || params.max_base < 1 {
        return Err(GenerateError::InvalidParams("n, max_base must be positive and height at least 3".into()));
    }
    let width = params.width.unwrap_or(2 * params.n as u32 + 4) as i32;
    let frame = Frame::with_origin(-1, width as u32 + 2, params.height);
    let walk = RandomParams {
        n: 1,
        width: Some(width as u32),
        height: params.height,
        growth_steps: params.growth_steps,
        attach_bias: 0.5,
        branch_prob: 0.15,
        max_clique: None,
    };
    let mut rng = rng(seed);
    let mut report = GenReport::new(seed);
    let mut uppers: Vec<CellSet> = Vec::new();
    let mut lowers: Vec<CellSet> = Vec::new();
    let mut members = Vec::new();
    for i in 0..params.n {
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > params.max_attempts {
                return Err(GenerateError::BudgetExceeded { member: i, attempts: params.max_attempts });
            }
            let lo = rng.gen_range(0..width);
            let hi = (lo + rng.gen_range(0..params.max_base)).min(width - 1);
            let x = rng.gen_range(lo..=hi);
            let start = CellSet::rect(lo, hi, 0, 0).union(&CellSet::from_coords(&[(x, 1)]));
            if !admissible(&uppers, &start, None, &mut report) || !admissible(&lowers, &start, None, &mut report) {
                continue;
            }
            let up = random_walk(&mut rng, start.clone(), &frame, &walk, |r| admissible(&uppers, r, None, &mut report));
            let down = random_walk(&mut rng, start, &frame, &walk, |r| admissible(&lowers, r, None, &mut report));
            members.push((format!("P{i}"), up.union(&down.reflect_y())));
            uppers.push(up);
            lowers.push(down);
            report.attempts.push(attempts);
            break;
        }
    }
    Ok((PiercedFamily::new(members, frame)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::reduce_pierced_to_grounded;

    #[test]
    fn clique_2_is_the_two_arch_fixture() {
        let f = gen_clique(2).unwrap().family;
        assert_eq!(f.ids(), vec!["A", "B"]);
        assert_eq!(f.member(0).region(), &CellSet::from_coords(&[(0, 0), (0, 1), (0, 2), (1, 2), (2, 2)]));
        assert_eq!(f.member(1).region(), &CellSet::from_coords(&[(4, 0), (4, 1), (4, 2), (3, 2), (2, 2)]));
    }

    #[test]
    fn cliques_are_cliques() {
        for k in 1..=7 {
            let fx = gen_clique(k).unwrap();
            let g = fx.family.graph();
            assert_eq!(omega_exact(&g).0, k);
            fx.family.validate().unwrap();
        }
    }

    #[test]
    fn bracket_validates() {
        for k in 2..=5 {
            let b = gen_bracket(k).unwrap();
            b.family.validate().unwrap();
            assert_eq!(b.family.member(b.support).id(), "S");
            assert_eq!(b.support, 0);
        }
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let p = RandomParams { n: 12, ..Default::default() };
        let (a, ra) = gen_random(7, &p).unwrap();
        let (b, rb) = gen_random(7, &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        a.validate().unwrap();
        assert_eq!(a.len(), 12);
        let (one, _) = gen_random(1, &RandomParams { n: 1, ..Default::default() }).unwrap();
        one.validate().unwrap();
    }

    #[test]
    fn random_respects_clique_cap() {
        let p = RandomParams { n: 10, max_clique: Some(2), ..Default::default() };
        for seed in 0..5 {
            let (f, _) = gen_random(seed, &p).unwrap();
            assert!(omega_exact(&f.graph()).0 <= 2);
        }
    }

    #[test]
    fn canonical_pillars() {
        let sc = gen_pillars(3).unwrap();
        assert_eq!(sc.pillars.len(), 3);
        assert_eq!(sc.d.len(), 6);
        sc.family.validate().unwrap();
        assert!(omega_exact(&sc.family.graph()).0 <= 2);
    }

    #[test]
    fn random_scenes_validate() {
        let p = SceneParams { max_clique: Some(2), ..Default::default() };
        for seed in 0..10 {
            let (sc, _) = gen_scene(seed, &p).unwrap();
            sc.family.validate().unwrap();
            for r in sc.pillar_sets() {
                assert!(r.region().intersects(&sc.s));
            }
        }
    }

    #[test]
    fn pierced_reduces() {
        for seed in 0..10 {
            let (p, _) = gen_pierced(seed, &PiercedParams::default()).unwrap();
            reduce_pierced_to_grounded(&p).unwrap();
        }
    }
}
