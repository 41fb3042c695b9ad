//! Grounded sets and families, pierced families, and the reduction from the
//! latter to the former.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{interval_coloring, Coloring, IntersectionGraph};
use crate::grid::{check_simple, connected_components, CellSet, Frame};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FamilyError {
    #[error("set {id}: {reason}")]
    InvalidSet { id: String, reason: String },
    #[error("bases overlap: {0},{1}")]
    BasesOverlap(String, String),
    #[error("family is not simple: intersection of {ids:?} has {components} components")]
    NotSimple { ids: Vec<String>, components: usize },
    #[error("set {0} does not fit in the frame with a one-cell margin")]
    OutsideFrame(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("pierced member {id}: {reason}")]
    InvalidPierced { id: String, reason: String },
}

/// A 4-connected region in the upper half-plane whose baseline cells form
/// one nonempty contiguous run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundedSet {
    id: String,
    region: CellSet,
    base: (i32, i32),
}

impl GroundedSet {
    pub fn new(id: impl Into<String>, region: CellSet) -> Result<Self, FamilyError> {
        let id = id.into();
        let bad = |reason: &str| FamilyError::InvalidSet { id: id.clone(), reason: reason.to_string() };
        if region.is_empty() {
            return Err(bad("region is empty"));
        }
        if region.bbox().is_some_and(|b| b.min_y < 0) {
            return Err(bad("region reaches below the baseline"));
        }
        if connected_components(&region).len() != 1 {
            return Err(bad("region is not 4-connected"));
        }
        let base = base_run(&region).map_err(bad)?;
        Ok(GroundedSet { id, region, base })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn region(&self) -> &CellSet {
        &self.region
    }

    /// Inclusive column range of the base.
    pub fn base(&self) -> (i32, i32) {
        self.base
    }

    pub fn base_cells(&self) -> CellSet {
        self.region.baseline()
    }

    pub fn with_id(&self, id: impl Into<String>) -> GroundedSet {
        GroundedSet { id: id.into(), ..self.clone() }
    }
}

/// Column range of the row-0 cells, which must be one contiguous run.
pub fn base_run(region: &CellSet) -> Result<(i32, i32), &'static str> {
    let row: Vec<i32> = region.row(0).map(|c| c.x).collect();
    let (Some(&lo), Some(&hi)) = (row.first(), row.last()) else {
        return Err("region misses the baseline");
    };
    if (hi - lo + 1) as usize != row.len() {
        return Err("base is not contiguous");
    }
    Ok((lo, hi))
}

/// `a` strictly left of `b` on the baseline.
pub fn precedes(a: &GroundedSet, b: &GroundedSet) -> Result<bool, FamilyError> {
    let (a0, a1) = a.base;
    let (b0, b1) = b.base;
    if a1 < b0 {
        Ok(true)
    } else if b1 < a0 {
        Ok(false)
    } else {
        Err(FamilyError::BasesOverlap(a.id.clone(), b.id.clone()))
    }
}

/// A simple family of grounded sets with pairwise disjoint bases, kept in
/// left-to-right base order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundedFamily {
    members: Vec<GroundedSet>,
    frame: Frame,
}

impl GroundedFamily {
    /// Validates every family invariant and sorts members by base.
    pub fn new(members: Vec<GroundedSet>, frame: Frame) -> Result<Self, FamilyError> {
        let fam = Self::new_unchecked_simplicity(members, frame)?;
        fam.check_simplicity()?;
        Ok(fam)
    }

    /// Everything but the simplicity check, which is the expensive part.
    pub fn new_unchecked_simplicity(mut members: Vec<GroundedSet>, frame: Frame) -> Result<Self, FamilyError> {
        let mut ids = HashSet::new();
        for m in &members {
            if !ids.insert(m.id.clone()) {
                return Err(FamilyError::DuplicateId(m.id.clone()));
            }
            if !frame.fits(&m.region) {
                return Err(FamilyError::OutsideFrame(m.id.clone()));
            }
        }
        members.sort_by_key(|m| m.base.0);
        for w in members.windows(2) {
            precedes(&w[0], &w[1])?;
        }
        Ok(GroundedFamily { members, frame })
    }

    pub fn check_simplicity(&self) -> Result<(), FamilyError> {
        let regions: Vec<CellSet> = self.members.iter().map(|m| m.region.clone()).collect();
        let rep = check_simple(&regions);
        match rep.violation {
            None => Ok(()),
            Some(v) => Err(FamilyError::NotSimple {
                ids: v.members.iter().map(|&i| self.members[i].id.clone()).collect(),
                components: v.components.len(),
            }),
        }
    }

    /// Re-run every invariant check.
    pub fn validate(&self) -> Result<(), FamilyError> {
        GroundedFamily::new(self.members.clone(), self.frame).map(|_| ())
    }

    pub fn empty(frame: Frame) -> Self {
        GroundedFamily { members: vec![], frame }
    }

    pub fn members(&self) -> &[GroundedSet] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &GroundedSet {
        &self.members[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn ids(&self) -> Vec<String> {
        self.members.iter().map(|m| m.id.clone()).collect()
    }

    pub fn regions(&self) -> Vec<&CellSet> {
        self.members.iter().map(|m| &m.region).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.members.iter().position(|m| m.id == id)
    }

    pub fn union(&self) -> CellSet {
        let mut u = CellSet::new();
        for m in &self.members {
            u.extend(m.region.iter());
        }
        u
    }

    /// Members at the given indices, order preserved. Subfamilies of a valid
    /// family are valid, so nothing is re-checked.
    pub fn subfamily(&self, idx: &[usize]) -> GroundedFamily {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        idx.dedup();
        GroundedFamily { members: idx.iter().map(|&i| self.members[i].clone()).collect(), frame: self.frame }
    }

    pub fn graph(&self) -> IntersectionGraph {
        IntersectionGraph::from_regions(&self.ids(), &self.regions())
    }

    /// Indices of members strictly between `lo` and `hi` in base order;
    /// `None` stands for minus / plus infinity.
    pub fn between(&self, lo: Option<&GroundedSet>, hi: Option<&GroundedSet>) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                let (b0, b1) = self.members[i].base;
                lo.is_none_or(|l| l.base.1 < b0) && hi.is_none_or(|h| b1 < h.base.0)
            })
            .collect()
    }

    pub fn with_frame(&self, frame: Frame) -> Result<GroundedFamily, FamilyError> {
        GroundedFamily::new_unchecked_simplicity(self.members.clone(), frame)
    }
}

/// The subfamily of `f` strictly between `lo` and `hi`.
pub fn restrict_between(f: &GroundedFamily, lo: Option<&GroundedSet>, hi: Option<&GroundedSet>) -> GroundedFamily {
    f.subfamily(&f.between(lo, hi))
}

/// Sets crossing the baseline, each meeting it in one nonempty run. Cells
/// may lie below the baseline; the frame bounds `|y|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiercedFamily {
    members: Vec<(String, CellSet)>,
    frame: Frame,
}

impl PiercedFamily {
    pub fn new(members: Vec<(String, CellSet)>, frame: Frame) -> Result<Self, FamilyError> {
        let mut ids = HashSet::new();
        let mut keyed = Vec::with_capacity(members.len());
        for (id, region) in members {
            let bad = |reason: &str| FamilyError::InvalidPierced { id: id.clone(), reason: reason.to_string() };
            if !ids.insert(id.clone()) {
                return Err(FamilyError::DuplicateId(id));
            }
            if region.is_empty() || connected_components(&region).len() != 1 {
                return Err(bad("region is not 4-connected"));
            }
            let (lo, _) = base_run(&region).map_err(bad)?;
            if !frame.fits(&region.iter().filter(|c| c.y >= 0).collect())
                || !frame.fits(&region.iter().filter(|c| c.y <= 0).collect::<CellSet>().reflect_y())
            {
                return Err(FamilyError::OutsideFrame(id));
            }
            keyed.push((lo, id, region));
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        Ok(PiercedFamily { members: keyed.into_iter().map(|(_, id, r)| (id, r)).collect(), frame })
    }

    pub fn members(&self) -> &[(String, CellSet)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn ids(&self) -> Vec<String> {
        self.members.iter().map(|(id, _)| id.clone()).collect()
    }

    pub fn graph(&self) -> IntersectionGraph {
        let regions: Vec<&CellSet> = self.members.iter().map(|(_, r)| r).collect();
        IntersectionGraph::from_regions(&self.ids(), &regions)
    }

    pub fn base_intervals(&self) -> Vec<(i32, i32)> {
        self.members.iter().map(|(_, r)| base_run(r).expect("validated")).collect()
    }
}

/// One base-color class of a pierced family, split at the baseline.
#[derive(Clone, Debug)]
pub struct ReductionClass {
    /// Indices into the pierced family.
    pub members: Vec<usize>,
    /// Parts on or above the baseline.
    pub upper: GroundedFamily,
    /// Parts on or below the baseline, mirrored upward.
    pub lower: GroundedFamily,
}

#[derive(Clone, Debug)]
pub struct ReductionPlan {
    pub base_coloring: Coloring,
    pub classes: Vec<ReductionClass>,
}

impl ReductionPlan {
    /// Assemble a coloring of the pierced family from colorings of each
    /// class's upper and lower families (indexed like those families).
    ///
    /// A member gets `(class, upper color, lower color)`, flattened.
    pub fn combine(&self, n: usize, per_class: &[(Coloring, Coloring)]) -> Coloring {
        assert_eq!(per_class.len(), self.classes.len());
        let pu = per_class.iter().map(|(u, _)| u.palette()).max().unwrap_or(0).max(1);
        let pl = per_class.iter().map(|(_, l)| l.palette()).max().unwrap_or(0).max(1);
        let mut colors = vec![0; n];
        for (ci, (class, (up, low))) in self.classes.iter().zip(per_class).enumerate() {
            for &m in &class.members {
                let id = &class_id(class, m);
                let ui = class.upper.index_of(id).expect("member in upper family");
                let li = class.lower.index_of(id).expect("member in lower family");
                colors[m] = ci * pu * pl + up.color(ui) * pl + low.color(li);
            }
        }
        Coloring::new(colors)
    }

    /// `classes x max upper palette x max lower palette`.
    pub fn combined_palette_bound(&self, per_class: &[(Coloring, Coloring)]) -> usize {
        let pu = per_class.iter().map(|(u, _)| u.palette()).max().unwrap_or(0).max(1);
        let pl = per_class.iter().map(|(_, l)| l.palette()).max().unwrap_or(0).max(1);
        self.classes.len() * pu * pl
    }
}

fn class_id(class: &ReductionClass, member: usize) -> String {
    // class members and the upper family share base order
    let pos = class.members.iter().position(|&m| m == member).expect("member of class");
    class.upper.member(pos).id().to_string()
}

/// Split a pierced family into base-interval color classes, each yielding a
/// grounded family above the baseline and a mirrored one below it.
pub fn reduce_pierced_to_grounded(p: &PiercedFamily) -> Result<ReductionPlan, FamilyError> {
    let base_coloring = interval_coloring(&p.base_intervals());
    let mut classes = Vec::new();
    for class in base_coloring.classes().into_iter().filter(|c| !c.is_empty()) {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for &m in &class {
            let (id, region) = &p.members[m];
            let up: CellSet = region.iter().filter(|c| c.y >= 0).collect();
            let low: CellSet = region.iter().filter(|c| c.y <= 0).collect::<CellSet>().reflect_y();
            upper.push(GroundedSet::new(id.clone(), up)?);
            lower.push(GroundedSet::new(id.clone(), low)?);
        }
        classes.push(ReductionClass {
            members: class,
            upper: GroundedFamily::new(upper, p.frame)?,
            lower: GroundedFamily::new(lower, p.frame)?,
        });
    }
    Ok(ReductionPlan { base_coloring, classes })
}

/// Serialisable summary of a member, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct MemberSummary {
    pub id: String,
    pub base: (i32, i32),
    pub cells: usize,
}

impl GroundedFamily {
    pub fn summary(&self) -> Vec<MemberSummary> {
        self.members
            .iter()
            .map(|m| MemberSummary { id: m.id.clone(), base: m.base, cells: m.region.len() })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(id: &str, x: i32, h: i32) -> GroundedSet {
        GroundedSet::new(id, CellSet::rect(x, x, 0, h)).unwrap()
    }

    #[test]
    fn grounded_set_validation() {
        assert!(GroundedSet::new("a", CellSet::new()).is_err());
        assert!(GroundedSet::new("a", CellSet::rect(0, 0, 1, 2)).is_err());
        let gap = CellSet::from_coords(&[(0, 0), (0, 1), (1, 1), (2, 1), (2, 0)]);
        assert!(matches!(GroundedSet::new("a", gap), Err(FamilyError::InvalidSet { .. })));
        assert!(GroundedSet::new("a", CellSet::from_coords(&[(0, 0), (2, 0)])).is_err());
    }

    #[test]
    fn precedes_cases() {
        let a = GroundedSet::new("a", CellSet::rect(0, 2, 0, 0)).unwrap();
        let b = GroundedSet::new("b", CellSet::rect(4, 5, 0, 0)).unwrap();
        let c = GroundedSet::new("c", CellSet::rect(3, 3, 0, 0)).unwrap();
        assert!(precedes(&a, &b).unwrap());
        assert!(!precedes(&b, &a).unwrap());
        assert!(precedes(&a, &c).unwrap());
        let d = GroundedSet::new("d", CellSet::rect(2, 3, 0, 0)).unwrap();
        assert_eq!(precedes(&a, &d), Err(FamilyError::BasesOverlap("a".into(), "d".into())));
    }

    #[test]
    fn restrict_between_cases() {
        let f = GroundedFamily::new((0..5).map(|i| col(&format!("m{i}"), 2 * i, 2)).collect(), Frame::with_origin(-2, 14, 5)).unwrap();
        assert_eq!(restrict_between(&f, None, None), f);
        assert!(restrict_between(&f, Some(f.member(4)), None).is_empty());
        let mid = restrict_between(&f, Some(f.member(1)), Some(f.member(4)));
        assert_eq!(mid.ids(), vec!["m2", "m3"]);
    }

    #[test]
    fn family_rejects_overlap_and_margin() {
        let a = GroundedSet::new("A", CellSet::rect(0, 2, 0, 1)).unwrap();
        let b = GroundedSet::new("B", CellSet::rect(2, 3, 0, 0)).unwrap();
        let err = GroundedFamily::new(vec![a.clone(), b], Frame::with_origin(-2, 10, 4)).unwrap_err();
        assert_eq!(err.to_string(), "bases overlap: A,B");
        assert!(matches!(GroundedFamily::new(vec![a], Frame::new(5, 4)), Err(FamilyError::OutsideFrame(_))));
    }

    #[test]
    fn pierced_reduction_small_cases() {
        let frame = Frame::with_origin(-2, 20, 6);
        let p = PiercedFamily::new(
            vec![
                ("a".into(), CellSet::rect(0, 1, -2, 2)),
                ("b".into(), CellSet::rect(4, 5, -1, 1)),
            ],
            frame,
        )
        .unwrap();
        let plan = reduce_pierced_to_grounded(&p).unwrap();
        assert_eq!(plan.classes.len(), 1);
        let per: Vec<_> = plan.classes.iter().map(|c| (Coloring::uniform(c.upper.len()), Coloring::uniform(c.lower.len()))).collect();
        assert_eq!(plan.combine(p.len(), &per).palette(), 1);

        let nested = PiercedFamily::new(
            vec![
                ("a".into(), CellSet::rect(0, 6, 0, 0)),
                ("b".into(), CellSet::rect(1, 5, -1, 0)),
                ("c".into(), CellSet::rect(2, 4, 0, 1)),
            ],
            frame,
        )
        .unwrap();
        let plan = reduce_pierced_to_grounded(&nested).unwrap();
        assert_eq!(plan.classes.len(), 3);
        assert!(plan.classes.iter().all(|c| c.members.len() == 1));
    }

    #[test]
    fn pierced_rejects_missing_baseline() {
        let r = PiercedFamily::new(vec![("a".into(), CellSet::rect(0, 0, 1, 2))], Frame::with_origin(-2, 5, 5));
        assert!(matches!(r, Err(FamilyError::InvalidPierced { .. })));
    }
}

/// An arc `S`, a set of pillars and a family `D`, with pillars and `D`
/// forming one grounded family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PillarScene {
    pub s: CellSet,
    pub family: GroundedFamily,
    /// Indices of pillars in `family`, in base order.
    pub pillars: Vec<usize>,
    /// Indices of `D` members in `family`, in base order.
    pub d: Vec<usize>,
}

impl PillarScene {
    /// Sorts everything into place; `pillars` and `d` are split by id.
    pub fn new(s: CellSet, pillars: Vec<GroundedSet>, d: Vec<GroundedSet>, frame: Frame) -> Result<Self, FamilyError> {
        let pillar_ids: HashSet<String> = pillars.iter().map(|p| p.id.clone()).collect();
        let family = GroundedFamily::new(pillars.into_iter().chain(d).collect(), frame)?;
        if !frame.fits(&s) {
            return Err(FamilyError::OutsideFrame("S".into()));
        }
        let (pillars, d): (Vec<usize>, Vec<usize>) = (0..family.len()).partition(|&i| pillar_ids.contains(family.member(i).id()));
        Ok(PillarScene { s, family, pillars, d })
    }

    pub fn frame(&self) -> Frame {
        self.family.frame()
    }

    pub fn pillar_sets(&self) -> Vec<&GroundedSet> {
        self.pillars.iter().map(|&i| self.family.member(i)).collect()
    }

    pub fn d_sets(&self) -> Vec<&GroundedSet> {
        self.d.iter().map(|&i| self.family.member(i)).collect()
    }

    pub fn d_family(&self) -> GroundedFamily {
        self.family.subfamily(&self.d)
    }
}
