//! Family and scene files.
//!
//! ```text
//! { "frame": {"width": W, "height": H, "x_min": X},
//!   "pierced": false,
//!   "sets": [ {"id": "A", "cells": [[x, y], ...], "role": "D"}, ... ] }
//! ```
//!
//! `x_min` defaults to 0. `role` is one of `S`, `pillar`, `D`; a file with
//! any role is a pillar scene.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::family::{FamilyError, GroundedFamily, GroundedSet, PiercedFamily, PillarScene};
use crate::grid::{CellSet, Frame};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Validation(#[from] FamilyError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Loaded {
    Grounded(GroundedFamily),
    Pierced(PiercedFamily),
    Scene(PillarScene),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    frame: Frame,
    #[serde(default)]
    pierced: bool,
    sets: Vec<RawSet>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    id: String,
    cells: Vec<[i32; 2]>,
    #[serde(default)]
    role: Option<String>,
}

pub fn parse_str(text: &str) -> Result<Loaded, LoadError> {
    let raw: RawFile = serde_json::from_str(text)
        .map_err(|e| LoadError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let frame = raw.frame;
    let field = |i: usize, message: &str| LoadError::Field { field: format!("sets[{i}]"), message: message.into() };
    let has_roles = raw.sets.iter().any(|s| s.role.is_some());

    if raw.pierced {
        if has_roles {
            return Err(LoadError::Field { field: "pierced".into(), message: "pierced files carry no roles".into() });
        }
        let members = raw.sets.into_iter().map(|s| (s.id, cells(&s.cells))).collect();
        return Ok(Loaded::Pierced(PiercedFamily::new(members, frame)?));
    }
    if !has_roles {
        let members = raw
            .sets
            .into_iter()
            .map(|s| GroundedSet::new(s.id, cells(&s.cells)))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Loaded::Grounded(GroundedFamily::new(members, frame)?));
    }

    let mut s = None;
    let mut pillars = Vec::new();
    let mut d = Vec::new();
    for (i, set) in raw.sets.into_iter().enumerate() {
        match set.role.as_deref() {
            Some("S") if s.is_none() => s = Some(cells(&set.cells)),
            Some("S") => return Err(field(i, "more than one set has role S")),
            Some("pillar") => pillars.push(GroundedSet::new(set.id, cells(&set.cells))?),
            Some("D") => d.push(GroundedSet::new(set.id, cells(&set.cells))?),
            Some(other) => return Err(field(i, &format!("unknown role {other:?}"))),
            None => return Err(field(i, "missing role in a scene file")),
        }
    }
    let s = s.ok_or_else(|| LoadError::Field { field: "sets".into(), message: "no set has role S".into() })?;
    Ok(Loaded::Scene(PillarScene::new(s, pillars, d, frame)?))
}

pub fn load(path: impl AsRef<Path>) -> Result<Loaded, LoadError> {
    parse_str(&std::fs::read_to_string(path)?)
}

pub fn save(item: &Loaded, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, to_canonical_json(item))
}

fn cells(raw: &[[i32; 2]]) -> CellSet {
    raw.iter().map(|&[x, y]| crate::grid::Cell::new(x, y)).collect()
}

pub fn to_canonical_json(item: &Loaded) -> String {
    match item {
        Loaded::Grounded(f) => family_json(f),
        Loaded::Pierced(p) => {
            let sets: Vec<_> = p.members().iter().map(|(id, r)| (id.as_str(), r, None)).collect();
            render(p.frame(), true, &sets)
        }
        Loaded::Scene(sc) => scene_json(sc),
    }
}

pub fn family_json(f: &GroundedFamily) -> String {
    let sets: Vec<_> = f.members().iter().map(|m| (m.id(), m.region(), None)).collect();
    render(f.frame(), false, &sets)
}

pub fn scene_json(sc: &PillarScene) -> String {
    let mut sets = vec![("S", &sc.s, Some("S"))];
    for (i, m) in sc.family.members().iter().enumerate() {
        let role = if sc.pillars.contains(&i) { "pillar" } else { "D" };
        sets.push((m.id(), m.region(), Some(role)));
    }
    render(sc.frame(), false, &sets)
}

fn render(frame: Frame, pierced: bool, sets: &[(&str, &CellSet, Option<&str>)]) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"frame\": {},", serde_json::to_string(&frame).expect("frame serializes"));
    let _ = writeln!(out, "  \"pierced\": {pierced},");
    out.push_str("  \"sets\": [");
    for (i, (id, region, role)) in sets.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let cells: Vec<String> = region.iter().map(|c| format!("[{},{}]", c.x, c.y)).collect();
        let _ = write!(out, "    {{\"id\": {}", serde_json::to_string(id).expect("id serializes"));
        if let Some(role) = role {
            let _ = write!(out, ", \"role\": \"{role}\"");
        }
        let _ = write!(out, ", \"cells\": [{}]}}", cells.join(","));
    }
    out.push_str(if sets.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"frame": {"width": 12, "height": 5, "x_min": -2}, "pierced": false,
        "sets": [{"id": "B", "cells": [[4,0],[4,1],[4,2],[3,2],[2,2]]},
                 {"id": "A", "cells": [[0,0],[0,1],[0,2],[1,2],[2,2]]}]}"#;

    #[test]
    fn loads_and_sorts() {
        let Loaded::Grounded(f) = parse_str(TWO).unwrap() else { panic!("grounded expected") };
        assert_eq!(f.ids(), vec!["A", "B"]);
        let again = parse_str(&family_json(&f)).unwrap();
        assert_eq!(again, Loaded::Grounded(f));
    }

    #[test]
    fn overlapping_bases_message() {
        let text = r#"{"frame": {"width": 10, "height": 4, "x_min": -2}, "pierced": false,
            "sets": [{"id": "A", "cells": [[0,0],[1,0]]}, {"id": "B", "cells": [[1,0],[2,0]]}]}"#;
        let err = parse_str(text).unwrap_err();
        assert!(matches!(err, LoadError::Validation(FamilyError::BasesOverlap(..))));
        assert_eq!(err.to_string(), "bases overlap: A,B");
    }

    #[test]
    fn non_contiguous_base_rejected() {
        let text = r#"{"frame": {"width": 10, "height": 4, "x_min": -2}, "pierced": false,
            "sets": [{"id": "A", "cells": [[0,0],[0,1],[1,1],[2,1],[2,0]]}]}"#;
        assert!(matches!(parse_str(text), Err(LoadError::Validation(FamilyError::InvalidSet { .. }))));
    }

    #[test]
    fn parse_error_carries_line() {
        let err = parse_str("{\n\"frame\": {\"width\": 3,\n \"height\": }").unwrap_err();
        match err {
            LoadError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(parse_str(r#"{"frame": {"width": 3, "height": 3}}"#), Err(LoadError::Parse { .. })));
    }

    #[test]
    fn pierced_round_trip() {
        let text = r#"{"frame": {"width": 10, "height": 5, "x_min": -2}, "pierced": true,
            "sets": [{"id": "q", "cells": [[4,-1],[4,0],[4,1]]}, {"id": "p", "cells": [[0,-2],[0,-1],[0,0]]}]}"#;
        let loaded = parse_str(text).unwrap();
        let Loaded::Pierced(p) = &loaded else { panic!() };
        assert_eq!(p.ids(), vec!["p", "q"]);
        assert_eq!(parse_str(&to_canonical_json(&loaded)).unwrap(), loaded);
    }

    #[test]
    fn scene_roles() {
        let text = r#"{"frame": {"width": 12, "height": 7, "x_min": -2}, "pierced": false,
            "sets": [{"id": "S", "role": "S", "cells": [[0,0],[0,1],[0,2],[0,3],[1,3],[2,3],[3,3],[4,3],[4,2],[4,1],[4,0]]},
                     {"id": "R1", "role": "pillar", "cells": [[2,0],[2,1],[2,2]]},
                     {"id": "D1", "role": "D", "cells": [[1,0],[1,1]]}]}"#;
        let loaded = parse_str(text).unwrap();
        let Loaded::Scene(sc) = &loaded else { panic!() };
        assert_eq!(sc.pillars, vec![1]);
        assert_eq!(sc.d, vec![0]);
        assert_eq!(parse_str(&to_canonical_json(&loaded)).unwrap(), loaded);
        let bad = text.replace("\"pillar\"", "\"post\"");
        assert!(matches!(parse_str(&bad), Err(LoadError::Field { .. })));
    }
}
