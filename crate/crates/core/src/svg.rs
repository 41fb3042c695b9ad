//! SVG pictures of families, scenes and pipeline traces.
//!
//! Output is a pure function of the input; the only line that may change
//! between builds is the version comment.

use std::fmt::Write as _;

use crate::family::{GroundedFamily, PiercedFamily, PillarScene};
use crate::grid::{BBox, CellSet};

const CELL: i32 = 16;
const PALETTE: [&str; 10] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlayStyle {
    /// Filled with diagonal hatching.
    Hatched,
    /// Dashed outline of the bounding box only.
    Outline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlay {
    pub class: String,
    pub label: String,
    pub cells: CellSet,
    pub style: OverlayStyle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Plain,
    Arc,
    Pillar,
    Member,
}

struct Shape<'a> {
    id: &'a str,
    cells: &'a CellSet,
    role: Role,
}

struct Canvas {
    min_x: i32,
    max_y: i32,
    width: i32,
    height: i32,
}

impl Canvas {
    fn new(bb: BBox) -> Self {
        Canvas {
            min_x: bb.min_x - 1,
            max_y: bb.max_y + 1,
            width: (bb.max_x - bb.min_x + 3) * CELL,
            height: (bb.max_y - bb.min_y + 3) * CELL,
        }
    }

    fn x(&self, x: i32) -> i32 {
        (x - self.min_x) * CELL
    }

    fn y(&self, y: i32) -> i32 {
        (self.max_y - y) * CELL
    }
}

fn merge(a: Option<BBox>, b: Option<BBox>) -> Option<BBox> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(BBox {
            min_x: a.min_x.min(b.min_x),
            max_x: a.max_x.max(b.max_x),
            min_y: a.min_y.min(b.min_y),
            max_y: a.max_y.max(b.max_y),
        }),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn cell_path(c: &Canvas, cells: &CellSet) -> String {
    let mut d = String::new();
    for cell in cells.iter() {
        let _ = write!(d, "M{} {}h{}v{}h-{}z", c.x(cell.x), c.y(cell.y), CELL, CELL, CELL);
    }
    d
}

fn render(shapes: &[Shape], overlays: &[Overlay]) -> String {
    let bb = shapes
        .iter()
        .map(|s| s.cells.bbox())
        .chain(overlays.iter().map(|o| o.cells.bbox()))
        .fold(Some(BBox { min_x: 0, max_x: 0, min_y: 0, max_y: 0 }), merge)
        .expect("seeded with the origin");
    let c = Canvas::new(bb);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = c.width,
        h = c.height
    );
    let _ = writeln!(out, "<!-- grounded-chi {} -->", env!("CARGO_PKG_VERSION"));
    out.push_str(concat!(
        "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">",
        "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#333\" stroke-width=\"1.5\"/></pattern></defs>\n"
    ));
    let base_y = c.y(0) + CELL;
    let _ = writeln!(out, r##"<line class="baseline" x1="0" y1="{base_y}" x2="{}" y2="{base_y}" stroke="#000" stroke-width="2"/>"##, c.width);

    let mut colour = 0;
    for s in shapes {
        let (fill, extra) = match s.role {
            Role::Arc => ("none", r##" stroke="#000" stroke-dasharray="4 3" stroke-width="1.5""##),
            Role::Pillar => ("#777", r##" fill-opacity="0.55" stroke="#333""##),
            Role::Plain | Role::Member => {
                colour += 1;
                (PALETTE[(colour - 1) % PALETTE.len()], r#" fill-opacity="0.45""#)
            }
        };
        let class = match s.role {
            Role::Arc => "arc",
            Role::Pillar => "pillar",
            Role::Member => "member",
            Role::Plain => "set",
        };
        let _ = writeln!(out, r#"<g class="{class}" data-id="{}">"#, escape(s.id));
        let _ = writeln!(out, r#"<path d="{}" fill="{fill}"{extra}/>"#, cell_path(&c, s.cells));
        if let Some(top) = s.cells.iter().max_by_key(|cell| (cell.y, -cell.x)) {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="11" font-family="monospace">{}</text>"#,
                c.x(top.x) + 2,
                c.y(top.y) - 2,
                escape(s.id)
            );
        }
        out.push_str("</g>\n");
    }
    for o in overlays {
        let _ = writeln!(out, r#"<g class="overlay {}" data-label="{}">"#, escape(&o.class), escape(&o.label));
        match o.style {
            OverlayStyle::Hatched => {
                let _ = writeln!(out, r#"<path d="{}" fill="url(#hatch)" fill-opacity="0.6"/>"#, cell_path(&c, &o.cells));
            }
            OverlayStyle::Outline => {
                if let Some(b) = o.cells.bbox() {
                    let _ = writeln!(
                        out,
                        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#c00" stroke-dasharray="2 2"/>"##,
                        c.x(b.min_x),
                        c.y(b.max_y),
                        (b.max_x - b.min_x + 1) * CELL,
                        (b.max_y - b.min_y + 1) * CELL
                    );
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn render_family(f: &GroundedFamily, overlays: &[Overlay]) -> String {
    let shapes: Vec<Shape> = f.members().iter().map(|m| Shape { id: m.id(), cells: m.region(), role: Role::Plain }).collect();
    render(&shapes, overlays)
}

pub fn render_pierced(p: &PiercedFamily, overlays: &[Overlay]) -> String {
    let shapes: Vec<Shape> = p.members().iter().map(|(id, r)| Shape { id, cells: r, role: Role::Plain }).collect();
    render(&shapes, overlays)
}

pub fn render_scene(sc: &PillarScene, overlays: &[Overlay]) -> String {
    let mut shapes = vec![Shape { id: "S", cells: &sc.s, role: Role::Arc }];
    for (i, m) in sc.family.members().iter().enumerate() {
        let role = if sc.pillars.contains(&i) { Role::Pillar } else { Role::Member };
        shapes.push(Shape { id: m.id(), cells: m.region(), role });
    }
    render(&shapes, overlays)
}

/// Overlays read back from a pipeline trace: hatched corridors and outlined
/// clip boxes.
pub fn trace_overlays(trace: &serde_json::Value) -> Vec<Overlay> {
    let rect = |v: &serde_json::Value| -> Option<CellSet> {
        let a: Vec<i32> = v.as_array()?.iter().map(|x| x.as_i64().map(|x| x as i32)).collect::<Option<_>>()?;
        match a.as_slice() {
            &[x0, y0, x1, y1] => Some(CellSet::rect(x0, x1, y0, y1)),
            _ => None,
        }
    };
    let mut out = Vec::new();
    let classes = trace["classes"].as_array().cloned().unwrap_or_default();
    for class in &classes {
        let c = class["class"].as_u64().unwrap_or(0);
        for (i, corridor) in class["corridors"].as_array().into_iter().flatten().enumerate() {
            if let Some(cells) = rect(corridor) {
                out.push(Overlay { class: "corridor".into(), label: format!("class {c} corridor {i}"), cells, style: OverlayStyle::Hatched });
            }
        }
        for side in class["sides"].as_array().into_iter().flatten() {
            // mirrored sides are drawn in mirrored coordinates, skip them
            if side["mirrored"].as_bool() == Some(true) {
                continue;
            }
            for clip in side["detail"]["clips"].as_array().into_iter().flatten() {
                let id = clip["id"].as_str().unwrap_or("?");
                for which in ["left", "right"] {
                    if let Some(cells) = rect(&clip[which]) {
                        out.push(Overlay { class: format!("clip {which}"), label: format!("{which}clip {id}"), cells, style: OverlayStyle::Outline });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist2::{color_dist2, Oracle};
    use crate::generate::{gen_clique, gen_pillars};

    #[test]
    fn twin_arch_inventory() {
        let svg = render_family(&gen_clique(2).unwrap().family, &[]);
        assert_eq!(svg.matches("<g class=\"set\"").count(), 2);
        assert_eq!(svg.matches("class=\"baseline\"").count(), 1);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn scene_roles_are_styled() {
        let sc = gen_pillars(2).unwrap();
        let svg = render_scene(&sc, &[]);
        assert_eq!(svg.matches("<g class=\"arc\"").count(), 1);
        assert!(svg.contains("stroke-dasharray=\"4 3\""));
        assert_eq!(svg.matches("<g class=\"pillar\"").count(), 2);
        assert_eq!(svg.matches("<g class=\"member\"").count(), 4);
    }

    #[test]
    fn trace_overlays_are_drawn() {
        let sc = gen_pillars(3).unwrap();
        let out = color_dist2(&sc, 2, Oracle::Exact).unwrap();
        let overlays = trace_overlays(&out.trace);
        assert_eq!(overlays.iter().filter(|o| o.class == "corridor").count(), 2);
        assert!(overlays.iter().any(|o| o.class.starts_with("clip")));
        let svg = render_scene(&sc, &overlays);
        assert_eq!(svg.matches("class=\"overlay corridor\"").count(), 2);
        assert_eq!(svg, render_scene(&sc, &overlays));
    }
}
