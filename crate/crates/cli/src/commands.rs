use grounded_chi::bounds::compute_bounds;
use grounded_chi::dist2::{color_dist2, Oracle};
use grounded_chi::generate::{gen_bracket, gen_clique, gen_pierced, gen_pillars, gen_random, gen_scene, GenReport, PiercedParams, RandomParams, SceneParams};
use grounded_chi::graph::{chi_exact, omega_exact, IntersectionGraph};
use grounded_chi::grid::{check_simple, CellSet};
use grounded_chi::io::{self, Loaded};
use grounded_chi::svg;
use serde_json::{json, Value};

use crate::error::{write_file, CliError};
use crate::{AnalyzeArgs, BoundsArgs, GenArgs, Kind, OracleArg, RenderArgs};

impl From<OracleArg> for Oracle {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Exact => Oracle::Exact,
            OracleArg::Recursive => Oracle::Recursive,
        }
    }
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Random => "random",
        Kind::Clique => "clique",
        Kind::Bracket => "bracket",
        Kind::Pillars => "pillars",
        Kind::Scene => "scene",
        Kind::Pierced => "pierced",
    }
}

pub fn gen(a: &GenArgs) -> Result<(), CliError> {
    let (item, report): (Loaded, Option<GenReport>) = match a.kind {
        Kind::Random => {
            let mut p = RandomParams { n: a.n, width: a.width, max_clique: a.max_clique, ..RandomParams::default() };
            if let Some(h) = a.height {
                p.height = h;
            }
            let (f, r) = gen_random(a.seed, &p)?;
            (Loaded::Grounded(f), Some(r))
        }
        Kind::Clique => (Loaded::Grounded(gen_clique(a.k)?.family), None),
        Kind::Bracket => (Loaded::Grounded(gen_bracket(a.k)?.family), None),
        Kind::Pillars => (Loaded::Scene(gen_pillars(a.m)?), None),
        Kind::Scene => {
            let p = SceneParams { m: a.m, n_d: a.n, max_clique: a.max_clique, ..SceneParams::default() };
            let (sc, r) = gen_scene(a.seed, &p)?;
            (Loaded::Scene(sc), Some(r))
        }
        Kind::Pierced => {
            let mut p = PiercedParams { n: a.n, width: a.width, ..PiercedParams::default() };
            if let Some(h) = a.height {
                p.height = h;
            }
            let (pf, r) = gen_pierced(a.seed, &p)?;
            (Loaded::Pierced(pf), Some(r))
        }
    };
    write_file(&a.output, &io::to_canonical_json(&item))?;
    let seeded = report.is_some();
    let members = match &item {
        Loaded::Grounded(f) => f.len(),
        Loaded::Pierced(p) => p.len(),
        Loaded::Scene(sc) => sc.family.len(),
    };
    let line = json!({
        "kind": kind_name(a.kind),
        "seed": if seeded { json!(a.seed) } else { Value::Null },
        "params": {"n": a.n, "k": a.k, "m": a.m, "width": a.width, "height": a.height, "max_clique": a.max_clique},
        "members": members,
        "rejections": report.as_ref().map(GenReport::rejections),
        "skipped": report.as_ref().map(|r| r.skipped),
        "output": a.output.display().to_string(),
    });
    println!("{line}");
    Ok(())
}

struct Analysis {
    report: Value,
    budget: Option<grounded_chi::graph::GraphError>,
}

fn analyze_graph(g: &IntersectionGraph, regions: &[CellSet]) -> Analysis {
    let (omega, witness) = omega_exact(g);
    let simple = check_simple(regions);
    let mut report = json!({
        "members": g.len(),
        "edges": g.edge_count(),
        "omega": omega,
        "omega_witness": witness.iter().map(|&i| &g.ids()[i]).collect::<Vec<_>>(),
        "order": g.ids(),
        "simple": simple.passed,
        "subfamilies_checked": simple.subfamilies_checked,
    });
    if let Some(v) = &simple.violation {
        report["violation"] = json!(v.members.iter().map(|&i| &g.ids()[i]).collect::<Vec<_>>());
    }
    let budget = match chi_exact(g) {
        Ok((chi, col)) => {
            report["chi"] = json!(chi);
            report["coloring"] = col.to_json(g.ids());
            None
        }
        Err(e) => {
            report["chi"] = Value::Null;
            report["chi_error"] = json!(e.to_string());
            Some(e)
        }
    };
    Analysis { report, budget }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let loaded = io::load(&a.file)?;
    let (kind, mut analysis) = match &loaded {
        Loaded::Grounded(f) => {
            let regions: Vec<CellSet> = f.regions().into_iter().cloned().collect();
            ("grounded", analyze_graph(&f.graph(), &regions))
        }
        Loaded::Pierced(p) => {
            let regions: Vec<CellSet> = p.members().iter().map(|(_, r)| r.clone()).collect();
            ("pierced", analyze_graph(&p.graph(), &regions))
        }
        Loaded::Scene(sc) => {
            let regions: Vec<CellSet> = sc.family.regions().into_iter().cloned().collect();
            ("scene", analyze_graph(&sc.family.graph(), &regions))
        }
    };
    analysis.report["kind"] = json!(kind);

    let mut pipeline_err = None;
    if let Loaded::Scene(sc) = &loaded {
        let k = a.k.unwrap_or_else(|| omega_exact(&sc.family.graph()).0.max(1));
        match color_dist2(sc, k, a.oracle.into()) {
            Ok(out) => {
                analysis.report["dist2"] = json!({
                    "k": k,
                    "palette": out.palette,
                    "palette_bound": out.palette_bound,
                    "oracle_palette": out.oracle_palette,
                    "pillar_classes": out.pillar_classes,
                });
                if let Some(path) = &a.trace {
                    let doc = json!({"scene": serde_json::from_str::<Value>(&io::scene_json(sc)).expect("scene json"), "trace": out.trace});
                    write_file(path, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("trace serializes")))?;
                }
            }
            Err(e) => {
                analysis.report["dist2"] = json!({"k": k, "error": e.to_string()});
                pipeline_err = Some(e);
            }
        }
    }

    if a.json {
        println!("{}", analysis.report);
    } else {
        print_text(&analysis.report);
    }
    if let Some(e) = analysis.budget {
        return Err(e.into());
    }
    match pipeline_err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn print_text(r: &Value) {
    let show = |v: &Value| match v {
        Value::String(s) => s.clone(),
        Value::Null => "budget exceeded".into(),
        other => other.to_string(),
    };
    println!("kind     {}", show(&r["kind"]));
    println!("members  {}", show(&r["members"]));
    println!("edges    {}", show(&r["edges"]));
    println!("omega    {}", show(&r["omega"]));
    println!("chi      {}", show(&r["chi"]));
    let order: Vec<String> = r["order"].as_array().into_iter().flatten().map(show).collect();
    println!("order    {}", order.join(" < "));
    println!("simple   {}", show(&r["simple"]));
    if let Some(d) = r.get("dist2") {
        match d.get("error") {
            Some(e) => println!("dist2    failed: {}", show(e)),
            None => println!("dist2    palette {} (bound {}, {} pillar classes)", d["palette"], d["palette_bound"], d["pillar_classes"]),
        }
    }
}

pub fn bounds(a: &BoundsArgs) -> Result<(), CliError> {
    if a.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let table = compute_bounds(a.k);
    if a.json {
        println!("{}", table.to_json());
    } else {
        print!("{}", table.to_text());
    }
    Ok(())
}

pub fn render(a: &RenderArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.file).map_err(|e| CliError::Input(e.into()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", a.file.display())))?;
    let svg = if value.get("trace").is_some() && value.get("scene").is_some() {
        let loaded = io::parse_str(&value["scene"].to_string())?;
        let Loaded::Scene(sc) = loaded else {
            return Err(CliError::Usage("trace file does not hold a scene".into()));
        };
        svg::render_scene(&sc, &svg::trace_overlays(&value["trace"]))
    } else {
        match io::parse_str(&text)? {
            Loaded::Grounded(f) => svg::render_family(&f, &[]),
            Loaded::Pierced(p) => svg::render_pierced(&p, &[]),
            Loaded::Scene(sc) => svg::render_scene(&sc, &[]),
        }
    };
    write_file(&a.output, &svg)
}
