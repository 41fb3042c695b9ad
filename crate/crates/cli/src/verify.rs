//! Seeded verification campaigns. Each trial builds one instance from its
//! seed, runs the operation under test and records every postcondition as
//! a named assertion. Records come out in seed order whatever the thread
//! count, so reports are byte-identical between runs.

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use grounded_chi::bounds::compute_bounds;
use grounded_chi::decomposition::{
    check_cor_bracket, check_cor_clique, externally_supported, find_bracket, find_cor_clique_pair, k_cliques, ladder_split,
    unsupported_member,
};
use grounded_chi::dist2::{
    attach_to_baseline, audit_clips, audit_context, audit_separation, build_pillar_context, clip, color_dist2, final_four_color,
    left_groups, pillar_classes, pillar_cuts, right_groups, side_inputs, Oracle,
};
use grounded_chi::family::{GroundedFamily, GroundedSet, PillarScene};
use grounded_chi::generate::{gen_bracket, gen_clique, gen_probe, gen_random, gen_scene, rng, RandomParams, SceneParams, Side};
use grounded_chi::graph::{chi_exact, omega_exact, IntersectionGraph};
use grounded_chi::grid::{ext, CellSet};
use grounded_chi::io::{self, Loaded};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{write_file, CliError};
use crate::{Lemma, VerifyArgs};

#[derive(Serialize)]
struct Assertion {
    name: &'static str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

/// Outcome of one trial before it is turned into a record.
#[derive(Default)]
struct Trial {
    instance: String,
    item: Option<Loaded>,
    sizes: serde_json::Map<String, Value>,
    assertions: Vec<Assertion>,
    skipped: Option<String>,
}

impl Trial {
    fn new(instance: String) -> Self {
        Trial { instance, ..Default::default() }
    }

    fn size(&mut self, key: &str, v: impl Into<Value>) {
        self.sizes.insert(key.into(), v.into());
    }

    fn check(&mut self, name: &'static str, passed: bool) {
        self.assertions.push(Assertion { name, passed, detail: None });
    }

    fn check_with(&mut self, name: &'static str, passed: bool, detail: impl FnOnce() -> String) {
        let detail = if passed { None } else { Some(detail()) };
        self.assertions.push(Assertion { name, passed, detail });
    }

    /// Record `r` as assertion `name`; returns the value on success.
    fn step<T, E: std::fmt::Display>(&mut self, name: &'static str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => {
                self.check(name, true);
                Some(v)
            }
            Err(e) => {
                self.assertions.push(Assertion { name, passed: false, detail: Some(e.to_string()) });
                None
            }
        }
    }

    fn skip(mut self, why: impl Into<String>) -> Self {
        self.skipped = Some(why.into());
        self
    }

    fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

#[derive(Serialize)]
struct Record {
    lemma: &'static str,
    seed: u64,
    instance: String,
    sizes: serde_json::Map<String, Value>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
    assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u128>,
}

fn lemma_name(l: Lemma) -> &'static str {
    match l {
        Lemma::Ladder => "ladder",
        Lemma::Layers => "layers",
        Lemma::Pillars => "pillars",
        Lemma::Clip => "clip",
        Lemma::Attach => "attach",
        Lemma::Final => "final",
        Lemma::Dist2 => "dist2",
        Lemma::Corollaries => "corollaries",
    }
}

pub fn run(a: &VerifyArgs) -> Result<(), CliError> {
    if a.k < 2 && matches!(a.lemma, Lemma::Dist2 | Lemma::Corollaries) {
        return Err(CliError::Usage("--k must be at least 2 for this campaign".into()));
    }
    if let Some(dir) = &a.dump {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start workers: {e}")))?;
    let seeds: Vec<u64> = (0..a.trials).map(|i| a.seed.wrapping_add(i)).collect();
    let records: Vec<Record> = pool.install(|| seeds.par_iter().map(|&seed| record(a, seed)).collect());

    let mut out = String::new();
    for r in &records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    let count = |s: &str| records.iter().filter(|r| r.status == s).count();
    let failed = count("fail");
    let summary = json!({
        "summary": lemma_name(a.lemma),
        "trials": records.len(),
        "passed": count("pass"),
        "failed": failed,
        "skipped": count("skip"),
        "failing_seeds": records.iter().filter(|r| r.status == "fail").map(|r| r.seed).collect::<Vec<_>>(),
    });
    out.push_str(&summary.to_string());
    out.push('\n');
    match &a.report {
        Some(path) => {
            write_file(path, &out)?;
            eprintln!("{summary}");
        }
        None => {
            let _ = std::io::stdout().write_all(out.as_bytes());
        }
    }
    if failed > 0 {
        return Err(CliError::AuditFailed { failed, total: records.len() });
    }
    Ok(())
}

fn record(a: &VerifyArgs, seed: u64) -> Record {
    let start = Instant::now();
    let trial = match a.lemma {
        Lemma::Ladder => ladder(seed),
        Lemma::Layers => layers(seed),
        Lemma::Pillars => pillars(seed),
        Lemma::Clip => clips(seed),
        Lemma::Attach => attach(seed),
        Lemma::Final => finals(seed),
        Lemma::Dist2 => dist2(seed, a.k),
        Lemma::Corollaries => corollaries(seed, a.k),
    };
    let status = if trial.skipped.is_some() {
        "skip"
    } else if trial.passed() {
        "pass"
    } else {
        "fail"
    };
    let mut path = None;
    if status == "fail" {
        if let (Some(dir), Some(item)) = (&a.dump, &trial.item) {
            let p: PathBuf = dir.join(format!("{}-{seed}.json", lemma_name(a.lemma)));
            if io::save(item, &p).is_ok() {
                path = Some(p.display().to_string());
            }
        }
    }
    Record {
        lemma: lemma_name(a.lemma),
        seed,
        instance: trial.instance,
        sizes: trial.sizes,
        status,
        skipped: trial.skipped,
        assertions: trial.assertions,
        path,
        runtime_ms: a.timing.then(|| start.elapsed().as_millis()),
    }
}

fn chi_of(f: &GroundedFamily, idx: &[usize]) -> Option<usize> {
    if idx.is_empty() {
        return Some(0);
    }
    chi_exact(&f.subfamily(idx).graph()).ok().map(|(c, _)| c)
}

fn random_family(seed: u64, n: usize) -> (String, Result<GroundedFamily, String>) {
    let p = RandomParams { n, ..RandomParams::default() };
    let instance = format!("random n={n} height={} steps={} seed={seed}", p.height, p.growth_steps);
    (instance, gen_random(seed, &p).map(|(f, _)| f).map_err(|e| e.to_string()))
}

fn ladder(seed: u64) -> Trial {
    let n = 8 + (seed % 7) as usize;
    let (instance, f) = random_family(seed, n);
    let mut t = Trial::new(instance);
    let f = match f {
        Ok(f) => f,
        Err(e) => return t.skip(e),
    };
    t.item = Some(Loaded::Grounded(f.clone()));
    let Some(chi) = chi_of(&f, &(0..f.len()).collect::<Vec<_>>()) else {
        return t.skip("solver budget");
    };
    // largest b with chi > 2a(b+1) at a = 1, or a = 0 when chi is small
    let (a, b) = if chi >= 3 { (1, (chi - 1) / 2 - 1) } else { (0, chi.saturating_sub(1)) };
    t.size("members", f.len());
    t.size("chi", chi);
    t.size("a", a);
    t.size("b", b);
    let Some(r) = t.step("split", ladder_split(&f, a, b)) else { return t };
    t.size("blocks", r.blocks.len());
    t.size("h", r.h.len());

    let mut seen: Vec<usize> = r.blocks.iter().flatten().copied().collect();
    seen.sort_unstable();
    t.check("blocks_partition", seen == (0..f.len()).collect::<Vec<_>>());
    let contiguous = r.blocks.windows(2).all(|w| w[0].last() < w[1].first());
    t.check("blocks_in_order", contiguous);
    let inner_ok = r.blocks.iter().take(r.blocks.len().saturating_sub(1)).all(|b2| chi_of(&f, b2) == Some(b + 1));
    t.check("inner_blocks_chi", inner_ok);
    let h_chi = chi_of(&f, &r.h);
    t.check_with("h_chi_above_a", h_chi.is_some_and(|c| c > a), || format!("chi(H) = {h_chi:?}, a = {a}"));
    let mut gaps_ok = true;
    for (x, &i) in r.h.iter().enumerate() {
        for &j in &r.h[x + 1..] {
            if f.member(i).region().intersects(f.member(j).region()) {
                let gap = f.between(Some(f.member(i)), Some(f.member(j)));
                gaps_ok &= chi_of(&f, &gap).is_some_and(|c| c > b);
            }
        }
    }
    t.check("gaps_chi_above_b", gaps_ok);
    t
}

fn layers(seed: u64) -> Trial {
    let n = 8 + (seed % 7) as usize;
    let (instance, f) = random_family(seed, n);
    let mut t = Trial::new(instance);
    let f = match f {
        Ok(f) => f,
        Err(e) => return t.skip(e),
    };
    t.item = Some(Loaded::Grounded(f.clone()));
    let Some(chi) = chi_of(&f, &(0..f.len()).collect::<Vec<_>>()) else {
        return t.skip("solver budget");
    };
    let a = chi.saturating_sub(1) / 2;
    t.size("members", f.len());
    t.size("chi", chi);
    t.size("a", a);
    let Some(layer) = t.step("layer_found", externally_supported(&f, a)) else { return t };
    t.size("distance", layer.distance);
    t.size("layer", layer.layer.len());
    let g = f.graph();
    let dist = g.distances(layer.root);
    t.check("distance_positive", layer.distance >= 1);
    t.check("layer_is_bfs_level", layer.layer.iter().all(|&v| dist[v] == Some(layer.distance)));
    let c = chi_of(&f, &layer.layer);
    t.check_with("layer_chi_above_a", c.is_some_and(|c| c > a), || format!("chi = {c:?}, a = {a}"));
    // every member of the layer meets some set reaching the exterior of the layer's union
    let union: CellSet = layer.layer.iter().flat_map(|&i| f.member(i).region().iter()).collect();
    let supported = match ext(&union, &f.frame()) {
        Ok(outside) => layer.layer.iter().all(|&x| {
            let xr = f.member(x).region();
            f.members().iter().any(|y| y.region().intersects(xr) && y.region().intersects(&outside))
        }),
        Err(_) => false,
    };
    t.check("externally_supported", supported);
    t.check("library_agrees", matches!(unsupported_member(&f, &layer.layer), Ok(None)));
    t
}

fn scene_params(seed: u64, max_clique: Option<usize>) -> SceneParams {
    SceneParams { m: 1 + (seed % 5) as usize, n_d: 6 + (seed % 10) as usize, max_clique, ..SceneParams::default() }
}

fn scene_trial(seed: u64, max_clique: Option<usize>) -> (Trial, Option<PillarScene>) {
    let p = scene_params(seed, max_clique);
    let cap = max_clique.map_or("none".to_string(), |c| c.to_string());
    let mut t = Trial::new(format!("scene m={} n_d={} max_clique={cap} seed={seed}", p.m, p.n_d));
    match gen_scene(seed, &p) {
        Ok((sc, _)) => {
            t.size("pillars", sc.pillars.len());
            t.size("d", sc.d.len());
            t.item = Some(Loaded::Scene(sc.clone()));
            (t, Some(sc))
        }
        Err(e) => (t.skip(e.to_string()), None),
    }
}

fn pillars(seed: u64) -> Trial {
    let (mut t, Some(sc)) = scene_trial(seed, None) else {
        return scene_trial(seed, None).0;
    };
    let frame = sc.frame();
    let Some(cuts) = t.step("cuts", pillar_cuts(&sc)) else { return t };
    let Some(classes) = t.step("classes", pillar_classes(&sc)) else { return t };
    t.size("classes", classes.classes.len());
    let pillar_sets = sc.pillar_sets();
    let mut probes = 0;
    for class in &classes.classes {
        let ps: Vec<&GroundedSet> = class.pillars.iter().map(|&i| pillar_sets[i]).collect();
        let Some(ctx) = t.step("context_built", build_pillar_context(&sc.s, &ps, &frame)) else { return t };
        t.step("context_audit", audit_context(&ctx));
        probes += t.step("separation", audit_separation(&ctx)).unwrap_or(0);
    }
    t.size("probes", probes);
    let mut disjoint = true;
    for class in &classes.classes {
        for (x, &i) in class.pillars.iter().enumerate() {
            for &j in &class.pillars[x + 1..] {
                disjoint &= !cuts[i].intersects(&cuts[j]);
            }
        }
    }
    t.check("class_cuts_disjoint", disjoint);
    let mut count = vec![0; sc.d.len()];
    for class in &classes.classes {
        for &x in &class.members {
            count[x] += 1;
        }
    }
    t.check("members_partitioned", count.iter().all(|&c| c == 1));
    let d = sc.d_sets();
    let meets = classes.classes.iter().all(|class| {
        class.members.iter().all(|&x| class.pillars.iter().any(|&i| cuts[i].intersects(d[x].region())))
    });
    t.check("member_meets_class_cut", meets);
    t
}

fn clips(seed: u64) -> Trial {
    let (mut t, Some(sc)) = scene_trial(seed, None) else {
        return scene_trial(seed, None).0;
    };
    let omega = omega_exact(&sc.family.graph()).0;
    t.size("omega", omega);
    let Some(sides) = t.step("sides", side_inputs(&sc)) else { return t };
    let (mut connected, mut simple, mut omega_ok) = (true, true, true);
    for side in &sides {
        let refs: Vec<&GroundedSet> = side.members.iter().collect();
        let Some(view) = t.step("clip", clip(&side.ctx, &refs)) else { return t };
        let audit = audit_clips(&view);
        connected &= audit.connected;
        simple &= audit.left_simple && audit.right_simple;
        omega_ok &= audit.omega_left < omega && audit.omega_right < omega;
        for (c, m) in view.clips.iter().zip(&refs) {
            connected &= c.left.is_subset(m.region()) && c.right.is_subset(m.region());
        }
    }
    t.size("sides", sides.len());
    t.check("clips_connected", connected);
    t.check("clips_simple", simple);
    t.check("clip_omega_below_scene", omega_ok);
    t
}

/// Runs `body` on every right-clip color group of every side.
fn for_each_group(t: &mut Trial, sc: &PillarScene, k: usize, mut body: impl FnMut(&mut Trial, &grounded_chi::dist2::PillarContext, Vec<&GroundedSet>)) {
    let Some(sides) = t.step("sides", side_inputs(sc)) else { return };
    for side in &sides {
        let refs: Vec<&GroundedSet> = side.members.iter().collect();
        let Some(groups) = t.step("right_oracle", right_groups(&side.ctx, &refs, k, Oracle::Exact)) else { return };
        for g in groups {
            body(t, &side.ctx, g.iter().map(|&i| refs[i]).collect());
        }
    }
}

fn attach(seed: u64) -> Trial {
    let (mut t, Some(sc)) = scene_trial(seed, None) else {
        return scene_trial(seed, None).0;
    };
    let k = omega_exact(&sc.family.graph()).0;
    let (mut floating, mut groups, mut max_scale) = (0usize, 0usize, 1);
    let mut all_ok = true;
    for_each_group(&mut t, &sc, k, |t, ctx, group| {
        groups += 1;
        let Ok(view) = clip(ctx, &group) else {
            all_ok = false;
            return;
        };
        floating += view.clips.iter().filter(|c| !c.left_grounded()).count();
        let Some(att) = t.step("attached", attach_to_baseline(ctx, &group)) else {
            all_ok = false;
            return;
        };
        max_scale = max_scale.max(att.scale);
        all_ok &= att.family.validate().is_ok();
        let g = att.family.graph();
        for x in 0..att.family.len() {
            let cx = &view.clips[att.map[x]];
            // the attached set is a refined copy of the left clip plus a tail
            all_ok &= att.family.member(x).region().row(0).next().is_some();
            for y in x + 1..att.family.len() {
                let cy = &view.clips[att.map[y]];
                all_ok &= g.adjacent(x, y) == cx.left.intersects(&cy.left);
            }
        }
    });
    t.size("groups", groups);
    t.size("floating", floating);
    t.size("max_scale", max_scale);
    t.check("isomorphic_and_grounded", all_ok);
    t
}

fn finals(seed: u64) -> Trial {
    let (mut t, Some(sc)) = scene_trial(seed, None) else {
        return scene_trial(seed, None).0;
    };
    let k = omega_exact(&sc.family.graph()).0;
    let (mut families, mut max_palette) = (0usize, 0usize);
    let (mut disjoint, mut proper) = (true, true);
    for_each_group(&mut t, &sc, k, |t, ctx, group| {
        let Some(att) = t.step("attached", attach_to_baseline(ctx, &group)) else { return };
        let Some(left) = t.step("left_oracle", left_groups(&att, k, Oracle::Exact)) else { return };
        for n in left {
            let members: Vec<&GroundedSet> = n.iter().map(|&i| group[i]).collect();
            families += 1;
            if let Ok(view) = clip(ctx, &members) {
                for (x, a) in view.clips.iter().enumerate() {
                    for b in &view.clips[x + 1..] {
                        disjoint &= !a.left.intersects(&b.left) && !a.right.intersects(&b.right);
                    }
                }
            }
            let Some(fin) = t.step("four_colored", final_four_color(ctx, &members)) else { continue };
            max_palette = max_palette.max(fin.psi.palette());
            let ids: Vec<&str> = members.iter().map(|m| m.id()).collect();
            let regions: Vec<&CellSet> = members.iter().map(|m| m.region()).collect();
            proper &= fin.psi.is_proper(&IntersectionGraph::from_regions(&ids, &regions));
        }
    });
    t.size("families", families);
    t.size("max_palette", max_palette);
    t.check("clips_pairwise_disjoint", disjoint);
    t.check("proper", proper);
    t.check_with("at_most_four", max_palette <= 4, || format!("palette {max_palette}"));
    t
}

fn dist2(seed: u64, k: usize) -> Trial {
    let (mut t, Some(sc)) = scene_trial(seed, Some(k)) else {
        return scene_trial(seed, Some(k)).0;
    };
    let Some(out) = t.step("colored", color_dist2(&sc, k, Oracle::Exact)) else { return t };
    let d = sc.d_family();
    let d_sets = sc.d_sets();
    let colors: Vec<usize> = d.members().iter().map(|m| out.coloring.color(d_sets.iter().position(|x| x.id() == m.id()).unwrap_or(0))).collect();
    let g = d.graph();
    let proper = g.edges().iter().all(|&(x, y)| colors[x] != colors[y]);
    t.size("palette", out.palette);
    t.size("palette_bound", out.palette_bound);
    t.size("pillar_classes", out.pillar_classes);
    t.check("proper", proper);
    t.check("palette_within_bound", out.palette <= out.palette_bound.max(1));
    let beta = compute_bounds(k).beta(k).map(|b| b.to_string());
    let within_beta = beta.as_deref().and_then(|b| b.parse::<usize>().ok()).is_none_or(|b| out.palette <= b);
    t.check_with("palette_within_beta", within_beta, || format!("palette {} > beta {beta:?}", out.palette));
    t
}

fn corollaries(seed: u64, k: usize) -> Trial {
    // alternate between the canonical fixtures and random families
    let (instance, family, bracket) = match seed % 3 {
        0 => (format!("clique k={k}"), gen_clique(k).map(|c| c.family).map_err(|e| e.to_string()), None),
        1 => match gen_bracket(k) {
            Ok(b) => (format!("bracket k={k}"), Ok(b.family.clone()), Some((b.clique, b.support, b.side))),
            Err(e) => (format!("bracket k={k}"), Err(e.to_string()), None),
        },
        _ => {
            let (instance, f) = random_family(seed, 10);
            (instance, f, None)
        }
    };
    let mut t = Trial::new(format!("{instance} probe_seed={seed}"));
    let f = match family {
        Ok(f) => f,
        Err(e) => return t.skip(e),
    };
    t.item = Some(Loaded::Grounded(f.clone()));
    let frame = f.frame();
    let regions: Vec<CellSet> = f.regions().into_iter().cloned().collect();
    let mut r = rng(seed);
    let Some(probe) = gen_probe(&mut r, &regions, &frame, 24) else {
        return t.skip("no free baseline column for a probe");
    };
    let Ok(x) = GroundedSet::new("X", probe) else {
        return t.skip("probe is not a grounded set");
    };
    t.size("members", f.len());
    t.size("probe_cells", x.region().len());

    let g = f.graph();
    let clique = k_cliques(&g, k).into_iter().next().or_else(|| k_cliques(&g, 2).into_iter().next());
    let mut hyp = 0;
    if let Some(c) = clique {
        let sets: Vec<&GroundedSet> = c.iter().map(|&i| f.member(i)).collect();
        if let Some(Some(pair)) = t.step("clique_pair_search", find_cor_clique_pair(&x, &sets, &frame)) {
            if let Some(v) = t.step("clique_check", check_cor_clique(&x, &sets, pair, &frame)) {
                hyp += usize::from(v.hypotheses);
                t.check("clique_corollary", !v.is_counterexample());
            }
        }
    }
    let bracket = match bracket {
        Some(b) => Some(b),
        None => match find_bracket(&f, 2) {
            Ok(w) => w.map(|w| (w.clique, w.support, w.side)),
            Err(_) => None,
        },
    };
    if let Some((clique, support, side)) = bracket {
        let sets: Vec<&GroundedSet> = clique.iter().map(|&i| f.member(i)).collect();
        if let Some(v) = t.step("bracket_check", check_cor_bracket(&x, &sets, f.member(support), side, &frame)) {
            hyp += usize::from(v.hypotheses);
            t.check("bracket_corollary", !v.is_counterexample());
        }
        t.size("bracket_side", if side == Side::Left { "left" } else { "right" });
    }
    t.size("hypotheses_met", hyp);
    t
}
