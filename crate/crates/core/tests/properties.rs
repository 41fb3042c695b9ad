use std::collections::HashSet;

use grounded_chi::bounds::compute_bounds;
use grounded_chi::decomposition::int_of_clique;
use grounded_chi::dist2::{color_dist2, Oracle};
use grounded_chi::generate::{gen_random, gen_scene, RandomParams, SceneParams};
use grounded_chi::graph::{chi_exact, dsatur_greedy, interval_coloring, interval_max_load, omega_exact, IntersectionGraph};
use grounded_chi::grid::{check_simple, connected_components, ext, is_connected, Cell, CellSet, Frame};
use grounded_chi::io::{family_json, parse_str, Loaded};
use proptest::prelude::*;

fn coords(max: i32, len: usize) -> impl Strategy<Value = Vec<(i32, i32)>> {
    prop::collection::vec((0..max, 0..max), 0..len)
}

fn set(c: &[(i32, i32)]) -> CellSet {
    CellSet::from_coords(c)
}

fn naive(c: &[(i32, i32)]) -> HashSet<(i32, i32)> {
    c.iter().copied().collect()
}

fn back(s: &CellSet) -> HashSet<(i32, i32)> {
    s.iter().map(|c| (c.x, c.y)).collect()
}

fn naive_connected(s: &HashSet<(i32, i32)>) -> bool {
    let Some(&start) = s.iter().next() else { return true };
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some((x, y)) = stack.pop() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if s.contains(&n) && seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen.len() == s.len()
}

fn graph(n: usize, bits: &[bool]) -> IntersectionGraph {
    let mut edges = vec![];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k % bits.len().max(1)] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    IntersectionGraph::from_edges(n, &edges)
}

proptest! {
    #[test]
    fn set_algebra_matches_hashsets(a in coords(8, 30), b in coords(8, 30)) {
        let (sa, sb) = (set(&a), set(&b));
        let (na, nb) = (naive(&a), naive(&b));
        prop_assert_eq!(back(&sa.union(&sb)), &na | &nb);
        prop_assert_eq!(back(&sa.intersection(&sb)), &na & &nb);
        prop_assert_eq!(back(&sa.difference(&sb)), &na - &nb);
        prop_assert_eq!(sa.intersects(&sb), !(&na & &nb).is_empty());
        prop_assert_eq!(sa.len(), na.len());
    }

    #[test]
    fn reflection_and_translation_invert(a in coords(8, 30), axis in -5..5i32, dx in -4..4i32, dy in 0..4i32) {
        let s = set(&a);
        prop_assert_eq!(s.reflect_x(axis).reflect_x(axis), s.clone());
        prop_assert_eq!(s.translate(dx, dy).translate(-dx, -dy), s.clone());
        prop_assert_eq!(s.reflect_y().reflect_y(), s);
    }

    #[test]
    fn cells_iterate_row_major(a in coords(8, 30)) {
        let v: Vec<Cell> = set(&a).iter().collect();
        prop_assert!(v.windows(2).all(|w| (w[0].y, w[0].x) < (w[1].y, w[1].x)));
    }

    #[test]
    fn components_partition_into_connected_pieces(a in coords(7, 30)) {
        let s = set(&a);
        let comps = connected_components(&s);
        let total: usize = comps.iter().map(CellSet::len).sum();
        prop_assert_eq!(total, s.len());
        for (i, c) in comps.iter().enumerate() {
            prop_assert!(naive_connected(&back(c)));
            for d in &comps[i + 1..] {
                prop_assert!(!c.intersects(d));
                prop_assert!(!c.iter().any(|x| d.iter().any(|y| x.is_adjacent(y))));
            }
        }
        prop_assert_eq!(is_connected(&s), naive_connected(&naive(&a)));
    }

    #[test]
    fn simplicity_matches_subset_enumeration(sets in prop::collection::vec(coords(5, 12), 1..5)) {
        let sets: Vec<CellSet> = sets.iter().map(|c| set(c)).collect();
        let rep = check_simple(&sets);
        // naive: every nonempty common part of a subfamily is connected
        let n = sets.len();
        let mut ok = true;
        for mask in 1u32..1 << n {
            let mut common: Option<HashSet<(i32, i32)>> = None;
            for (_, s) in sets.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1) {
                let b = back(s);
                common = Some(match common { None => b, Some(c) => &c & &b });
            }
            let common = common.unwrap_or_default();
            ok &= naive_connected(&common);
        }
        prop_assert_eq!(rep.passed, ok);
    }

    #[test]
    fn exterior_avoids_the_set(a in coords(6, 20)) {
        let s = set(&a).translate(1, 0);
        let frame = Frame::with_origin(-1, 10, 9);
        let outside = ext(&s, &frame).unwrap();
        prop_assert!(!outside.intersects(&s));
        prop_assert!(outside.iter().all(|c| frame.contains(c)));
    }

    #[test]
    fn exact_coloring_is_proper_and_tight(n in 0usize..9, bits in prop::collection::vec(any::<bool>(), 1..40)) {
        let g = graph(n, &bits);
        let (chi, col) = chi_exact(&g).unwrap();
        let (omega, witness) = omega_exact(&g);
        prop_assert!(col.is_proper(&g));
        prop_assert_eq!(col.distinct(), chi);
        prop_assert!(omega <= chi);
        prop_assert!(chi <= dsatur_greedy(&g).palette());
        prop_assert!(dsatur_greedy(&g).is_proper(&g));
        prop_assert_eq!(witness.len(), omega);
        for (i, &a) in witness.iter().enumerate() {
            for &b in &witness[i + 1..] {
                prop_assert!(g.adjacent(a, b));
            }
        }
    }

    #[test]
    fn interval_coloring_uses_max_load(iv in prop::collection::vec((0..20i32, 0..5i32), 0..12)) {
        let iv: Vec<(i32, i32)> = iv.into_iter().map(|(a, l)| (a, a + l)).collect();
        let col = interval_coloring(&iv);
        for i in 0..iv.len() {
            for j in i + 1..iv.len() {
                if iv[i].0 <= iv[j].1 && iv[j].0 <= iv[i].1 {
                    prop_assert_ne!(col.color(i), col.color(j));
                }
            }
        }
        prop_assert_eq!(col.palette(), interval_max_load(&iv));
    }

    #[test]
    fn compaction_keeps_classes(colors in prop::collection::vec(0usize..10, 0..15)) {
        let c = grounded_chi::graph::Coloring::new(colors.clone());
        let d = c.compacted();
        prop_assert_eq!(d.palette(), c.distinct());
        for i in 0..colors.len() {
            for j in 0..colors.len() {
                prop_assert_eq!(colors[i] == colors[j], d.color(i) == d.color(j));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_families_are_valid_and_round_trip(seed in any::<u64>(), n in 1usize..12) {
        let p = RandomParams { n, ..RandomParams::default() };
        if let Ok((f, _)) = gen_random(seed, &p) {
            prop_assert!(f.validate().is_ok());
            let bases: Vec<(i32, i32)> = f.members().iter().map(|m| m.base()).collect();
            prop_assert!(bases.windows(2).all(|w| w[0].1 < w[1].0));
            prop_assert_eq!(parse_str(&family_json(&f)).unwrap(), Loaded::Grounded(f));
        }
    }

    #[test]
    fn clique_interior_is_enclosed(seed in any::<u64>()) {
        let p = RandomParams { n: 10, height: 10, growth_steps: 20, ..RandomParams::default() };
        if let Ok((f, _)) = gen_random(seed, &p) {
            let g = f.graph();
            let frame = f.frame();
            for (a, b) in g.edges().into_iter().take(4) {
                let k = [f.member(a), f.member(b)];
                let inside = int_of_clique(&k, &frame).unwrap();
                let union = k[0].region().union(k[1].region());
                prop_assert!(!inside.intersects(&union));
                if !inside.is_empty() {
                    prop_assert!(!inside.intersects(&ext(&union, &frame).unwrap()));
                }
            }
        }
    }

    #[test]
    fn scenes_color_properly_within_bound(seed in any::<u64>(), m in 1usize..5) {
        let p = SceneParams { m, n_d: 8, max_clique: Some(2), ..SceneParams::default() };
        if let Ok((sc, _)) = gen_scene(seed, &p) {
            let out = color_dist2(&sc, 2, Oracle::Exact).unwrap();
            let d = sc.d_sets();
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    if d[i].region().intersects(d[j].region()) {
                        prop_assert_ne!(out.coloring.color(i), out.coloring.color(j));
                    }
                }
            }
            prop_assert!(out.palette <= 16);
        }
    }
}

#[test]
fn bound_table_is_monotone() {
    let t = compute_bounds(5);
    for k in 2..=5 {
        assert!(t.xi(k) > t.xi(k - 1));
        let d = &t.row(k).delta;
        assert!(d.windows(2).all(|w| w[0] > w[1]));
        assert!(t.beta(k).unwrap() < &d[k - 1]);
    }
}
