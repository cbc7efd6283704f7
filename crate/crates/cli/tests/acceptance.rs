//! Acceptance checks, one line per criterion. Measured constants live in
//! `tests/golden/`; `UPDATE_GOLDEN=1` rewrites them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dissem_core::generate::{dary_tree, grid, path, random_pairs, random_planar, star};
use dissem_core::gossip::radio_gossip;
use dissem_core::lp::poise::solve_poise;
use dissem_core::multicast::{depth_bound, planar_mc_multicast, MulticastParams};
use dissem_core::multiflow::{break_cycles_to_in_forest, extract_stars, pack_tpaths, pack_tpaths_exhaustive, terminal_cut};
use dissem_core::oracle::{brute_force_radio, brute_force_telephone, min_poise_tree, tree_catalog};
use dissem_core::planar::{find_3path_separator, verify_separator};
use dissem_core::rounding::{round_poise_tree, PoiseTree, RoundingParams};
use dissem_core::schedule::{check_demands_met, simulate_radio, simulate_telephone};
use dissem_core::tree_schedule::tree_broadcast_schedule;
use dissem_core::{DemandSet, Graph, MultiGraph, NodeWeights, PossessionState, RadioSchedule, RadioSemantics, TelephoneSchedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::new(n, edges.iter().copied()).unwrap()
}

fn cycle(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

fn broadcast(n: usize, root: usize) -> DemandSet {
    DemandSet::rooted(n, root, &(0..n).filter(|&t| t != root).collect::<Vec<_>>()).unwrap()
}

fn pairs(n: usize, k: usize, seed: u64) -> DemandSet {
    random_pairs(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn log2(x: usize) -> f64 {
    (x as f64).log2()
}

fn ceil_log2(x: usize) -> usize {
    (0..).find(|&d| (1usize << d) >= x).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares a measured constant against its frozen value, writing it when
/// absent or when `UPDATE_GOLDEN=1`.
fn golden_bound(name: &str, measured: f64) -> Result<f64, String> {
    let p = golden_path(name);
    if std::env::var("UPDATE_GOLDEN").as_deref() == Ok("1") || !p.exists() {
        std::fs::write(&p, format!("{measured:.6}\n")).map_err(|e| e.to_string())?;
    }
    let frozen: f64 = std::fs::read_to_string(&p).map_err(|e| e.to_string())?.trim().parse().map_err(|_| "bad golden".to_string())?;
    ensure!(measured <= frozen + 1e-6, "{name}: measured {measured:.6} above frozen {frozen:.6}");
    Ok(frozen)
}

fn golden_value(name: &str, measured: usize) -> Result<(), String> {
    let p = golden_path(name);
    if std::env::var("UPDATE_GOLDEN").as_deref() == Ok("1") || !p.exists() {
        std::fs::write(&p, format!("{measured}\n")).map_err(|e| e.to_string())?;
    }
    let frozen: usize = std::fs::read_to_string(&p).map_err(|e| e.to_string())?.trim().parse().map_err(|_| "bad golden".to_string())?;
    ensure!(measured == frozen, "{name}: {measured} differs from frozen {frozen}");
    Ok(())
}

fn telephone(g: &Graph, rounds: Vec<Vec<(usize, usize)>>) -> PossessionState {
    simulate_telephone(g, &PossessionState::initial(g.node_count()), &TelephoneSchedule::from_rounds(rounds)).unwrap()
}

fn radio_round(g: &Graph, tx: &[usize]) -> PossessionState {
    let mut s = RadioSchedule::new();
    s.push(tx.to_vec());
    simulate_radio(g, &PossessionState::initial(g.node_count()), &s).unwrap()
}

fn model_semantics() -> Check {
    let p3 = g(3, &[(0, 1), (1, 2)]);
    let st = telephone(&p3, vec![vec![(0, 1)], vec![(1, 2)]]);
    ensure!(st.holds(2, 0), "relay did not reach the far end");
    ensure!(check_demands_met(&st, &DemandSet::new(3, [(0, 2)]).unwrap()).met, "demand (0,2) unmet after relay");
    let idle = check_demands_met(&PossessionState::initial(3), &DemandSet::new(3, [(0, 2)]).unwrap());
    ensure!(!idle.met && idle.unmet == vec![(0, 2)], "empty schedule should leave (0,2) unmet");

    let s3 = star(3).unwrap();
    let st = telephone(&s3, vec![vec![(0, 1)], vec![(0, 2)], vec![(0, 3)]]);
    ensure!((1..4).all(|v| st.holds(v, 0)), "star calls did not inform every leaf");

    let k3 = cycle(3);
    let st = telephone(&k3, vec![vec![(0, 1)], vec![(0, 2)]]);
    ensure!(st.holds(1, 0) && st.holds(2, 0), "triangle schedule incomplete");
    let opt = brute_force_telephone(&k3, &broadcast(3, 0), 4).map_err(|e| e.to_string())?;
    ensure!(opt.length == 2, "triangle broadcast optimum {} instead of 2", opt.length);
    let gossip = check_demands_met(&st, &DemandSet::gossip(3));
    ensure!(gossip.unmet == vec![(2, 1)], "triangle gossip unmet pairs {:?}", gossip.unmet);

    let st = radio_round(&s3, &[0]);
    ensure!((1..4).all(|v| st.holds(v, 0)), "star leaves missed the center");
    let st = radio_round(&p3, &[0, 2]);
    ensure!(!st.holds(1, 0) && !st.holds(1, 2), "middle node heard through interference");
    let st = radio_round(&cycle(4), &[0]);
    ensure!(st.holds(1, 0) && st.holds(3, 0) && !st.holds(2, 0), "4-cycle reception wrong");
    Ok("telephone relay/star/triangle and radio star/interference/4-cycle reproduced".into())
}

fn oracle_instances() -> Vec<(&'static str, Graph, DemandSet)> {
    let mut v = vec![
        ("edge", g(2, &[(0, 1)]), DemandSet::new(2, [(0, 1)]).unwrap()),
        ("path4-bcast", path(4).unwrap(), broadcast(4, 0)),
        ("star3-bcast", star(3).unwrap(), broadcast(4, 0)),
        ("k3-bcast", cycle(3), broadcast(3, 0)),
        ("c4-cross", cycle(4), DemandSet::new(4, [(0, 2), (1, 3)]).unwrap()),
        ("grid23-corners", grid(2, 3).unwrap(), DemandSet::rooted(6, 0, &[2, 3, 5]).unwrap()),
        ("bintree-bcast", dary_tree(2, 2).unwrap(), broadcast(7, 0)),
        ("path5-ends", path(5).unwrap(), DemandSet::new(5, [(0, 4), (4, 0)]).unwrap()),
        ("c6-gossip", cycle(6), DemandSet::gossip(6)),
        ("grid24-rand", grid(2, 4).unwrap(), pairs(8, 4, 5)),
    ];
    for (n, k, seed) in [(6, 3, 1), (7, 4, 2), (8, 3, 3)] {
        v.push(("planar-rand", random_planar(n, seed).unwrap(), pairs(n, k, seed)));
    }
    v
}

fn lp_sanity() -> Check {
    let mut worst: f64 = 0.0;
    let insts = oracle_instances();
    for (name, g, d) in &insts {
        let lp = solve_poise(g, d).map_err(|e| format!("{name}: {e}"))?;
        let opt = brute_force_telephone(g, d, 2 * g.node_count()).map_err(|e| format!("{name}: {e}"))?.length;
        ensure!(lp.value <= 3.0 * opt as f64 + 1e-6, "{name}: LP {:.4} above 3*OPT = {}", lp.value, 3 * opt);
        worst = worst.max(lp.value / opt as f64);
    }
    Ok(format!("{} instances, max LP/OPT = {worst:.3} (bound 3)", insts.len()))
}

fn even_multigraph(seed: u64) -> (MultiGraph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(3..=8);
        let tcount = rng.gen_range(2..=n.min(5));
        let mut terms: Vec<usize> = (0..n).collect();
        for i in 0..tcount {
            let j = rng.gen_range(i..n);
            terms.swap(i, j);
        }
        terms.truncate(tcount);
        terms.sort_unstable();
        let mut count: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        let mut walk = |seq: &[usize]| {
            for w in seq.windows(2) {
                if w[0] != w[1] {
                    *count.entry((w[0].min(w[1]), w[0].max(w[1]))).or_default() += 1;
                }
            }
        };
        for _ in 0..rng.gen_range(0..3) {
            let len = rng.gen_range(2..5);
            let mut c: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            c.push(c[0]);
            walk(&c);
        }
        for i in 0..rng.gen_range(1..5) {
            let mut s = vec![terms[i % tcount]];
            s.extend((0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..n)));
            s.push(terms[(i + 1) % tcount]);
            walk(&s);
        }
        let copies: u64 = count.values().sum();
        if copies == 0 || copies > 20 {
            continue;
        }
        let edges: Vec<_> = count.into_iter().map(|((u, v), c)| (u, v, c)).collect();
        return (MultiGraph::new(n, edges).unwrap(), terms);
    }
}

fn multiflow_exactness() -> Check {
    let mut checked = 0;
    for seed in 0..24 {
        let (mg, terms) = even_multigraph(seed);
        for v in 0..mg.node_count() {
            ensure!(terms.contains(&v) || mg.degree(v) % 2 == 0, "seed {seed}: generator broke evenness");
        }
        let half: u64 = terms.iter().map(|&t| terminal_cut(&mg, &terms, t)).sum::<u64>() / 2;
        let p = pack_tpaths(&mg, &terms).map_err(|e| format!("seed {seed}: {e}"))?;
        p.verify(&mg, &terms).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(p.value() == half, "seed {seed}: packed {} but half the cut sum is {half}", p.value());
        let ex = pack_tpaths_exhaustive(&mg, &terms).value();
        ensure!(ex == half, "seed {seed}: exhaustive {ex} vs {half}");
        checked += 1;
    }
    Ok(format!("{checked} multigraphs, packing = exhaustive = half cut sum"))
}

fn forest_star() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_ratio = f64::INFINITY;
    for case in 0..1000 {
        let n = rng.gen_range(2..=50);
        let succ: Vec<Option<usize>> = (0..n)
            .map(|v| {
                let w = rng.gen_range(0..n);
                (w != v && rng.gen_range(0..8) != 0).then_some(w)
            })
            .collect();
        let arcs = |s: &[Option<usize>]| s.iter().flatten().count();
        let forest = break_cycles_to_in_forest(&succ);
        ensure!(2 * arcs(&forest) >= arcs(&succ), "case {case}: forest kept too few arcs");
        for s in 0..n {
            let mut v = s;
            let mut steps = 0;
            while let Some(w) = forest[v] {
                v = w;
                steps += 1;
                ensure!(steps <= n, "case {case}: cycle left in forest");
            }
        }
        let stars = extract_stars(&forest);
        ensure!(stars.iter().flatten().all(|&w| stars[w].is_none()), "case {case}: kept arcs chain");
        ensure!(2 * arcs(&stars) >= arcs(&forest), "case {case}: stars below half the forest");
        ensure!(3 * arcs(&stars) >= arcs(&succ), "case {case}: stars below a third of the nodes with an arc");
        if arcs(&succ) > 0 {
            min_ratio = min_ratio.min(arcs(&stars) as f64 / arcs(&succ) as f64);
        }
    }
    Ok(format!("1000 digraphs, min star arcs / out-arc nodes = {min_ratio:.3}"))
}

struct RoundingCase {
    name: &'static str,
    g: Graph,
    r: usize,
    terms: Vec<usize>,
}

fn rounding_cases() -> Vec<RoundingCase> {
    let case = |name, g: Graph, r, terms: &[usize]| RoundingCase { name, g, r, terms: terms.to_vec() };
    let mut pick = ChaCha8Rng::seed_from_u64(12);
    let mut sample = |n: usize, r: usize, k: usize| {
        let mut t: Vec<usize> = Vec::new();
        while t.len() < k {
            let v = pick.gen_range(0..n);
            if v != r && !t.contains(&v) {
                t.push(v);
            }
        }
        t.sort_unstable();
        t
    };
    let t9a = sample(9, 0, 4);
    let t9b = sample(9, 0, 3);
    let t16 = sample(16, 0, 5);
    let t20 = sample(20, 0, 6);
    vec![
        case("edge", g(2, &[(0, 1)]), 0, &[1]),
        case("star4", star(4).unwrap(), 0, &[1, 2, 3, 4]),
        case("path6", path(6).unwrap(), 0, &[1, 2, 3, 4, 5]),
        case("grid24-corners", grid(2, 4).unwrap(), 0, &[3, 4, 7]),
        case("grid33-corners", grid(3, 3).unwrap(), 4, &[0, 2, 6, 8]),
        case("grid33-all", grid(3, 3).unwrap(), 0, &[1, 2, 3, 4, 5, 6, 7, 8]),
        case("c6", cycle(6), 0, &[2, 3, 4]),
        case("bintree-leaves", dary_tree(2, 2).unwrap(), 0, &[3, 4, 5, 6]),
        case("planar9-a", random_planar(9, 1).unwrap(), 0, &t9a),
        case("planar9-b", random_planar(9, 2).unwrap(), 0, &t9b),
        case("grid44", grid(4, 4).unwrap(), 0, &t16),
        case("planar20", random_planar(20, 3).unwrap(), 0, &t20),
    ]
}

fn poise_rounding() -> Check {
    let mut worst_c: f64 = 0.0;
    let mut worst_lp: f64 = 0.0;
    for c in rounding_cases() {
        let n = c.g.node_count();
        let k = c.terms.len();
        let frac = solve_poise(&c.g, &DemandSet::rooted(n, c.r, &c.terms).unwrap()).map_err(|e| format!("{}: {e}", c.name))?;
        let out = round_poise_tree(&c.g, c.r, &c.terms, &frac, RoundingParams { seed: 1, ..Default::default() })
            .map_err(|e| format!("{}: {e}", c.name))?;
        let t = &out.tree;
        let mut need = c.terms.clone();
        need.push(c.r);
        ensure!(t.spans(&need), "{}: tree misses a terminal", c.name);
        PoiseTree::from_edges(n, c.r, &t.edges).map_err(|e| format!("{}: {e}", c.name))?;
        for p in &out.merge_paths {
            ensure!((p.len() - 1) as f64 <= 4.0 * frac.value + 1e-9, "{}: merge path of {} hops above 4L", c.name, p.len() - 1);
        }
        let iter_bound = ((k as f64).ln() / (4.0f64 / 3.0).ln()).ceil() as usize + 3;
        ensure!(out.iterations <= iter_bound, "{}: {} iterations above {iter_bound}", c.name, out.iterations);
        let lk = log2(k).max(1.0);
        let poise = t.poise() as f64;
        ensure!(poise <= 48.0 * frac.value * lk, "{}: poise {poise} above 48 L log k", c.name);
        worst_lp = worst_lp.max(poise / (frac.value * lk));
        if n <= 9 {
            let best = min_poise_tree(&c.g, c.r, &c.terms).map_err(|e| format!("{}: {e}", c.name))?.poise() as f64;
            worst_c = worst_c.max(poise / (lk * best));
        }
    }
    let frozen = golden_bound("rounding_c.txt", worst_c)?;
    Ok(format!("12 instances; max poise/(L log k) = {worst_lp:.3}; c = {worst_c:.3} (frozen {frozen:.3})"))
}

fn tree_broadcast() -> Check {
    let mut trees = 0;
    for n in 1..=8 {
        for edges in tree_catalog(n) {
            trees += 1;
            let t = g(n, &edges);
            for root in 0..n {
                let s = tree_broadcast_schedule(n, &edges, root).map_err(|e| e.to_string())?;
                let opt = if n == 1 { 0 } else { brute_force_telephone(&t, &broadcast(n, root), n).map_err(|e| e.to_string())?.length };
                ensure!(s.len() == opt, "tree {edges:?} root {root}: {} rounds vs optimum {opt}", s.len());
            }
        }
    }
    let d3 = dary_tree(3, 3).unwrap();
    let s = tree_broadcast_schedule(d3.node_count(), d3.edges(), 0).map_err(|e| e.to_string())?;
    ensure!(s.len() >= 9, "3-ary depth-3 tree broadcast in {} rounds", s.len());
    let st = simulate_telephone(&d3, &PossessionState::initial(40), &s).unwrap();
    ensure!(check_demands_met(&st, &broadcast(40, 0)).met, "3-ary tree broadcast incomplete");
    Ok(format!("{trees} unlabelled trees, every root optimal; 3-ary depth 3 needs {} rounds", s.len()))
}

fn separators() -> Check {
    let mut count = 0;
    let mut check = |g: &Graph, what: &str| -> Result<(), String> {
        let n = g.node_count();
        let w = NodeWeights::unit(n);
        let all: Vec<usize> = (0..n).collect();
        let sep = find_3path_separator(g, &w, &all).map_err(|e| format!("{what}: {e}"))?;
        ensure!(sep.paths.len() <= 3, "{what}: {} paths", sep.paths.len());
        ensure!(verify_separator(g, &w, &all, &sep), "{what}: separator rejected");
        count += 1;
        Ok(())
    };
    for r in 1..=8 {
        for c in 1..=8 {
            check(&grid(r, c).unwrap(), &format!("grid {r}x{c}"))?;
        }
    }
    for seed in 0..50u64 {
        let n = 10 + (seed as usize * 7) % 51;
        check(&random_planar(n, seed).unwrap(), &format!("planar n={n} seed={seed}"))?;
    }
    Ok(format!("{count} graphs (64 grids, 50 random planar) verified"))
}

fn multicast_instances() -> Vec<(String, Graph, DemandSet)> {
    let mut v = Vec::new();
    for (i, (n, k)) in [(5, 2), (6, 3), (7, 3), (8, 4), (8, 2), (7, 5)].into_iter().enumerate() {
        let seed = 100 + i as u64;
        v.push((format!("planar{n}-k{k}"), random_planar(n, seed).unwrap(), pairs(n, k, seed)));
    }
    v.push(("grid23-k3".into(), grid(2, 3).unwrap(), pairs(6, 3, 7)));
    v.push(("grid24-k4".into(), grid(2, 4).unwrap(), pairs(8, 4, 8)));
    v.push(("path6-ends".into(), path(6).unwrap(), DemandSet::new(6, [(0, 5), (5, 0)]).unwrap()));
    v.push(("star6-k3".into(), star(6).unwrap(), pairs(7, 3, 9)));
    for (i, (r, c, k)) in [(3, 3, 4), (3, 4, 6), (4, 4, 5), (4, 5, 8), (5, 5, 6), (3, 6, 12)].into_iter().enumerate() {
        v.push((format!("grid{r}x{c}-k{k}"), grid(r, c).unwrap(), pairs(r * c, k, 20 + i as u64)));
    }
    for (i, (n, k)) in
        [(10, 4), (12, 6), (14, 8), (15, 12), (16, 5), (18, 7), (20, 10), (20, 12), (22, 6), (24, 8), (26, 6), (28, 9), (30, 8), (30, 12)]
            .into_iter()
            .enumerate()
    {
        let seed = 40 + i as u64;
        v.push((format!("planar{n}-k{k}"), random_planar(n, seed).unwrap(), pairs(n, k, seed)));
    }
    v
}

fn multicast() -> Check {
    let insts = multicast_instances();
    let (mut worst_ratio, mut worst_scale): (f64, f64) = (0.0, 0.0);
    let mut oracle_runs = 0;
    for (name, g, d) in &insts {
        let k = d.distinct_pairs().len();
        let out = planar_mc_multicast(g, d, MulticastParams { seed: 5, ..Default::default() }).map_err(|e| format!("{name}: {e}"))?;
        let st = simulate_telephone(g, &PossessionState::initial(g.node_count()), &out.schedule).map_err(|e| format!("{name}: {e}"))?;
        ensure!(check_demands_met(&st, d).met, "{name}: demands unmet");
        ensure!(out.depth <= ceil_log2(k) + 1 && out.depth <= depth_bound(k), "{name}: depth {} for k = {k}", out.depth);
        let scale_bound = 3.0 * std::f64::consts::E * log2(k).max(1.0);
        ensure!(out.max_scaling <= scale_bound, "{name}: scaling {:.3} above {scale_bound:.3}", out.max_scaling);
        worst_scale = worst_scale.max(out.max_scaling);
        if g.node_count() <= 8 {
            let opt = brute_force_telephone(g, d, out.schedule.len()).map_err(|e| format!("{name}: {e}"))?.length;
            let ratio = out.schedule.len() as f64 / opt as f64;
            ensure!(ratio <= 50.0, "{name}: length/OPT = {ratio:.2}");
            worst_ratio = worst_ratio.max(ratio);
            oracle_runs += 1;
        }
    }
    Ok(format!(
        "{} instances valid; {oracle_runs} with oracle, max length/OPT = {worst_ratio:.2}; max scaling = {worst_scale:.3}",
        insts.len()
    ))
}

fn gossip_instances() -> Vec<(String, Graph)> {
    let mut v: Vec<(String, Graph)> = vec![
        ("path3".into(), path(3).unwrap()),
        ("path5".into(), path(5).unwrap()),
        ("star3".into(), star(3).unwrap()),
        ("c4".into(), cycle(4)),
        ("grid23".into(), grid(2, 3).unwrap()),
        ("planar7".into(), random_planar(7, 1).unwrap()),
        ("grid44".into(), grid(4, 4).unwrap()),
        ("grid57".into(), grid(5, 7).unwrap()),
        ("grid78".into(), grid(7, 8).unwrap()),
        ("path30".into(), path(30).unwrap()),
        ("star20".into(), star(20).unwrap()),
        ("bintree4".into(), dary_tree(2, 4).unwrap()),
        ("ternary3".into(), dary_tree(3, 3).unwrap()),
    ];
    for (i, n) in [12, 20, 28, 36, 44, 52, 60].into_iter().enumerate() {
        v.push((format!("planar{n}"), random_planar(n, 200 + i as u64).unwrap()));
    }
    v
}

fn gossip() -> Check {
    let insts = gossip_instances();
    let (mut worst_c, mut worst_ratio): (f64, f64) = (0.0, 0.0);
    let mut oracle_runs = 0;
    for (name, g) in &insts {
        let n = g.node_count();
        let out = radio_gossip(g).map_err(|e| format!("{name}: {e}"))?;
        let st = simulate_radio(g, &PossessionState::initial(n), &out.schedule).map_err(|e| format!("{name}: {e}"))?;
        ensure!(check_demands_met(&st, &DemandSet::gossip(n)).met, "{name}: gossip incomplete");
        let l2 = log2(n) * log2(n);
        worst_c = worst_c.max(out.gather_len as f64 / (out.l as f64 * l2));
        if n <= 7 {
            let opt = brute_force_radio(g, &DemandSet::gossip(n), RadioSemantics::FullDuplex, out.schedule.len())
                .map_err(|e| format!("{name}: {e}"))?
                .length;
            let ratio = out.schedule.len() as f64 / opt as f64;
            ensure!(ratio <= 60.0, "{name}: length/OPT = {ratio:.2}");
            worst_ratio = worst_ratio.max(ratio);
            oracle_runs += 1;
        }
    }
    let frozen = golden_bound("gossip_c.txt", worst_c)?;
    for (file, graph) in [("radio_opt_path3.txt", path(3).unwrap()), ("radio_opt_star2.txt", star(2).unwrap())] {
        let opt = brute_force_radio(&graph, &DemandSet::gossip(3), RadioSemantics::FullDuplex, 6).map_err(|e| e.to_string())?;
        golden_value(file, opt.length)?;
    }
    Ok(format!(
        "{} instances valid; gather c = {worst_c:.3} (frozen {frozen:.3}); {oracle_runs} with oracle, max length/OPT = {worst_ratio:.2}",
        insts.len()
    ))
}

fn cli_determinism() -> Check {
    let base = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cli");
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).map_err(|e| e.to_string())?;
    let files: [(&str, &str); 6] = [
        ("g.txt", "9 12\n0 1\n0 3\n1 2\n1 4\n2 5\n3 4\n3 6\n4 5\n4 7\n5 8\n6 7\n7 8\n"),
        ("d.txt", "3\n0 8\n2 6\n7 1\n"),
        ("s.txt", "0-1\n1-2\n"),
        ("mg.txt", "4 6\n0 1\n0 1\n0 2\n0 2\n0 3\n0 3\n"),
        ("small.txt", "4 4\n0 1\n1 2\n2 3\n0 3\n"),
        ("m.toml", "[[instance]]\nname = \"a\"\ngraph = { kind = \"grid\", rows = 2, cols = 3 }\ndemands = { kind = \"random\", k = 3 }\nseed = 2\n\n[[instance]]\nname = \"b\"\nmodel = \"radio\"\ngraph = { kind = \"path\", n = 4 }\n"),
    ];
    let verbs: Vec<Vec<&str>> = vec![
        vec!["solve", "--graph", "g.txt", "--demands", "d.txt", "--out", "o.txt", "--metrics=m.txt"],
        vec!["solve", "--model", "radio", "--graph", "g.txt", "--out", "o.txt", "--metrics=m.txt"],
        vec!["gossip", "--graph", "g.txt", "--out", "o.txt", "--metrics=m.txt"],
        vec!["validate", "--graph", "g.txt", "--demands", "d.txt", "--schedule", "s.txt", "--metrics=m.txt"],
        vec!["oracle", "--graph", "small.txt", "--metrics=m.txt"],
        vec!["gen", "--kind", "random-planar", "--n", "25", "--demand-kind", "random", "--k", "5", "--demands-out", "dd.txt", "--out", "o.txt"],
        vec!["lp", "dump", "--graph", "g.txt", "--demands", "d.txt"],
        vec!["lp", "solve", "--graph", "g.txt", "--demands", "d.txt", "--metrics=m.txt"],
        vec!["separator", "--graph", "g.txt", "--metrics=m.txt"],
        vec!["round-poise", "--graph", "g.txt", "--root", "0", "--terminals", "2,6,8", "--metrics=m.txt"],
        vec!["pack", "--graph", "mg.txt", "--terminals", "1,2,3", "--metrics=m.txt"],
        vec!["suite", "m.toml", "--metrics=m.txt"],
    ];
    let mut snapshots: Vec<Vec<Vec<u8>>> = Vec::new();
    for run in 0..2 {
        let mut snap = Vec::new();
        for (i, v) in verbs.iter().enumerate() {
            let dir = base.join(format!("run{run}-{i}"));
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            for (name, body) in files {
                std::fs::write(dir.join(name), body).map_err(|e| e.to_string())?;
            }
            let out = Command::new(env!("CARGO_BIN_EXE_dissem"))
                .current_dir(&dir)
                .args(v)
                .args(["--seed", "11"])
                .output()
                .map_err(|e| e.to_string())?;
            ensure!(out.status.code().is_some_and(|c| c <= 2), "{}: exit {:?}", v[0], out.status.code());
            snap.push(out.stdout);
            snap.push(out.stderr);
            for f in ["o.txt", "m.txt", "dd.txt"] {
                snap.push(std::fs::read(dir.join(f)).unwrap_or_default());
            }
        }
        snapshots.push(snap);
    }
    for (i, v) in verbs.iter().enumerate() {
        ensure!(snapshots[0][i * 5..i * 5 + 5] == snapshots[1][i * 5..i * 5 + 5], "{} {}: outputs differ between runs", v[0], v[1]);
    }
    Ok(format!("{} invocations over 10 verbs byte-identical across two runs", verbs.len()))
}

fn main() {
    let criteria = [
        Criterion { name: "model semantics", limit: Duration::from_secs(1), run: model_semantics },
        Criterion { name: "LP at most 3 OPT", limit: Duration::from_secs(60), run: lp_sanity },
        Criterion { name: "multiflow exactness", limit: Duration::from_secs(120), run: multiflow_exactness },
        Criterion { name: "forest and star bounds", limit: Duration::from_secs(30), run: forest_star },
        Criterion { name: "poise rounding", limit: Duration::from_secs(300), run: poise_rounding },
        Criterion { name: "tree broadcast optimality", limit: Duration::from_secs(120), run: tree_broadcast },
        Criterion { name: "separator contract", limit: Duration::from_secs(60), run: separators },
        Criterion { name: "end-to-end multicast", limit: Duration::from_secs(600), run: multicast },
        Criterion { name: "end-to-end gossip", limit: Duration::from_secs(600), run: gossip },
        Criterion { name: "CLI determinism", limit: Duration::from_secs(60), run: cli_determinism },
    ];
    let mut failed = 0;
    for (i, Criterion { name, limit, run }) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = run();
        let took = t0.elapsed();
        let res = match res {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            r => r,
        };
        match res {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({took:.2?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({took:.2?}): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
