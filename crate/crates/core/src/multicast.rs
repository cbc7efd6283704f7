//! Multicommodity multicast on planar graphs.
//!
//! Each recursion node finds a three-path separator of its component and
//! solves the poise LP there. Pairs whose flow meets the separator enough
//! (`K1`) are routed through one separator path: gather along a low-poise
//! tree to the path, shuttle along it, broadcast back. The other pairs
//! (`K2`) live inside one child component and recurse; children run side by
//! side.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{DemandSet, Graph, UNREACHABLE};
use crate::lp::{solve_poise, PoiseFractional, WeightedPath};
use crate::math::{ceil_log2, log2};
use crate::planar::{find_3path_separator, is_planar, PathSeparator};
use crate::rounding::{round_poise_tree, PoiseTree, RoundingParams, DEFAULT_GRID};
use crate::schedule::{check_demands_met, simulate_telephone, PossessionState, TelephoneSchedule};
use crate::tree_schedule::{path_shuttle_schedule, tree_gather_schedule};
use crate::Error;

const MASS_EPS: f64 = 1e-9;

/// `min(1/2, 1/log2 k)`.
pub fn gamma_for(k: usize) -> f64 {
    if k <= 4 {
        0.5
    } else {
        f64::min(0.5, 1.0 / log2(k as f64))
    }
}

/// Outcome of [`split_demands`]. Pair indices refer to `frac.pairs`.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandSplit {
    /// Flow mass of each pair on paths meeting the separator.
    pub crossing: Vec<f64>,
    /// `(pair, separator path)` for every pair routed through the separator.
    pub k1: Vec<(usize, usize)>,
    pub k2: Vec<usize>,
}

fn meets(p: &WeightedPath, on: &[bool]) -> bool {
    p.nodes.iter().any(|&v| on[v])
}

fn masks(n: usize, paths: &[Vec<usize>]) -> Vec<Vec<bool>> {
    paths
        .iter()
        .map(|p| {
            let mut m = vec![false; n];
            p.iter().for_each(|&v| m[v] = true);
            m
        })
        .collect()
}

/// Sorts pairs into `K1` (crossing mass at least `gamma`) and `K2`. A `K1`
/// pair is assigned the path meeting the most of its flow, ties by index.
pub fn split_demands(frac: &PoiseFractional, n: usize, paths: &[Vec<usize>], gamma: f64) -> DemandSplit {
    let on_path = masks(n, paths);
    let mut on_any = vec![false; n];
    paths.iter().flatten().for_each(|&v| on_any[v] = true);
    let mut split = DemandSplit { crossing: Vec::new(), k1: Vec::new(), k2: Vec::new() };
    for i in 0..frac.pairs.len() {
        let list = frac.paths_of(i);
        let crossing: f64 = list.iter().filter(|p| meets(p, &on_any)).map(|p| p.weight).sum();
        split.crossing.push(crossing);
        if crossing + MASS_EPS >= gamma {
            let mut best = (0, f64::NEG_INFINITY);
            for (j, m) in on_path.iter().enumerate() {
                let mass: f64 = list.iter().filter(|p| meets(p, m)).map(|p| p.weight).sum();
                if mass > best.1 + MASS_EPS {
                    best = (j, mass);
                }
            }
            split.k1.push((i, best.0));
        } else {
            split.k2.push(i);
        }
    }
    split
}

/// Keeps only the paths of each `K1` pair that meet its assigned path,
/// scales them by `min(3/gamma, 1/kept)` and truncates to total 1, largest
/// weights first. Returns the restricted solution and the scale factors.
pub fn scale_k1(
    g: &Graph,
    frac: &PoiseFractional,
    k1: &[(usize, usize)],
    paths: &[Vec<usize>],
    gamma: f64,
) -> Result<(PoiseFractional, Vec<f64>), Error> {
    let on_path = masks(g.node_count(), paths);
    let mut pairs = Vec::new();
    let mut lists = Vec::new();
    let mut factors = Vec::new();
    for &(i, j) in k1 {
        let mut kept: Vec<WeightedPath> = frac.paths_of(i).iter().filter(|p| meets(p, &on_path[j])).cloned().collect();
        let mass: f64 = kept.iter().map(|p| p.weight).sum();
        if mass + MASS_EPS < gamma / 3.0 {
            return Err(Error::InsufficientCrossingFlow(i));
        }
        let factor = f64::min(3.0 / gamma, 1.0 / mass);
        // stable: equal weights keep decomposition order
        kept.sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap());
        let mut left = 1.0f64;
        let mut out = Vec::new();
        for mut p in kept {
            if left <= MASS_EPS {
                break;
            }
            p.weight = f64::min(p.weight * factor, left);
            left -= p.weight;
            out.push(p);
        }
        if let Some(last) = out.last_mut() {
            last.weight += left.max(0.0);
        }
        pairs.push(frac.pairs[i]);
        lists.push(out);
        factors.push(factor);
    }
    Ok((PoiseFractional::from_paths(g, pairs, lists), factors))
}

/// A component with a balanced binary tree of dummy nodes hung over one
/// separator path. Dummies are the ids `base..graph.node_count()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedInstance {
    pub graph: Graph,
    pub base: usize,
    pub path: Vec<usize>,
    pub root: usize,
    pub terminals: Vec<usize>,
    /// Parent in the binary tree, for leaves and dummies.
    pub tree_parent: BTreeMap<usize, usize>,
    pub tree_depth: usize,
}

impl AugmentedInstance {
    pub fn is_dummy(&self, v: usize) -> bool {
        v >= self.base
    }

    /// Binary-tree path from the root down to the leaf `p`.
    pub fn root_to_leaf(&self, p: usize) -> Vec<usize> {
        let mut out = vec![p];
        let mut c = p;
        while let Some(&q) = self.tree_parent.get(&c) {
            out.push(q);
            c = q;
        }
        out.reverse();
        out
    }
}

fn hang(leaves: &[usize], next: &mut usize, edges: &mut Vec<(usize, usize)>, parent: &mut BTreeMap<usize, usize>) -> (usize, usize) {
    if leaves.len() == 1 {
        return (leaves[0], 0);
    }
    let id = *next;
    *next += 1;
    let mid = leaves.len().div_ceil(2);
    let (a, da) = hang(&leaves[..mid], next, edges, parent);
    let (b, db) = hang(&leaves[mid..], next, edges, parent);
    for c in [a, b] {
        edges.push((id, c));
        parent.insert(c, id);
    }
    (id, 1 + da.max(db))
}

/// Attaches the binary tree over `path` to `h`. Terminals are both ends of
/// every pair, except the root itself.
pub fn build_augmented_instance(h: &Graph, path: &[usize], pairs: &[(usize, usize)]) -> Result<AugmentedInstance, Error> {
    if path.is_empty() || pairs.is_empty() {
        return Err(Error::BadParams("empty separator path or pair group"));
    }
    let base = h.node_count();
    let mut next = base;
    let mut edges = h.edges().to_vec();
    let mut tree_parent = BTreeMap::new();
    let (root, tree_depth) = hang(path, &mut next, &mut edges, &mut tree_parent);
    let graph = Graph::new(next, edges)?;
    let terminals: BTreeSet<usize> = pairs.iter().flat_map(|&(s, t)| [s, t]).filter(|&v| v != root).collect();
    Ok(AugmentedInstance {
        graph,
        base,
        path: path.to_vec(),
        root,
        terminals: terminals.into_iter().collect(),
        tree_parent,
        tree_depth,
    })
}

/// Rooted fractional solution on the augmented graph: every scaled path
/// is cut at the separator path and continued up the binary tree. A
/// terminal in several pairs averages its flows.
pub fn augmented_fractional(aug: &AugmentedInstance, scaled: &PoiseFractional, group: &[usize]) -> PoiseFractional {
    let mut on = vec![false; aug.base];
    aug.path.iter().for_each(|&v| on[v] = true);
    let mut acc: BTreeMap<usize, (BTreeMap<Vec<usize>, f64>, f64)> = BTreeMap::new();
    for &i in group {
        let (s, t) = scaled.pairs[i];
        for end in [s, t] {
            if end == aug.root {
                continue;
            }
            let entry = acc.entry(end).or_default();
            entry.1 += 1.0;
            for p in scaled.paths_of(i) {
                let nodes = &p.nodes;
                let tail: Vec<usize> = if end == s {
                    let k = nodes.iter().position(|&v| on[v]).unwrap();
                    nodes[..k].iter().rev().copied().collect()
                } else {
                    let k = nodes.iter().rposition(|&v| on[v]).unwrap();
                    nodes[k + 1..].to_vec()
                };
                let leaf = if end == s { nodes[tail.len()] } else { nodes[nodes.len() - 1 - tail.len()] };
                let mut full = aug.root_to_leaf(leaf);
                full.extend(tail);
                *entry.0.entry(full).or_insert(0.0) += p.weight;
            }
        }
    }
    let mut pairs = Vec::new();
    let mut lists = Vec::new();
    for (t, (paths, count)) in acc {
        pairs.push((aug.root, t));
        lists.push(paths.into_iter().map(|(nodes, w)| WeightedPath { nodes, weight: w / count }).collect());
    }
    PoiseFractional::from_paths(&aug.graph, pairs, lists)
}

/// Gather along the real part of `tree` to the separator path, shuttle
/// along the path, then the gather in reverse. Local ids of the component.
pub fn schedule_k1(aug: &AugmentedInstance, tree: &PoiseTree, pairs: &[(usize, usize)]) -> Result<TelephoneSchedule, Error> {
    let n = aug.base;
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in &tree.edges {
        if !aug.is_dummy(u) && !aug.is_dummy(v) {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
    }
    let pos: BTreeMap<usize, usize> = aug.path.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // Every real tree node hangs below its nearest path node.
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut forest: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &p in &aug.path {
        if tree.nodes.contains(&p) && !owner.contains_key(&p) {
            owner.insert(p, p);
            queue.push_back(p);
        }
    }
    while let Some(u) = queue.pop_front() {
        let o = owner[&u];
        for &w in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
            if !owner.contains_key(&w) && !pos.contains_key(&w) {
                owner.insert(w, o);
                forest.entry(o).or_default().push((u, w));
                queue.push_back(w);
            }
        }
    }
    let mut shift = 0usize;
    for &(s, t) in pairs {
        let (Some(a), Some(b)) = (owner.get(&s), owner.get(&t)) else {
            return Err(Error::DummyEdgeScheduled);
        };
        shift = shift.max(pos[a].abs_diff(pos[b]));
    }
    let mut parts = Vec::new();
    for (&root, edges) in &forest {
        parts.push(tree_gather_schedule(n, edges, root)?);
    }
    let gather = TelephoneSchedule::parallel(&parts, n)?;
    let mut out = gather.clone();
    if shift > 0 {
        out.extend(path_shuttle_schedule(&aug.path, shift + 1));
    }
    out.extend(gather.reversed());
    if out.rounds.iter().flatten().any(|&(u, v)| aug.is_dummy(u) || aug.is_dummy(v)) {
        return Err(Error::DummyEdgeScheduled);
    }
    Ok(out)
}

/// One node of the recursion, in global ids.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionNode {
    pub component: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub separator: Option<PathSeparator>,
    pub k1: Vec<(usize, usize)>,
    pub k2: Vec<(usize, usize)>,
    /// `K1` pairs grouped by separator path.
    pub groups: Vec<Vec<(usize, usize)>>,
    pub depth: usize,
    pub lp_value: f64,
    /// Rounds spent on this node's own pairs.
    pub rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MulticastParams {
    pub seed: u64,
    pub grid: u64,
}

impl Default for MulticastParams {
    fn default() -> Self {
        MulticastParams { seed: 0, grid: DEFAULT_GRID }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MulticastOutcome {
    pub schedule: TelephoneSchedule,
    pub gamma: f64,
    /// Levels of the recursion that hold at least one pair.
    pub depth: usize,
    pub lp_root: f64,
    /// Largest product of `K2` rescalings and the final `K1` scaling.
    pub max_scaling: f64,
    /// Per level: the longest own-pair schedule among its nodes.
    pub level_rounds: Vec<usize>,
    pub nodes: Vec<RecursionNode>,
}

struct Ctx<'a> {
    g: &'a Graph,
    gamma: f64,
    params: MulticastParams,
    nodes: Vec<RecursionNode>,
    max_scaling: f64,
    lp_root: Option<f64>,
}

/// Builds a telephone schedule delivering every `(s, t)` message of
/// `demands` on the planar graph `g`, then checks it by simulation.
pub fn planar_mc_multicast(g: &Graph, demands: &DemandSet, params: MulticastParams) -> Result<MulticastOutcome, Error> {
    if !is_planar(g) {
        return Err(Error::NotPlanar);
    }
    let pairs = demands.distinct_pairs();
    for &(s, t) in &pairs {
        if g.bfs_distances(s, None)[t] == UNREACHABLE {
            return Err(Error::InfeasiblePair(s, t));
        }
    }
    let gamma = gamma_for(pairs.len());
    let mut ctx = Ctx { g, gamma, params, nodes: Vec::new(), max_scaling: 0.0, lp_root: None };
    let mut schedule = TelephoneSchedule::new();
    let mut involved: BTreeSet<usize> = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
    // Each component of g containing pairs is an independent instance.
    let mut parts = Vec::new();
    for comp in g.connected_components(&[]) {
        let inside: Vec<_> = pairs.iter().copied().filter(|p| comp.binary_search(&p.0).is_ok()).collect();
        if inside.is_empty() {
            continue;
        }
        comp.iter().for_each(|v| {
            involved.remove(v);
        });
        let scale = inside.iter().map(|&p| (p, 1.0)).collect();
        parts.push(recurse(&mut ctx, comp, inside, 1, scale)?);
    }
    schedule.extend(TelephoneSchedule::parallel(&parts, g.node_count())?);
    schedule.validate(g)?;
    let end = simulate_telephone(g, &PossessionState::initial(g.node_count()), &schedule)?;
    if !check_demands_met(&end, demands).met {
        return Err(Error::DemandsUnmet);
    }
    let depth = ctx.nodes.iter().map(|n| n.depth).max().unwrap_or(0);
    let mut level_rounds = vec![0; depth];
    for node in &ctx.nodes {
        level_rounds[node.depth - 1] = level_rounds[node.depth - 1].max(node.rounds);
    }
    Ok(MulticastOutcome {
        schedule,
        gamma,
        depth,
        lp_root: ctx.lp_root.unwrap_or(0.0),
        max_scaling: ctx.max_scaling,
        level_rounds,
        nodes: ctx.nodes,
    })
}

fn recurse(
    ctx: &mut Ctx,
    comp: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    depth: usize,
    scale: BTreeMap<(usize, usize), f64>,
) -> Result<TelephoneSchedule, Error> {
    let g = ctx.g;
    let n = g.node_count();
    let mut node = RecursionNode {
        component: comp.clone(),
        pairs: pairs.clone(),
        separator: None,
        k1: Vec::new(),
        k2: Vec::new(),
        groups: Vec::new(),
        depth,
        lp_value: 0.0,
        rounds: 0,
    };
    let mut mask = vec![false; n];
    comp.iter().for_each(|&v| mask[v] = true);
    if pairs.len() == 1 {
        let (s, t) = pairs[0];
        let path = g.shortest_path_within(s, t, Some(&mask)).ok_or(Error::InfeasiblePair(s, t))?;
        let sched = path_shuttle_schedule(&path, path.len() - 1);
        node.k1 = pairs;
        node.rounds = sched.len();
        ctx.max_scaling = ctx.max_scaling.max(scale.values().copied().fold(0.0, f64::max));
        ctx.nodes.push(node);
        return Ok(sched);
    }

    let (h, map) = g.induced(&comp);
    let local: BTreeMap<usize, usize> = map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let demands = DemandSet::new(n, pairs.iter().copied())?;
    let sep = find_3path_separator(g, &demands.node_weights(n), &comp)?;
    let sep_local: Vec<Vec<usize>> = sep.paths.iter().map(|p| p.iter().map(|v| local[v]).collect()).collect();
    let local_demands = DemandSet::new(h.node_count(), pairs.iter().map(|&(s, t)| (local[&s], local[&t])))?;
    let frac = solve_poise(&h, &local_demands)?;
    node.lp_value = frac.value;
    if ctx.lp_root.is_none() {
        ctx.lp_root = Some(frac.value);
    }
    let split = split_demands(&frac, h.node_count(), &sep_local, ctx.gamma);
    let to_global = |(s, t): (usize, usize)| (map[s], map[t]);
    let (scaled, factors) = scale_k1(&h, &frac, &split.k1, &sep_local, ctx.gamma)?;

    let mut own = TelephoneSchedule::new();
    node.groups = vec![Vec::new(); sep_local.len()];
    for (j, path) in sep_local.iter().enumerate() {
        let group: Vec<usize> = (0..split.k1.len()).filter(|&q| split.k1[q].1 == j).collect();
        if group.is_empty() {
            continue;
        }
        let group_pairs: Vec<(usize, usize)> = group.iter().map(|&q| scaled.pairs[q]).collect();
        let aug = build_augmented_instance(&h, path, &group_pairs)?;
        let sched = if aug.terminals.is_empty() {
            TelephoneSchedule::new()
        } else {
            let afrac = augmented_fractional(&aug, &scaled, &group);
            let seed = ctx.params.seed.wrapping_add((ctx.nodes.len() * 3 + j) as u64);
            let rounded = round_poise_tree(&aug.graph, aug.root, &aug.terminals, &afrac, RoundingParams {
                grid: ctx.params.grid,
                seed,
            })?;
            schedule_k1(&aug, &rounded.tree, &group_pairs)?
        };
        own.extend(TelephoneSchedule::from_rounds(
            sched.rounds.into_iter().map(|r| r.into_iter().map(to_global).collect()).collect(),
        ));
        for &q in &group {
            let p = to_global(scaled.pairs[q]);
            ctx.max_scaling = ctx.max_scaling.max(scale[&p] * factors[q]);
            node.groups[j].push(p);
        }
    }
    node.k1 = split.k1.iter().map(|&(i, _)| to_global(frac.pairs[i])).collect();
    node.k2 = split.k2.iter().map(|&i| to_global(frac.pairs[i])).collect();
    node.separator = Some(sep.clone());
    node.rounds = own.len();

    let mut rest = mask.clone();
    sep.nodes().iter().for_each(|&v| rest[v] = false);
    let children = g.components_of(&rest);
    let mut child_pairs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); children.len()];
    let mut child_scale: Vec<BTreeMap<(usize, usize), f64>> = vec![BTreeMap::new(); children.len()];
    for &i in &split.k2 {
        let (s, t) = to_global(frac.pairs[i]);
        let c = children
            .iter()
            .position(|c| c.binary_search(&s).is_ok() && c.binary_search(&t).is_ok())
            .ok_or(Error::SplitPairNotCrossing(s, t))?;
        child_pairs[c].push((s, t));
        child_scale[c].insert((s, t), scale[&(s, t)] / (1.0 - split.crossing[i]));
    }
    ctx.nodes.push(node);
    let mut parts = Vec::new();
    for ((c, p), sc) in children.into_iter().zip(child_pairs).zip(child_scale) {
        if !p.is_empty() {
            parts.push(recurse(ctx, c, p, depth + 1, sc)?);
        }
    }
    own.extend(TelephoneSchedule::parallel(&parts, n)?);
    Ok(own)
}

/// `ceil(log2 k) + 1`.
pub fn depth_bound(k: usize) -> usize {
    ceil_log2(k.max(1)) + 1
}
