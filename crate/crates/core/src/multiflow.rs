//! T-path packings in multigraphs, plus the forest and star extraction used
//! when merging cluster centers.
//!
//! `pack_tpaths` is constructive: at every inner vertex it splits off pairs
//! of edges as long as every `lambda(t, T - t)` is preserved, tracking the
//! trail each new edge stands for. Once all inner vertices are isolated the
//! remaining terminal-terminal edges are the packing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::flow::MaxFlow;
use crate::graph::MultiGraph;
use crate::Error;

/// A path in a multigraph used `count` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedPath {
    pub nodes: Vec<usize>,
    pub count: u64,
}

/// Edge-disjoint T-paths (each copy of an edge used at most once).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TPathPacking {
    pub paths: Vec<PackedPath>,
}

impl TPathPacking {
    pub fn value(&self) -> u64 {
        self.paths.iter().map(|p| p.count).sum()
    }

    /// Number of path ends at `t`.
    pub fn endpoint_count(&self, t: usize) -> u64 {
        self.paths
            .iter()
            .map(|p| p.count * (u64::from(p.nodes[0] == t) + u64::from(*p.nodes.last().unwrap() == t)))
            .sum()
    }

    /// Checks edge-disjointness and the T-path shape of every path.
    pub fn verify(&self, g: &MultiGraph, terminals: &[usize]) -> Result<(), &'static str> {
        let is_t = terminal_mask(g.node_count(), terminals);
        let mut used: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for p in &self.paths {
            let (a, b) = (p.nodes[0], *p.nodes.last().unwrap());
            if p.nodes.len() < 2 || a == b || !is_t[a] || !is_t[b] {
                return Err("path does not join two distinct terminals");
            }
            if p.nodes[1..p.nodes.len() - 1].iter().any(|&v| is_t[v]) {
                return Err("terminal inside a path");
            }
            let distinct: BTreeSet<_> = p.nodes.iter().collect();
            if distinct.len() != p.nodes.len() {
                return Err("path repeats a node");
            }
            for w in p.nodes.windows(2) {
                *used.entry(key(w[0], w[1])).or_insert(0) += p.count;
            }
        }
        for ((u, v), c) in used {
            if c > g.multiplicity(u, v) {
                return Err("edge copy used twice");
            }
        }
        Ok(())
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn terminal_mask(n: usize, terminals: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    terminals.iter().for_each(|&t| m[t] = true);
    m
}

fn cut_on(n: usize, edges: &BTreeMap<(usize, usize), u64>, is_t: &[bool], t: usize) -> u64 {
    let sink = n;
    let mut f = MaxFlow::new(n + 1);
    for (&(u, v), &m) in edges {
        if m > 0 && u != v {
            f.add_edge(u, v, m as i64);
        }
    }
    for (v, &term) in is_t.iter().enumerate() {
        if term && v != t {
            f.add_arc(v, sink, i64::MAX / 4);
        }
    }
    f.max_flow(t, sink) as u64
}

/// `lambda(t, T - t)`: minimum number of edge copies separating `t` from the
/// other terminals.
pub fn terminal_cut(g: &MultiGraph, terminals: &[usize], t: usize) -> u64 {
    let is_t = terminal_mask(g.node_count(), terminals);
    if is_t.iter().filter(|&&b| b).count() < 2 {
        return 0;
    }
    let edges = g.edges().iter().map(|&(u, v, m)| ((u, v), m)).collect();
    cut_on(g.node_count(), &edges, &is_t, t)
}

// Trails stored oriented from the smaller to the larger endpoint.
type Bundles = BTreeMap<(usize, usize), Vec<(Vec<usize>, u64)>>;

fn take(bundles: &mut Bundles, u: usize, v: usize, mut count: u64) -> Vec<(Vec<usize>, u64)> {
    let list = bundles.get_mut(&key(u, v)).unwrap();
    let mut out = Vec::new();
    while count > 0 {
        let (trail, c) = list.last_mut().unwrap();
        let use_c = (*c).min(count);
        let mut tr = trail.clone();
        if tr[0] != u {
            tr.reverse();
        }
        out.push((tr, use_c));
        *c -= use_c;
        count -= use_c;
        if *c == 0 {
            list.pop();
        }
    }
    if list.is_empty() {
        bundles.remove(&key(u, v));
    }
    out
}

/// Maximum packing of edge-disjoint T-paths.
///
/// Requires every non-terminal to have even degree. The value always equals
/// `sum lambda(t, T - t) / 2`; anything less is reported as an error.
pub fn pack_tpaths(g: &MultiGraph, terminals: &[usize]) -> Result<TPathPacking, Error> {
    let n = g.node_count();
    let is_t = terminal_mask(n, terminals);
    for (v, &t) in is_t.iter().enumerate() {
        if !t && g.degree(v) % 2 == 1 {
            return Err(Error::EvennessViolated(v));
        }
    }
    if is_t.iter().filter(|&&b| b).count() < 2 {
        return Ok(TPathPacking::default());
    }
    let mut edges: BTreeMap<(usize, usize), u64> = g.edges().iter().map(|&(u, v, m)| ((u, v), m)).collect();
    let targets: Vec<(usize, u64)> =
        (0..n).filter(|&t| is_t[t]).map(|t| (t, cut_on(n, &edges, &is_t, t))).collect();
    let bound: u64 = targets.iter().map(|x| x.1).sum::<u64>() / 2;
    let mut bundles: Bundles =
        g.edges().iter().map(|&(u, v, m)| ((u, v), vec![(vec![u, v], m)])).collect();

    let preserved = |edges: &BTreeMap<(usize, usize), u64>| {
        targets.iter().all(|&(t, lam)| cut_on(n, edges, &is_t, t) >= lam)
    };
    let split = |edges: &mut BTreeMap<(usize, usize), u64>, u: usize, v: usize, w: usize, c: u64| {
        *edges.get_mut(&key(u, v)).unwrap() -= c;
        *edges.get_mut(&key(v, w)).unwrap() -= c;
        if u != w {
            *edges.entry(key(u, w)).or_insert(0) += c;
        }
        edges.retain(|_, m| *m > 0);
    };

    for v in (0..n).filter(|&v| !is_t[v]) {
        loop {
            let nbrs: Vec<(usize, u64)> = edges
                .iter()
                .filter(|(&(a, b), _)| a == v || b == v)
                .map(|(&(a, b), &m)| (if a == v { b } else { a }, m))
                .collect();
            if nbrs.is_empty() {
                break;
            }
            let mut done = false;
            'pairs: for (i, &(u, mu)) in nbrs.iter().enumerate() {
                for &(w, mw) in &nbrs[i..] {
                    let cmax = if u == w { mu / 2 } else { mu.min(mw) };
                    if cmax == 0 {
                        continue;
                    }
                    let ok = |c: u64| {
                        let mut trial = edges.clone();
                        split(&mut trial, u, v, w, c);
                        preserved(&trial)
                    };
                    let c = if ok(cmax) {
                        cmax
                    } else {
                        let (mut lo, mut hi) = (0u64, cmax); // ok(lo), !ok(hi)
                        while hi - lo > 1 {
                            let mid = lo + (hi - lo) / 2;
                            if ok(mid) {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        lo
                    };
                    if c == 0 {
                        continue;
                    }
                    split(&mut edges, u, v, w, c);
                    let left = take(&mut bundles, u, v, c);
                    let right = take(&mut bundles, v, w, c);
                    if u != w {
                        let merged = zip_trails(left, right);
                        let list = bundles.entry(key(u, w)).or_default();
                        for (mut tr, cnt) in merged {
                            if tr[0] != u.min(w) {
                                tr.reverse();
                            }
                            list.push((tr, cnt));
                        }
                    }
                    done = true;
                    break 'pairs;
                }
            }
            if !done {
                return fallback(g, terminals, bound);
            }
        }
    }

    let mut paths: Vec<PackedPath> = Vec::new();
    for ((u, w), list) in bundles {
        debug_assert!(is_t[u] && is_t[w]);
        for (trail, count) in list {
            let nodes = loop_erase(&trail);
            match paths.iter_mut().find(|p| p.nodes == nodes) {
                Some(p) => p.count += count,
                None => paths.push(PackedPath { nodes, count }),
            }
        }
    }
    let packing = TPathPacking { paths };
    if packing.value() < bound {
        return fallback(g, terminals, bound);
    }
    Ok(packing)
}

fn fallback(g: &MultiGraph, terminals: &[usize], bound: u64) -> Result<TPathPacking, Error> {
    if g.total_copies() <= 20 {
        let p = pack_tpaths_exhaustive(g, terminals);
        if p.value() >= bound {
            return Ok(p);
        }
        return Err(Error::PackingShortfall { achieved: p.value(), bound });
    }
    Err(Error::PackingShortfall { achieved: 0, bound })
}

// Pairs trail pieces u->v with pieces v->w into u->w trails.
fn zip_trails(mut left: Vec<(Vec<usize>, u64)>, mut right: Vec<(Vec<usize>, u64)>) -> Vec<(Vec<usize>, u64)> {
    left.reverse();
    right.reverse();
    let mut out = Vec::new();
    while let (Some(l), Some(r)) = (left.last_mut(), right.last_mut()) {
        let c = l.1.min(r.1);
        let mut tr = l.0.clone();
        tr.extend_from_slice(&r.0[1..]);
        out.push((tr, c));
        l.1 -= c;
        r.1 -= c;
        if l.1 == 0 {
            left.pop();
        }
        if r.1 == 0 {
            right.pop();
        }
    }
    out
}

/// Removes closed sub-walks, leaving a simple path with the same ends.
pub fn loop_erase(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &v in walk {
        if let Some(i) = out.iter().position(|&x| x == v) {
            out.truncate(i + 1);
        } else {
            out.push(v);
        }
    }
    out
}

/// Exhaustive maximum T-path packing. Exponential; meant for at most ~20
/// edge copies.
pub fn pack_tpaths_exhaustive(g: &MultiGraph, terminals: &[usize]) -> TPathPacking {
    let n = g.node_count();
    let is_t = terminal_mask(n, terminals);
    let edges = g.edges();
    let eidx: BTreeMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &(u, v, _))| ((u, v), i)).collect();
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    // All T-paths (start < end), as edge-index lists.
    let mut all: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    fn dfs(
        v: usize,
        path: &mut Vec<usize>,
        adj: &[Vec<usize>],
        is_t: &[bool],
        eidx: &BTreeMap<(usize, usize), usize>,
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) {
        for &w in &adj[v] {
            if path.contains(&w) {
                continue;
            }
            path.push(w);
            if is_t[w] {
                if path[0] < w {
                    let es = path.windows(2).map(|p| eidx[&key(p[0], p[1])]).collect();
                    out.push((path.clone(), es));
                }
            } else {
                dfs(w, path, adj, is_t, eidx, out);
            }
            path.pop();
        }
    }
    for t in (0..n).filter(|&t| is_t[t]) {
        dfs(t, &mut vec![t], &adj, &is_t, &eidx, &mut all);
    }
    let by_edge: Vec<Vec<usize>> =
        (0..edges.len()).map(|e| (0..all.len()).filter(|&p| all[p].1.contains(&e)).collect()).collect();

    struct Search<'a> {
        all: &'a [(Vec<usize>, Vec<usize>)],
        by_edge: &'a [Vec<usize>],
        memo: BTreeMap<Vec<u64>, (u64, Option<usize>, bool)>,
    }
    impl Search<'_> {
        fn best(&mut self, rem: &[u64]) -> u64 {
            if let Some(&(v, _, _)) = self.memo.get(rem) {
                return v;
            }
            let Some(e) = rem.iter().position(|&r| r > 0) else {
                self.memo.insert(rem.to_vec(), (0, None, false));
                return 0;
            };
            let mut next = rem.to_vec();
            next[e] -= 1;
            let mut best = (self.best(&next), None, true);
            for &p in &self.by_edge[e] {
                let es = &self.all[p].1;
                if es.iter().all(|&x| rem[x] > 0) {
                    let mut next = rem.to_vec();
                    es.iter().for_each(|&x| next[x] -= 1);
                    let v = 1 + self.best(&next);
                    if v > best.0 {
                        best = (v, Some(p), false);
                    }
                }
            }
            self.memo.insert(rem.to_vec(), best);
            best.0
        }
    }
    let mut s = Search { all: &all, by_edge: &by_edge, memo: BTreeMap::new() };
    let mut rem: Vec<u64> = edges.iter().map(|e| e.2).collect();
    s.best(&rem);
    let mut paths: Vec<PackedPath> = Vec::new();
    while let Some(&(_, choice, skip)) = s.memo.get(&rem) {
        let Some(e) = rem.iter().position(|&r| r > 0) else { break };
        match (choice, skip) {
            (Some(p), _) => {
                all[p].1.iter().for_each(|&x| rem[x] -= 1);
                match paths.iter_mut().find(|q| q.nodes == all[p].0) {
                    Some(q) => q.count += 1,
                    None => paths.push(PackedPath { nodes: all[p].0.clone(), count: 1 }),
                }
            }
            _ => rem[e] -= 1,
        }
    }
    TPathPacking { paths }
}

/// Keeps a functional digraph's arcs except one per directed cycle (the arc
/// leaving the cycle's smallest node), leaving in-arborescences.
pub fn break_cycles_to_in_forest(succ: &[Option<usize>]) -> Vec<Option<usize>> {
    let n = succ.len();
    let mut out = succ.to_vec();
    // 0 = unvisited, 1 = on current walk, 2 = finished
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            match succ[v] {
                Some(w) => v = w,
                None => break,
            }
        }
        if state[v] == 1 && succ[v].is_some() && walk.contains(&v) {
            let i = walk.iter().position(|&x| x == v).unwrap();
            let min = *walk[i..].iter().min().unwrap();
            out[min] = None;
        }
        walk.iter().for_each(|&x| state[x] = 2);
    }
    out
}

/// Keeps the arcs of one level parity (distance to root) of an in-forest,
/// whichever class is larger, even on ties. Kept arcs form disjoint in-stars.
pub fn extract_stars(forest: &[Option<usize>]) -> Vec<Option<usize>> {
    let n = forest.len();
    let mut depth = vec![usize::MAX; n];
    for start in 0..n {
        let mut chain = Vec::new();
        let mut v = start;
        while depth[v] == usize::MAX {
            chain.push(v);
            match forest[v] {
                Some(w) => v = w,
                None => {
                    depth[v] = 0;
                    chain.pop();
                    break;
                }
            }
        }
        while let Some(x) = chain.pop() {
            depth[x] = depth[forest[x].unwrap()] + 1;
        }
    }
    let even = (0..n).filter(|&v| forest[v].is_some() && depth[v] % 2 == 0).count();
    let odd = (0..n).filter(|&v| forest[v].is_some() && depth[v] % 2 == 1).count();
    let keep = if even >= odd { 0 } else { 1 };
    (0..n).map(|v| forest[v].filter(|_| depth[v] % 2 == keep)).collect()
}
