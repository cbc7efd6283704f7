//! Balanced separators made of at most three shortest paths from one root.
//!
//! Candidates come from a fan triangulation of a planar embedding: for a BFS
//! tree rooted at `r`, the root paths to the corners of a vertex, an edge or
//! a triangle. Every root and every candidate is tried; the smallest
//! balanced separator wins (ties by root id, then candidate order). Small
//! components fall back to exhaustive search if needed.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::embedding::planar_embedding;
use crate::graph::{Graph, NodeWeights, UNREACHABLE};
use crate::Error;

const EXHAUSTIVE_LIMIT: usize = 16;

/// Root and up to three shortest paths starting at it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSeparator {
    pub root: usize,
    pub paths: Vec<Vec<usize>>,
}

impl PathSeparator {
    /// Sorted union of the path nodes.
    pub fn nodes(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.paths.iter().flatten().copied().chain([self.root]).collect();
        set.into_iter().collect()
    }
}

fn balanced(g: &Graph, w: &[u64], removed: &[bool], total: u64) -> bool {
    let mask: Vec<bool> = removed.iter().map(|&r| !r).collect();
    g.components_of(&mask).iter().all(|c| 2 * c.iter().map(|&v| w[v]).sum::<u64>() <= total)
}

fn root_path(parent: &[Option<usize>], v: usize) -> Vec<usize> {
    let mut p = vec![v];
    let mut c = v;
    while let Some(x) = parent[c] {
        p.push(x);
        c = x;
    }
    p.reverse();
    p
}

// Drops paths contained in another path (same root, so prefixes).
fn minimal_paths(mut paths: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    paths.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for p in paths {
        if !out.iter().any(|q| q.starts_with(&p)) {
            out.push(p);
        }
    }
    out
}

/// Candidate corner sets: vertices, edges (real and triangulation), and
/// triangles of the fan triangulation.
fn corner_sets(g: &Graph) -> Result<Vec<Vec<usize>>, Error> {
    let emb = planar_embedding(g)?;
    let mut out: Vec<Vec<usize>> = (0..g.node_count()).map(|v| vec![v]).collect();
    let mut pairs: BTreeSet<(usize, usize)> = g.edges().iter().copied().collect();
    let mut triangles: Vec<Vec<usize>> = Vec::new();
    for f in emb.faces() {
        let k = f.len();
        for i in 2..k.saturating_sub(1) {
            if f[0] != f[i] {
                pairs.insert((f[0].min(f[i]), f[0].max(f[i])));
            }
        }
        for i in 1..k.saturating_sub(1) {
            let mut t = vec![f[0], f[i], f[i + 1]];
            t.sort_unstable();
            t.dedup();
            triangles.push(t);
        }
    }
    out.extend(pairs.into_iter().map(|(u, v)| vec![u, v]));
    let mut seen = BTreeSet::new();
    out.extend(triangles.into_iter().filter(|t| seen.insert(t.clone())));
    Ok(out)
}

/// Finds a balanced separator of the connected component `component`: every
/// component left after removing the path nodes has at most half of the
/// component's weight.
pub fn find_3path_separator(g: &Graph, w: &NodeWeights, component: &[usize]) -> Result<PathSeparator, Error> {
    let mut nodes = component.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.is_empty() {
        return Err(Error::BadParams("empty component"));
    }
    let (h, map) = g.induced(&nodes);
    if h.connected_components(&[]).len() != 1 {
        return Err(Error::Disconnected);
    }
    let lw: Vec<u64> = map.iter().map(|&v| w.get(v)).collect();
    let total: u64 = lw.iter().sum();
    let to_global = |sep: (usize, Vec<Vec<usize>>)| PathSeparator {
        root: map[sep.0],
        paths: sep.1.into_iter().map(|p| p.into_iter().map(|v| map[v]).collect()).collect(),
    };
    if total == 0 {
        return Ok(to_global((0, vec![vec![0]])));
    }
    let cands = corner_sets(&h)?;
    let n = h.node_count();
    let mut best: Option<(usize, usize, Vec<Vec<usize>>)> = None;
    'roots: for r in 0..n {
        let (_, parent) = h.bfs_parents(r, None);
        for c in &cands {
            let paths: Vec<Vec<usize>> = c.iter().map(|&v| root_path(&parent, v)).collect();
            let mut removed = vec![false; n];
            paths.iter().flatten().for_each(|&v| removed[v] = true);
            let size = removed.iter().filter(|&&b| b).count();
            if best.as_ref().is_some_and(|b| size >= b.0) {
                continue;
            }
            if balanced(&h, &lw, &removed, total) {
                best = Some((size, r, minimal_paths(paths)));
                if size == 1 {
                    break 'roots;
                }
            }
        }
    }
    if let Some((_, r, paths)) = best {
        return Ok(to_global((r, paths)));
    }
    if n <= EXHAUSTIVE_LIMIT {
        if let Some(sep) = exhaustive(&h, &lw, total) {
            return Ok(to_global(sep));
        }
    }
    Err(Error::SeparatorNotFound)
}

// All shortest paths from r, then every choice of at most three.
fn exhaustive(h: &Graph, w: &[u64], total: u64) -> Option<(usize, Vec<Vec<usize>>)> {
    let n = h.node_count();
    let mut best: Option<(usize, usize, Vec<Vec<usize>>)> = None;
    for r in 0..n {
        let dist = h.bfs_distances(r, None);
        let mut all: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![vec![r]];
        while let Some(p) = stack.pop() {
            let last = *p.last().unwrap();
            for &x in h.neighbors(last) {
                if dist[x] == dist[last] + 1 {
                    let mut q = p.clone();
                    q.push(x);
                    stack.push(q);
                }
            }
            all.push(p);
        }
        let k = all.len();
        for a in 0..k {
            for b in a..k {
                for c in b..k {
                    let mut removed = vec![false; n];
                    for &v in all[a].iter().chain(&all[b]).chain(&all[c]) {
                        removed[v] = true;
                    }
                    let size = removed.iter().filter(|&&x| x).count();
                    if best.as_ref().is_some_and(|bst| size >= bst.0) {
                        continue;
                    }
                    if balanced(h, w, &removed, total) {
                        let paths = minimal_paths(vec![all[a].clone(), all[b].clone(), all[c].clone()]);
                        best = Some((size, r, paths));
                    }
                }
            }
        }
    }
    best.map(|b| (b.1, b.2))
}

/// Re-checks a separator: at most three nonempty paths from the root, each
/// a shortest path inside the component, and the weight balance.
pub fn verify_separator(g: &Graph, w: &NodeWeights, component: &[usize], sep: &PathSeparator) -> bool {
    let mut mask = vec![false; g.node_count()];
    component.iter().for_each(|&v| mask[v] = true);
    if !mask.get(sep.root).copied().unwrap_or(false) || sep.paths.is_empty() || sep.paths.len() > 3 {
        return false;
    }
    let dist = g.bfs_distances(sep.root, Some(&mask));
    for p in &sep.paths {
        if p.first() != Some(&sep.root) || !g.is_simple_path(p) {
            return false;
        }
        if p.iter().enumerate().any(|(i, &v)| !mask[v] || dist[v] == UNREACHABLE || dist[v] != i) {
            return false;
        }
    }
    let total = w.total(component);
    let mut rest = mask.clone();
    sep.nodes().iter().for_each(|&v| rest[v] = false);
    g.components_of(&rest).iter().all(|c| 2 * w.total(c) <= total)
}
