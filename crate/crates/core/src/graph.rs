//! Undirected graphs, demand sets and the traversal helpers shared by every
//! scheduler in the crate.
//!
//! Node ids are dense integers `0..n`. Every tie-break in this module goes to
//! the smallest id so that results are reproducible.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::Error;

/// Hop distance marker for unreachable nodes.
pub const UNREACHABLE: usize = usize::MAX;

/// A simple undirected graph on nodes `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, normalising every edge to `(min, max)`.
    ///
    /// Self-loops, duplicate edges and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph must have at least one node"));
        }
        let mut list: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph("edge endpoint out of range"));
            }
            if u == v {
                return Err(Error::InvalidGraph("self-loop"));
            }
            list.push(if u < v { (u, v) } else { (v, u) });
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("parallel edge"));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Index of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok()
    }

    /// BFS hop distances from `src`, restricted to nodes with `allowed[v]`
    /// when a mask is given. Unreached nodes get [`UNREACHABLE`].
    pub fn bfs_distances(&self, src: usize, allowed: Option<&[bool]>) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.n];
        if allowed.is_some_and(|m| !m[src]) {
            return dist;
        }
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == UNREACHABLE && allowed.is_none_or(|m| m[w]) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS tree parents from `root` (parent of a node is its smallest-id
    /// neighbour one level closer). `None` for the root and unreached nodes.
    pub fn bfs_parents(&self, root: usize, allowed: Option<&[bool]>) -> (Vec<usize>, Vec<Option<usize>>) {
        let dist = self.bfs_distances(root, allowed);
        let parent = (0..self.n)
            .map(|v| {
                if v == root || dist[v] == UNREACHABLE {
                    return None;
                }
                self.adj[v].iter().copied().find(|&w| dist[w] != UNREACHABLE && dist[w] + 1 == dist[v])
            })
            .collect();
        (dist, parent)
    }

    /// Minimum-hop path from `u` to `v`, choosing the smallest-id successor
    /// at every step. `None` when the endpoints are disconnected.
    pub fn shortest_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        self.shortest_path_within(u, v, None)
    }

    /// [`Graph::shortest_path`] inside the subgraph induced by `allowed`.
    pub fn shortest_path_within(&self, u: usize, v: usize, allowed: Option<&[bool]>) -> Option<Vec<usize>> {
        let dist = self.bfs_distances(v, allowed);
        if dist[u] == UNREACHABLE {
            return None;
        }
        let mut path = vec![u];
        let mut cur = u;
        while cur != v {
            cur = self.adj[cur].iter().copied().find(|&w| dist[w] != UNREACHABLE && dist[w] + 1 == dist[cur])?;
            path.push(cur);
        }
        Some(path)
    }

    /// Connected components of the graph with `removed` deleted, each sorted,
    /// listed by their minimum node id.
    pub fn connected_components(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let mut mask = vec![true; self.n];
        for &r in removed {
            mask[r] = false;
        }
        self.components_of(&mask)
    }

    /// Components of the subgraph induced by `mask`.
    pub fn components_of(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if !mask[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components(&[]).len() == 1
    }

    /// Exact hop eccentricities and the diameter.
    pub fn eccentricity_and_diameter(&self) -> Result<(Vec<usize>, usize), Error> {
        let mut ecc = Vec::with_capacity(self.n);
        for v in 0..self.n {
            let d = self.bfs_distances(v, None);
            let e = d.iter().copied().max().unwrap_or(0);
            if e == UNREACHABLE {
                return Err(Error::Disconnected);
            }
            ecc.push(e);
        }
        let diameter = ecc.iter().copied().max().unwrap_or(0);
        Ok((ecc, diameter))
    }

    /// Subgraph induced by `nodes` (any order, no duplicates), relabelled to
    /// `0..nodes.len()` in the given order. Returns the subgraph and the
    /// local-to-global map.
    pub fn induced(&self, nodes: &[usize]) -> (Graph, Vec<usize>) {
        let mut local = vec![UNREACHABLE; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| local[u] != UNREACHABLE && local[v] != UNREACHABLE)
            .map(|&(u, v)| (local[u], local[v]));
        let g = Graph::new(nodes.len().max(1), edges).expect("induced subgraph of a simple graph is simple");
        (g, nodes.to_vec())
    }

    /// `true` when consecutive nodes of `path` are adjacent and no node repeats.
    pub fn is_simple_path(&self, path: &[usize]) -> bool {
        if path.is_empty() || path.iter().any(|&v| v >= self.n) {
            return false;
        }
        let mut seen = vec![false; self.n];
        for &v in path {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        path.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}

/// An undirected multigraph; parallel copies are stored as a multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    // (u, v, multiplicity) with u < v, sorted, multiplicity > 0
    edges: Vec<(usize, usize, u64)>,
}

impl MultiGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self, Error> {
        let mut acc: alloc::collections::BTreeMap<(usize, usize), u64> = Default::default();
        for (u, v, m) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph("edge endpoint out of range"));
            }
            if u == v {
                return Err(Error::InvalidGraph("self-loop"));
            }
            if m == 0 {
                continue;
            }
            *acc.entry(if u < v { (u, v) } else { (v, u) }).or_default() += m;
        }
        Ok(MultiGraph { n, edges: acc.into_iter().map(|((u, v), m)| (u, v, m)).collect() })
    }

    pub fn from_graph(g: &Graph) -> Self {
        MultiGraph { n: g.node_count(), edges: g.edges().iter().map(|&(u, v)| (u, v, 1)).collect() }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `(u, v, multiplicity)` with `u < v`.
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    /// Total number of edge copies.
    pub fn total_copies(&self) -> u64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .map_or(0, |i| self.edges[i].2)
    }

    /// Degree counting multiplicity.
    pub fn degree(&self, v: usize) -> u64 {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).map(|e| e.2).sum()
    }

    /// Every copy doubled.
    pub fn doubled(&self) -> Self {
        MultiGraph { n: self.n, edges: self.edges.iter().map(|&(u, v, m)| (u, v, 2 * m)).collect() }
    }
}

/// Source/sink demand pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandSet {
    pairs: Vec<(usize, usize)>,
}

impl DemandSet {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        for &(s, t) in &pairs {
            if s >= n || t >= n {
                return Err(Error::InvalidDemand("endpoint out of range"));
            }
            if s == t {
                return Err(Error::InvalidDemand("source equals sink"));
            }
        }
        Ok(DemandSet { pairs })
    }

    /// All ordered pairs `(s, t)`, `s != t`.
    pub fn gossip(n: usize) -> Self {
        let pairs = (0..n).flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t))).collect();
        DemandSet { pairs }
    }

    /// `(root, t)` for every terminal.
    pub fn rooted(n: usize, root: usize, terminals: &[usize]) -> Result<Self, Error> {
        Self::new(n, terminals.iter().map(|&t| (root, t)))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs with duplicates removed, first occurrence order kept.
    pub fn distinct_pairs(&self) -> Vec<(usize, usize)> {
        let mut seen = alloc::collections::BTreeSet::new();
        self.pairs.iter().copied().filter(|p| seen.insert(*p)).collect()
    }

    /// Number of distinct pairs each node belongs to.
    pub fn node_weights(&self, n: usize) -> NodeWeights {
        let mut w = vec![0u64; n];
        for (s, t) in self.distinct_pairs() {
            w[s] += 1;
            w[t] += 1;
        }
        NodeWeights(w)
    }
}

/// Nonnegative integer weight per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeWeights(pub Vec<u64>);

impl NodeWeights {
    pub fn unit(n: usize) -> Self {
        NodeWeights(vec![1; n])
    }

    pub fn get(&self, v: usize) -> u64 {
        self.0[v]
    }

    pub fn total(&self, nodes: &[usize]) -> u64 {
        nodes.iter().map(|&v| self.0[v]).sum()
    }
}

#[cfg(test)]
pub(crate) use tests::grid as test_grid;
