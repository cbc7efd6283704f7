//! Rounding a fractional poise solution into a low-poise Steiner tree.
//!
//! Clusters start as single terminals. Each iteration scales the LP paths of
//! the current centers onto a multigraph, packs T-paths between centers,
//! samples one packed path per center, and merges clusters along the stars
//! of the resulting functional digraph. Finally the root is attached and a
//! BFS tree of the accumulated subgraph is returned.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, MultiGraph, UNREACHABLE};
use crate::lp::{PoiseFractional, WeightedPath};
use crate::multiflow::{break_cycles_to_in_forest, extract_stars, pack_tpaths};
use crate::Error;

pub const DEFAULT_GRID: u64 = 1024;
const SAMPLE_RETRIES: usize = 64;
const MERGE_RETRIES: usize = 64;

/// A tree with its poise measurements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoiseTree {
    pub root: usize,
    pub edges: Vec<(usize, usize)>,
    pub nodes: Vec<usize>,
    pub max_degree: usize,
    pub diameter: usize,
    /// Largest root-to-node distance.
    pub depth: usize,
}

impl PoiseTree {
    /// Validates that `edges` form a tree containing `root` and measures it.
    pub fn from_edges(n: usize, root: usize, edges: &[(usize, usize)]) -> Result<Self, Error> {
        let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut nodes: BTreeSet<usize> = BTreeSet::from([root]);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v || !set.insert(if u < v { (u, v) } else { (v, u) }) {
                return Err(Error::NotATree);
            }
            nodes.insert(u);
            nodes.insert(v);
        }
        if set.len() + 1 != nodes.len() {
            return Err(Error::NotATree);
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let g = Graph::new(n, edges.iter().copied()).map_err(|_| Error::NotATree)?;
        let dist = g.bfs_distances(root, None);
        if nodes.iter().any(|&v| dist[v] == UNREACHABLE) {
            return Err(Error::NotATree);
        }
        let depth = nodes.iter().map(|&v| dist[v]).max().unwrap_or(0);
        // Tree diameter: farthest node from the farthest node.
        let far = *nodes.iter().max_by_key(|&&v| (dist[v], usize::MAX - v)).unwrap();
        let d2 = g.bfs_distances(far, None);
        let diameter = nodes.iter().map(|&v| d2[v]).max().unwrap_or(0);
        Ok(PoiseTree {
            root,
            max_degree: g.max_degree(),
            nodes: nodes.into_iter().collect(),
            edges,
            diameter,
            depth,
        })
    }

    /// Diameter plus maximum degree.
    pub fn poise(&self) -> usize {
        self.diameter + self.max_degree
    }

    pub fn spans(&self, nodes: &[usize]) -> bool {
        nodes.iter().all(|v| self.nodes.binary_search(v).is_ok())
    }
}

/// Integer multiplicities summing to exactly `grid`, by largest remainder
/// (earlier entries win ties).
pub fn largest_remainder(weights: &[f64], grid: u64) -> Vec<u64> {
    let total: f64 = weights.iter().sum();
    let scaled: Vec<f64> = weights.iter().map(|w| w / total * grid as f64).collect();
    let mut out: Vec<u64> = scaled.iter().map(|&s| libm::floor(s) as u64).collect();
    let assigned: u64 = out.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (scaled[a] - out[a] as f64, scaled[b] - out[b] as f64);
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(grid.saturating_sub(assigned) as usize) {
        out[i] += 1;
    }
    out
}

/// Scales each center's root paths to `grid` copies, takes the per-edge
/// maximum over centers and doubles every multiplicity.
pub fn scale_to_multigraph(
    g: &Graph,
    frac: &PoiseFractional,
    centers: &[usize],
    grid: u64,
) -> Result<MultiGraph, Error> {
    if grid == 0 {
        return Err(Error::GridTooCoarse(grid));
    }
    let mut union: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &t in centers {
        let paths = paths_for(frac, t).ok_or(Error::BadParams("center without a root pair"))?;
        let weights: Vec<f64> = paths.iter().map(|p| p.weight).collect();
        let mult = largest_remainder(&weights, grid);
        let mut usage: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (p, &m) in paths.iter().zip(&mult) {
            for w in p.nodes.windows(2) {
                *usage.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0) += m;
            }
        }
        for (e, c) in usage {
            let slot = union.entry(e).or_insert(0);
            *slot = (*slot).max(c);
        }
    }
    Ok(MultiGraph::new(g.node_count(), union.into_iter().map(|((u, v), m)| (u, v, m)))?.doubled())
}

fn paths_for(frac: &PoiseFractional, t: usize) -> Option<&[WeightedPath]> {
    let i = frac.pairs.iter().position(|&(_, b)| b == t)?;
    Some(&frac.paths[i])
}

/// One terminal's candidates: a path (or `None` if pruned) and its count.
pub type Candidates = Vec<(Option<Vec<usize>>, u64)>;

/// Result of [`congestion_round_paths`].
#[derive(Clone, Debug, PartialEq)]
pub struct PathSelection {
    pub chosen: Vec<Option<Vec<usize>>>,
    /// Maximum node degree in the union of the chosen paths.
    pub congestion: usize,
    /// `true` if no sample met the `4L` congestion target.
    pub over_budget: bool,
}

/// Samples one candidate per terminal with probability proportional to its
/// count. Resamples until the node congestion is at most `4L`, keeping the
/// best of at most 64 samples.
pub fn congestion_round_paths(cands: &[Candidates], l: f64, rng: &mut ChaCha8Rng) -> PathSelection {
    let mut best: Option<PathSelection> = None;
    for _ in 0..SAMPLE_RETRIES {
        let chosen: Vec<Option<Vec<usize>>> = cands
            .iter()
            .map(|list| {
                let total: u64 = list.iter().map(|c| c.1).sum();
                if total == 0 {
                    return None;
                }
                let mut pick = rng.gen_range(0..total);
                for (p, c) in list {
                    if pick < *c {
                        return p.clone();
                    }
                    pick -= c;
                }
                None
            })
            .collect();
        let congestion = node_congestion(&chosen);
        let over_budget = congestion as f64 > 4.0 * l + 1e-9;
        if best.as_ref().is_none_or(|b| congestion < b.congestion) {
            best = Some(PathSelection { chosen, congestion, over_budget });
        }
        if !over_budget {
            break;
        }
    }
    best.unwrap_or(PathSelection { chosen: Vec::new(), congestion: 0, over_budget: false })
}

fn node_congestion(paths: &[Option<Vec<usize>>]) -> usize {
    let mut edges = BTreeSet::new();
    for p in paths.iter().flatten() {
        for w in p.windows(2) {
            edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for (u, v) in edges {
        *deg.entry(u).or_insert(0) += 1;
        *deg.entry(v).or_insert(0) += 1;
    }
    deg.values().copied().max().unwrap_or(0)
}

/// One star arc of a merge: the leaf center, the star's center and the path
/// joining them (from leaf to head).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeArc {
    pub leaf: usize,
    pub head: usize,
    pub path: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeOutcome {
    pub arcs: Vec<MergeArc>,
    pub attempts: usize,
    pub congestion: usize,
    pub over_budget: bool,
    /// Packed path copies dropped for being longer than `4L`.
    pub discarded: u64,
    /// Edge copies in the doubled multigraph.
    pub copies: u64,
}

/// Finds star-shaped paths of length at most `4L` between distinct centers.
pub fn merge_centers(
    g: &Graph,
    frac: &PoiseFractional,
    centers: &[usize],
    l: f64,
    grid: u64,
    rng: &mut ChaCha8Rng,
) -> Result<MergeOutcome, Error> {
    let mg = scale_to_multigraph(g, frac, centers, grid)?;
    let packing = pack_tpaths(&mg, centers)?;
    debug_assert!(packing.verify(&mg, centers).is_ok());
    let limit = 4.0 * l + 1e-9;
    let mut discarded = 0;
    let mut cands: Vec<Candidates> = vec![Vec::new(); centers.len()];
    for (i, &t) in centers.iter().enumerate() {
        let ends = packing.endpoint_count(t);
        if ends < grid {
            return Err(Error::PackingShortfall { achieved: ends, bound: grid });
        }
        for p in &packing.paths {
            let (a, b) = (p.nodes[0], *p.nodes.last().unwrap());
            if a != t && b != t {
                continue;
            }
            if (p.nodes.len() - 1) as f64 > limit {
                cands[i].push((None, p.count));
                continue;
            }
            let oriented = if a == t { p.nodes.clone() } else { p.nodes.iter().rev().copied().collect() };
            cands[i].push((Some(oriented), p.count));
        }
    }
    for p in &packing.paths {
        if (p.nodes.len() - 1) as f64 > limit {
            discarded += p.count;
        }
    }

    let index: BTreeMap<usize, usize> = centers.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let target = centers.len().div_ceil(4);
    let mut best: Option<MergeOutcome> = None;
    for attempt in 1..=MERGE_RETRIES {
        let sel = congestion_round_paths(&cands, l, rng);
        let succ: Vec<Option<usize>> =
            sel.chosen.iter().map(|p| p.as_ref().map(|p| index[p.last().unwrap()])).collect();
        let stars = extract_stars(&break_cycles_to_in_forest(&succ));
        let arcs: Vec<MergeArc> = stars
            .iter()
            .enumerate()
            .filter_map(|(i, h)| {
                h.map(|h| MergeArc { leaf: centers[i], head: centers[h], path: sel.chosen[i].clone().unwrap() })
            })
            .collect();
        let better = best.as_ref().is_none_or(|b| arcs.len() > b.arcs.len());
        if better {
            best = Some(MergeOutcome {
                arcs,
                attempts: attempt,
                congestion: sel.congestion,
                over_budget: sel.over_budget,
                discarded,
                copies: mg.total_copies(),
            });
        }
        if best.as_ref().unwrap().arcs.len() >= target {
            break;
        }
    }
    let mut best = best.unwrap();
    best.attempts = best.attempts.max(1);
    if best.arcs.is_empty() || best.arcs.len() * 8 < centers.len() {
        return Err(Error::MergeFailure);
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundingParams {
    pub grid: u64,
    pub seed: u64,
}

impl Default for RoundingParams {
    fn default() -> Self {
        RoundingParams { grid: DEFAULT_GRID, seed: 0 }
    }
}

/// Everything measured while rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundingOutcome {
    pub tree: PoiseTree,
    pub iterations: usize,
    /// Every merge path added, plus the final root path.
    pub merge_paths: Vec<Vec<usize>>,
    pub root_path: Vec<usize>,
    /// Per iteration: largest distance in the subgraph from a cluster node
    /// to its center.
    pub center_distance: Vec<usize>,
    pub discarded: u64,
    pub copies: u64,
    pub congestion_over_budget: bool,
    pub lp_value: f64,
}

/// Rounds the rooted solution `frac` (pairs `(r, t)`, `t` in `terminals`)
/// into a tree spanning `r` and the terminals.
pub fn round_poise_tree(
    g: &Graph,
    r: usize,
    terminals: &[usize],
    frac: &PoiseFractional,
    params: RoundingParams,
) -> Result<RoundingOutcome, Error> {
    let terms: Vec<usize> = terminals.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if terms.is_empty() || terms.contains(&r) {
        return Err(Error::BadParams("terminals must be nonempty and exclude the root"));
    }
    for &t in &terms {
        if !frac.pairs.contains(&(r, t)) {
            return Err(Error::BadParams("fractional solution lacks a root pair"));
        }
    }
    let l = frac.value;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut h_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    // cluster id = its center; value = member nodes
    let mut clusters: BTreeMap<usize, BTreeSet<usize>> = terms.iter().map(|&t| (t, BTreeSet::from([t]))).collect();
    let mut merge_paths = Vec::new();
    let mut center_distance = Vec::new();
    let (mut discarded, mut copies, mut over) = (0, 0, false);
    let mut iterations = 0;
    while clusters.len() > 1 {
        iterations += 1;
        let centers: Vec<usize> = clusters.keys().copied().collect();
        let out = merge_centers(g, frac, &centers, l, params.grid, &mut rng)?;
        discarded += out.discarded;
        copies += out.copies;
        over |= out.over_budget;
        for arc in out.arcs {
            for w in arc.path.windows(2) {
                h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
            let leaf = clusters.remove(&arc.leaf).unwrap();
            let head = clusters.get_mut(&arc.head).unwrap();
            head.extend(leaf);
            head.extend(arc.path.iter().copied());
            merge_paths.push(arc.path);
        }
        let h = Graph::new(g.node_count(), h_edges.iter().copied())?;
        let mut worst = 0;
        for (&c, members) in &clusters {
            let dist = h.bfs_distances(c, None);
            worst = members.iter().map(|&v| dist[v]).fold(worst, usize::max);
        }
        center_distance.push(worst);
    }
    let center = *clusters.keys().next().unwrap();
    let root_path = paths_for(frac, center)
        .unwrap()
        .iter()
        .min_by(|a, b| a.hops().cmp(&b.hops()).then(b.weight.partial_cmp(&a.weight).unwrap()))
        .map(|p| p.nodes.clone())
        .unwrap();
    for w in root_path.windows(2) {
        h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
    }
    let h = Graph::new(g.node_count(), h_edges.iter().copied())?;
    let tree = bfs_tree_to(&h, r, &terms)?;
    Ok(RoundingOutcome {
        tree,
        iterations,
        merge_paths,
        root_path,
        center_distance,
        discarded,
        copies,
        congestion_over_budget: over,
        lp_value: l,
    })
}

/// BFS tree of `h` from `r`, pruned to the branches that reach `terminals`.
pub fn bfs_tree_to(h: &Graph, r: usize, terminals: &[usize]) -> Result<PoiseTree, Error> {
    let (dist, parent) = h.bfs_parents(r, None);
    let mut edges = BTreeSet::new();
    let mut queue: VecDeque<usize> = terminals.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        if dist[v] == UNREACHABLE {
            return Err(Error::NotATree);
        }
        if let Some(p) = parent[v] {
            if edges.insert((p.min(v), p.max(v))) {
                queue.push_back(p);
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    PoiseTree::from_edges(h.node_count(), r, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{test_grid, DemandSet};
    use crate::lp::solve_poise;

    #[test]
    fn largest_remainder_examples() {
        assert_eq!(largest_remainder(&[1.0], 4), vec![4]);
        assert_eq!(largest_remainder(&[0.5, 0.5], 4), vec![2, 2]);
        assert_eq!(largest_remainder(&[0.5, 0.3, 0.2], 10), vec![5, 3, 2]);
        assert_eq!(largest_remainder(&[1.0, 1.0, 1.0], 4), vec![2, 1, 1]);
    }

    #[test]
    fn multigraph_scaling_doubles() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let frac = solve_poise(&g, &DemandSet::rooted(2, 0, &[1]).unwrap()).unwrap();
        let mg = scale_to_multigraph(&g, &frac, &[1], 4).unwrap();
        assert_eq!(mg.edges(), &[(0, 1, 8)]);
        let g4 = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let paths = vec![vec![
            WeightedPath { nodes: vec![0, 1, 2], weight: 0.5 },
            WeightedPath { nodes: vec![0, 3, 2], weight: 0.5 },
        ]];
        let frac = PoiseFractional::from_paths(&g4, vec![(0, 2)], paths);
        let mg = scale_to_multigraph(&g4, &frac, &[2], 4).unwrap();
        assert!(mg.edges().iter().all(|e| e.2 == 4));
    }

    #[test]
    fn single_edge_tree() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let frac = solve_poise(&g, &DemandSet::rooted(2, 0, &[1]).unwrap()).unwrap();
        let out = round_poise_tree(&g, 0, &[1], &frac, RoundingParams::default()).unwrap();
        assert_eq!(out.tree.edges, vec![(0, 1)]);
        assert_eq!(out.tree.poise(), 2);
    }

    #[test]
    fn star_tree_is_the_star() {
        let k = 5;
        let g = Graph::new(k + 1, (1..=k).map(|i| (0, i))).unwrap();
        let leaves: Vec<usize> = (1..=k).collect();
        let frac = solve_poise(&g, &DemandSet::rooted(k + 1, 0, &leaves).unwrap()).unwrap();
        let out = round_poise_tree(&g, 0, &leaves, &frac, RoundingParams::default()).unwrap();
        assert_eq!(out.tree.edges.len(), k);
        assert_eq!((out.tree.max_degree, out.tree.diameter), (k, 2));
        assert_eq!(out.tree.poise(), k + 2);
    }

    #[test]
    fn grid_corners() {
        let g = test_grid(2, 4);
        let terms = [3, 4, 7];
        let frac = solve_poise(&g, &DemandSet::rooted(8, 0, &terms).unwrap()).unwrap();
        for seed in 0..5 {
            let out = round_poise_tree(&g, 0, &terms, &frac, RoundingParams { grid: 1024, seed }).unwrap();
            assert!(out.tree.spans(&[0, 3, 4, 7]));
            assert!(out.merge_paths.iter().all(|p| (p.len() - 1) as f64 <= 4.0 * frac.value + 1e-9));
            for (i, &d) in out.center_distance.iter().enumerate() {
                assert!(d as f64 <= 4.0 * frac.value * (i + 1) as f64 + 1e-9);
            }
        }
    }

    #[test]
    fn merge_two_centers() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let frac = solve_poise(&g, &DemandSet::rooted(3, 1, &[0, 2]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = merge_centers(&g, &frac, &[0, 2], frac.value, 16, &mut rng).unwrap();
        assert_eq!(out.arcs.len(), 1);
        assert_eq!(out.arcs[0].path.len(), 3);
    }

    #[test]
    fn congestion_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let one = vec![vec![(Some(vec![0, 1, 2]), 4)]];
        let s = congestion_round_paths(&one, 1.0, &mut rng);
        assert_eq!(s.chosen, vec![Some(vec![0, 1, 2])]);
        assert_eq!(s.congestion, 2);
        let disjoint = vec![vec![(Some(vec![0, 1, 2]), 2)], vec![(Some(vec![3, 4, 5]), 2)]];
        let s = congestion_round_paths(&disjoint, 1.0, &mut rng);
        assert!(s.chosen.iter().all(Option::is_some));
        // four terminals through one hub (node 0)
        let hub: Vec<Candidates> = (1..=4).map(|t| vec![(Some(vec![t, 0, t % 4 + 1]), 1)]).collect();
        let s = congestion_round_paths(&hub, 2.0, &mut rng);
        assert!(s.congestion <= 8 && !s.over_budget);
    }

    #[test]
    fn tree_measurements() {
        assert_eq!(PoiseTree::from_edges(3, 0, &[(0, 1), (1, 2), (0, 2)]), Err(Error::NotATree));
        let t = PoiseTree::from_edges(5, 2, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!((t.diameter, t.depth, t.max_degree), (4, 2, 2));
    }
}
