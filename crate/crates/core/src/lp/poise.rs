//! The poise LP in edge-flow form and its path decomposition.
//!
//! Variables: `x(e) in [0, 1]` per edge, one unit flow `f_i` per demand pair
//! on the two arcs of every edge, and the scalars `L1`, `L2`.
//! Constraints: node degree `sum x(e) <= L1`, flow conservation, joint arc
//! capacity `f_i(uv) + f_i(vu) <= x(e)`, and total flow mass `<= L2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{simplex, LinearProgram, Sense};
use crate::graph::{DemandSet, Graph, UNREACHABLE};
use crate::Error;

const FLOW_EPS: f64 = 1e-12;
const RESIDUE_TOL: f64 = 1e-9;

/// The poise LP for a graph and a list of distinct demand pairs.
#[derive(Clone, Debug)]
pub struct PoiseLp {
    pub graph: Graph,
    pub pairs: Vec<(usize, usize)>,
    pub program: LinearProgram,
}

impl PoiseLp {
    pub fn x_var(&self, e: usize) -> usize {
        e
    }

    /// Arc `2e` runs `u -> v` for edge `(u, v)`, arc `2e + 1` runs back.
    pub fn f_var(&self, pair: usize, arc: usize) -> usize {
        let m = self.graph.edge_count();
        m + pair * 2 * m + arc
    }

    pub fn l1_var(&self) -> usize {
        let m = self.graph.edge_count();
        m + 2 * m * self.pairs.len()
    }

    pub fn l2_var(&self) -> usize {
        self.l1_var() + 1
    }
}

/// A path with its fractional weight `y(P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPath {
    pub nodes: Vec<usize>,
    pub weight: f64,
}

impl WeightedPath {
    pub fn hops(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// A fractional poise solution together with its path decomposition.
///
/// `x`, `l1` and `l2` are the smallest values consistent with the paths, so
/// they never exceed the LP values they were derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct PoiseFractional {
    pub value: f64,
    pub l1: f64,
    pub l2: f64,
    pub x: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub paths: Vec<Vec<WeightedPath>>,
}

impl PoiseFractional {
    /// Derives `x`, `L1`, `L2` from per-pair weighted paths.
    pub fn from_paths(g: &Graph, pairs: Vec<(usize, usize)>, paths: Vec<Vec<WeightedPath>>) -> Self {
        let mut x = vec![0.0f64; g.edge_count()];
        let mut l2 = 0.0f64;
        for list in &paths {
            let mut usage = BTreeMap::new();
            let mut len = 0.0;
            for p in list {
                len += p.weight * p.hops() as f64;
                for w in p.nodes.windows(2) {
                    let e = g.edge_index(w[0], w[1]).expect("path uses a non-edge");
                    *usage.entry(e).or_insert(0.0) += p.weight;
                }
            }
            l2 = l2.max(len);
            for (e, u) in usage {
                x[e] = f64::max(x[e], f64::min(u, 1.0));
            }
        }
        let mut deg = vec![0.0f64; g.node_count()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            deg[u] += x[e];
            deg[v] += x[e];
        }
        let l1 = deg.iter().copied().fold(0.0, f64::max);
        PoiseFractional { value: l1 + l2, l1, l2, x, pairs, paths }
    }

    /// Paths of the pair with index `i`.
    pub fn paths_of(&self, i: usize) -> &[WeightedPath] {
        &self.paths[i]
    }

    /// Checks the invariants of a decomposed solution.
    pub fn verify(&self, g: &Graph) -> Result<(), &'static str> {
        let mut deg = vec![0.0f64; g.node_count()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if !(-RESIDUE_TOL..=1.0 + RESIDUE_TOL).contains(&self.x[e]) {
                return Err("x out of range");
            }
            deg[u] += self.x[e];
            deg[v] += self.x[e];
        }
        if deg.iter().any(|&d| d > self.l1 + 1e-7) {
            return Err("degree above L1");
        }
        for (i, &(s, t)) in self.pairs.iter().enumerate() {
            let list = &self.paths[i];
            let total: f64 = list.iter().map(|p| p.weight).sum();
            if (total - 1.0).abs() > RESIDUE_TOL {
                return Err("weights do not sum to 1");
            }
            let len: f64 = list.iter().map(|p| p.weight * p.hops() as f64).sum();
            if len > self.l2 + RESIDUE_TOL {
                return Err("length above L2");
            }
            let mut usage = BTreeMap::new();
            for p in list {
                if p.weight <= 0.0 || p.nodes.first() != Some(&s) || p.nodes.last() != Some(&t) {
                    return Err("bad path endpoints or weight");
                }
                if !g.is_simple_path(&p.nodes) {
                    return Err("path is not simple");
                }
                for w in p.nodes.windows(2) {
                    *usage.entry(g.edge_index(w[0], w[1]).unwrap()).or_insert(0.0) += p.weight;
                }
            }
            if usage.iter().any(|(&e, &u)| u > self.x[e] + RESIDUE_TOL) {
                return Err("edge usage above x");
            }
        }
        Ok(())
    }
}

/// Builds the LP. Duplicate pairs are merged.
pub fn build_poise_lp(g: &Graph, demands: &DemandSet) -> Result<PoiseLp, Error> {
    let pairs = demands.distinct_pairs();
    for &(s, t) in &pairs {
        if s >= g.node_count() || t >= g.node_count() {
            return Err(Error::InvalidDemand("endpoint out of range"));
        }
        if g.bfs_distances(s, None)[t] == UNREACHABLE {
            return Err(Error::InfeasiblePair(s, t));
        }
    }
    let mut lp = LinearProgram::new();
    let edges = g.edges();
    for &(u, v) in edges {
        lp.add_var(&format!("x_e_{u}_{v}"), Some(1.0));
    }
    for i in 0..pairs.len() {
        for &(u, v) in edges {
            lp.add_var(&format!("f_{i}_{u}_{v}"), None);
            lp.add_var(&format!("f_{i}_{v}_{u}"), None);
        }
    }
    let l1 = lp.add_var("L1", None);
    let l2 = lp.add_var("L2", None);
    lp.set_objective(vec![(l1, 1.0), (l2, 1.0)]);
    let m = edges.len();
    let f = |i: usize, a: usize| m + i * 2 * m + a;

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.node_count()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        incident[u].push(e);
        incident[v].push(e);
    }
    for (v, inc) in incident.iter().enumerate() {
        if inc.is_empty() {
            continue;
        }
        let mut c: Vec<(usize, f64)> = inc.iter().map(|&e| (e, 1.0)).collect();
        c.push((l1, -1.0));
        lp.add_row(&format!("deg_{v}"), c, Sense::Le, 0.0);
    }
    for (i, &(s, t)) in pairs.iter().enumerate() {
        // The sink row is implied by the others.
        for (v, inc) in incident.iter().enumerate() {
            if v == t || inc.is_empty() {
                continue;
            }
            let mut c = Vec::new();
            for &e in inc {
                let (out, inn) = if edges[e].0 == v { (2 * e, 2 * e + 1) } else { (2 * e + 1, 2 * e) };
                c.push((f(i, out), 1.0));
                c.push((f(i, inn), -1.0));
            }
            c.sort_unstable_by_key(|x| x.0);
            lp.add_row(&format!("flow_{i}_{v}"), c, Sense::Eq, if v == s { 1.0 } else { 0.0 });
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            lp.add_row(
                &format!("cap_{i}_{u}_{v}"),
                vec![(e, -1.0), (f(i, 2 * e), 1.0), (f(i, 2 * e + 1), 1.0)],
                Sense::Le,
                0.0,
            );
        }
        let mut c: Vec<(usize, f64)> = (0..2 * m).map(|a| (f(i, a), 1.0)).collect();
        c.push((l2, -1.0));
        lp.add_row(&format!("len_{i}"), c, Sense::Le, 0.0);
    }
    Ok(PoiseLp { graph: g.clone(), pairs, program: lp })
}

/// Raw LP optimum: objective and per-pair arc flows.
#[derive(Clone, Debug)]
pub struct PoiseLpSolution {
    pub objective: f64,
    pub l1: f64,
    pub l2: f64,
    pub x: Vec<f64>,
    pub flows: Vec<Vec<f64>>,
}

/// Solves the LP and decomposes the flows into weighted paths.
pub fn solve_lp(lp: &PoiseLp) -> Result<PoiseFractional, Error> {
    let raw = solve_raw(lp)?;
    let paths = decompose_flows(&lp.graph, &lp.pairs, &raw.flows)?;
    Ok(PoiseFractional::from_paths(&lp.graph, lp.pairs.clone(), paths))
}

/// Solves the LP without decomposing.
pub fn solve_raw(lp: &PoiseLp) -> Result<PoiseLpSolution, Error> {
    let sol = simplex::solve(&lp.program)?;
    let m = lp.graph.edge_count();
    let flows =
        (0..lp.pairs.len()).map(|i| (0..2 * m).map(|a| sol.values[lp.f_var(i, a)]).collect()).collect();
    Ok(PoiseLpSolution {
        objective: sol.objective,
        l1: sol.values[lp.l1_var()],
        l2: sol.values[lp.l2_var()],
        x: sol.values[..m].to_vec(),
        flows,
    })
}

/// Convenience: build and solve in one call.
pub fn solve_poise(g: &Graph, demands: &DemandSet) -> Result<PoiseFractional, Error> {
    solve_lp(&build_poise_lp(g, demands)?)
}

/// Decomposes each pair's unit arc flow into simple weighted paths.
///
/// Walks always take the smallest-id successor carrying flow. Cycles met on
/// the way are cancelled and dropped. Weights are renormalised to sum to 1.
pub fn decompose_flows(g: &Graph, pairs: &[(usize, usize)], flows: &[Vec<f64>]) -> Result<Vec<Vec<WeightedPath>>, Error> {
    let n = g.node_count();
    let edges = g.edges();
    let mut out = Vec::with_capacity(pairs.len());
    for (i, &(s, t)) in pairs.iter().enumerate() {
        // Net flow per edge (opposite arcs cancel), as an out-arc map.
        let mut succ: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            let net = flows[i][2 * e] - flows[i][2 * e + 1];
            if net > FLOW_EPS {
                succ[u].insert(v, net);
            } else if net < -FLOW_EPS {
                succ[v].insert(u, -net);
            }
        }
        let mut found: Vec<WeightedPath> = Vec::new();
        loop {
            if succ[s].values().sum::<f64>() <= FLOW_EPS {
                break;
            }
            // Walk from s until t, a dead end, or a revisit.
            let mut walk = vec![s];
            let mut pos = vec![usize::MAX; n];
            pos[s] = 0;
            let mut v = s;
            let mut dead_end = false;
            while v != t {
                let Some((&w, _)) = succ[v].iter().next() else {
                    dead_end = true;
                    break;
                };
                if pos[w] != usize::MAX {
                    // Cancel the cycle walk[pos[w]..] -> w.
                    let cyc: Vec<usize> = walk[pos[w]..].iter().copied().chain([w]).collect();
                    let amt = bottleneck(&succ, &cyc);
                    subtract(&mut succ, &cyc, amt);
                    for &c in &walk[pos[w] + 1..] {
                        pos[c] = usize::MAX;
                    }
                    walk.truncate(pos[w] + 1);
                    v = w;
                    continue;
                }
                pos[w] = walk.len();
                walk.push(w);
                v = w;
            }
            if dead_end {
                // Conservation error: drop the stranded arc mass.
                let amt = bottleneck(&succ, &walk);
                if walk.len() < 2 {
                    break;
                }
                subtract(&mut succ, &walk, amt);
                continue;
            }
            let amt = bottleneck(&succ, &walk);
            subtract(&mut succ, &walk, amt);
            match found.iter_mut().find(|p| p.nodes == walk) {
                Some(p) => p.weight += amt,
                None => found.push(WeightedPath { nodes: walk, weight: amt }),
            }
        }
        let total: f64 = found.iter().map(|p| p.weight).sum();
        // What remains must be a circulation (zero imbalance everywhere).
        let mut imbalance = vec![0.0f64; n];
        for (v, m) in succ.iter().enumerate() {
            for (&w, &amt) in m {
                imbalance[v] += amt;
                imbalance[w] -= amt;
            }
        }
        let residue = imbalance.iter().map(|x| x.abs()).fold((total - 1.0).abs(), f64::max);
        if residue > RESIDUE_TOL {
            return Err(Error::DecompositionResidue(residue));
        }
        found.retain(|p| p.weight > FLOW_EPS);
        let total: f64 = found.iter().map(|p| p.weight).sum();
        found.iter_mut().for_each(|p| p.weight /= total);
        out.push(found);
    }
    Ok(out)
}

fn bottleneck(succ: &[BTreeMap<usize, f64>], walk: &[usize]) -> f64 {
    walk.windows(2).map(|w| succ[w[0]][&w[1]]).fold(f64::INFINITY, f64::min)
}

fn subtract(succ: &mut [BTreeMap<usize, f64>], walk: &[usize], amt: f64) {
    for w in walk.windows(2) {
        let val = succ[w[0]].get_mut(&w[1]).unwrap();
        *val -= amt;
        if *val <= FLOW_EPS {
            succ[w[0]].remove(&w[1]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_grid;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-7
    }

    #[test]
    fn single_edge_value_two() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let d = DemandSet::new(2, [(0, 1)]).unwrap();
        let sol = solve_poise(&g, &d).unwrap();
        assert!(close(sol.value, 2.0) && close(sol.l1, 1.0) && close(sol.l2, 1.0));
        assert_eq!(sol.paths[0], vec![WeightedPath { nodes: vec![0, 1], weight: 1.0 }]);
    }

    #[test]
    fn path_value_four() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let d = DemandSet::new(3, [(0, 2)]).unwrap();
        let sol = solve_poise(&g, &d).unwrap();
        assert!(close(sol.value, 4.0) && close(sol.l1, 2.0) && close(sol.l2, 2.0));
    }

    #[test]
    fn star_rooted_at_center() {
        let g = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let d = DemandSet::rooted(4, 0, &[1, 2, 3]).unwrap();
        let sol = solve_poise(&g, &d).unwrap();
        assert!(close(sol.l1, 3.0) && close(sol.l2, 1.0) && close(sol.value, 4.0));
        sol.verify(&g).unwrap();
    }

    #[test]
    fn four_cycle_crossing_pairs_below_integral() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let d = DemandSet::new(4, [(0, 2), (1, 3)]).unwrap();
        let sol = solve_poise(&g, &d).unwrap();
        sol.verify(&g).unwrap();
        // Any feasible subgraph has distance >= 2 and degree >= 1 somewhere.
        assert!(sol.value <= 4.0 + 1e-7);
        assert!(sol.value >= 3.0 - 1e-7);
    }

    #[test]
    fn split_flow_decomposes_into_two_halves() {
        let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        // arcs: e0 (0,1), e1 (0,3), e2 (1,2), e3 (2,3)
        let mut f = vec![0.0; 8];
        f[0] = 0.5; // 0->1
        f[2] = 0.5; // 0->3
        f[4] = 0.5; // 1->2
        f[7] = 0.5; // 3->2
        let paths = decompose_flows(&g, &[(0, 2)], &[f]).unwrap();
        assert_eq!(
            paths[0],
            vec![
                WeightedPath { nodes: vec![0, 1, 2], weight: 0.5 },
                WeightedPath { nodes: vec![0, 3, 2], weight: 0.5 }
            ]
        );
    }

    #[test]
    fn cycles_are_discarded() {
        let g = Graph::new(5, [(0, 1), (1, 2), (1, 3), (1, 4), (2, 3)]).unwrap();
        // 0->1->4 plus a circulation 1->2->3->1 met on the walk
        let mut f = vec![0.0; 10];
        f[0] = 1.0; // 0->1
        f[6] = 1.0; // 1->4
        f[2] = 0.5; // 1->2
        f[8] = 0.5; // 2->3
        f[5] = 0.5; // 3->1
        let paths = decompose_flows(&g, &[(0, 4)], &[f]).unwrap();
        assert_eq!(paths[0], vec![WeightedPath { nodes: vec![0, 1, 4], weight: 1.0 }]);
    }

    #[test]
    fn broken_conservation_is_residue() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let f = vec![1.0, 0.0, 0.5, 0.0];
        assert!(matches!(decompose_flows(&g, &[(0, 2)], &[f]), Err(Error::DecompositionResidue(_))));
    }

    #[test]
    fn grid_decomposition_invariants() {
        let g = test_grid(2, 3);
        let d = DemandSet::rooted(6, 0, &[2, 3, 5]).unwrap();
        let sol = solve_poise(&g, &d).unwrap();
        sol.verify(&g).unwrap();
    }

    #[test]
    fn disconnected_pair_is_rejected() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        let d = DemandSet::new(3, [(0, 2)]).unwrap();
        assert_eq!(build_poise_lp(&g, &d).err(), Some(Error::InfeasiblePair(0, 2)));
    }

    #[test]
    fn dump_names_are_stable() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let d = DemandSet::new(2, [(0, 1)]).unwrap();
        let text = build_poise_lp(&g, &d).unwrap().program.to_lp_format();
        assert!(text.contains("x_e_0_1") && text.contains("f_0_0_1") && text.contains("f_0_1_0"));
    }
}
