//! Radio gossip on planar graphs: gather every message at one root along
//! recursively found separator paths, then broadcast it all back.
//!
//! Levels are processed deepest first. On each level the messages lying on
//! the level's paths are pipelined to landmarks `2L+1` apart, moved from the
//! landmarks along short witness paths to earlier separator paths, and
//! handed over to them in `(level, class, shift)` groups.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::flow::MaxFlow;
use crate::graph::{DemandSet, Graph, NodeWeights, UNREACHABLE};
use crate::planar::find_3path_separator;
use crate::schedule::{check_demands_met, simulate_radio, PossessionState, RadioSchedule};
use crate::Error;

/// One separator path. `class` is its index among its component's paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GossipPath {
    pub component: usize,
    pub class: usize,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GossipLevel {
    /// Components split on this level (all of `V` on the first level).
    pub components: Vec<Vec<usize>>,
    pub paths: Vec<GossipPath>,
    /// Separator roots plus every `(2L+1)`-st vertex of each path, sorted.
    pub landmarks: Vec<usize>,
    /// Nodes not yet on any path after this level.
    pub remaining: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GossipDecomposition {
    pub l: usize,
    pub root: usize,
    pub levels: Vec<GossipLevel>,
}

impl GossipDecomposition {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Nodes on the paths of all levels before `level` (0-based).
    pub fn prefix(&self, level: usize) -> Vec<usize> {
        let set: BTreeSet<usize> =
            self.levels[..level].iter().flat_map(|lv| lv.paths.iter().flat_map(|p| p.nodes.iter().copied())).collect();
        set.into_iter().collect()
    }

    /// `(level, class, position)` of the first path containing each node.
    fn placement(&self) -> BTreeMap<usize, (usize, usize, usize)> {
        let mut out = BTreeMap::new();
        for (j, lv) in self.levels.iter().enumerate() {
            for p in &lv.paths {
                for (pos, &v) in p.nodes.iter().enumerate() {
                    out.entry(v).or_insert((j, p.class, pos));
                }
            }
        }
        out
    }
}

/// Splits `g` level by level with unit-weight separators until no node is
/// left.
pub fn decompose(g: &Graph, l: usize) -> Result<GossipDecomposition, Error> {
    let n = g.node_count();
    if l == 0 {
        return Err(Error::BadParams("L must be at least 1"));
    }
    if n == 0 || !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let unit = NodeWeights::unit(n);
    let mut alive = vec![true; n];
    let mut levels = Vec::new();
    let mut root = None;
    while alive.iter().any(|&a| a) {
        let components = g.components_of(&alive);
        let mut paths = Vec::new();
        let mut landmarks = BTreeSet::new();
        for (c, comp) in components.iter().enumerate() {
            let sep = find_3path_separator(g, &unit, comp)?;
            root.get_or_insert(sep.root);
            landmarks.insert(sep.root);
            for (k, p) in sep.paths.iter().enumerate() {
                landmarks.extend(p.iter().step_by(2 * l + 1).copied());
                paths.push(GossipPath { component: c, class: k, nodes: p.clone() });
            }
            for v in sep.nodes() {
                alive[v] = false;
            }
        }
        let remaining = (0..n).filter(|&v| alive[v]).collect();
        levels.push(GossipLevel { components, paths, landmarks: landmarks.into_iter().collect(), remaining });
    }
    Ok(GossipDecomposition { l, root: root.unwrap(), levels })
}

// Errors unless every receiver hears exactly one transmitter.
fn check_round(g: &Graph, tx: &[usize], rx: &[usize], round: usize) -> Result<(), Error> {
    let sending: BTreeSet<usize> = tx.iter().copied().collect();
    for &r in rx {
        if g.neighbors(r).iter().filter(|x| sending.contains(x)).count() != 1 {
            return Err(Error::InterferenceDetected(round));
        }
    }
    Ok(())
}

/// Pipelines the messages on the level's paths back to the landmarks, one
/// path class at a time. `first_round` only numbers error reports.
pub fn gather_on_paths(g: &Graph, dec: &GossipDecomposition, level: usize, first_round: usize) -> Result<RadioSchedule, Error> {
    let span = 2 * dec.l + 1;
    let lv = &dec.levels[level];
    let mut out = RadioSchedule::new();
    for class in 0..3 {
        for offset in (1..span).rev() {
            let mut tx = Vec::new();
            let mut rx = Vec::new();
            for p in lv.paths.iter().filter(|p| p.class == class) {
                for pos in (offset..p.nodes.len()).step_by(span) {
                    tx.push(p.nodes[pos]);
                    rx.push(p.nodes[pos - 1]);
                }
            }
            if tx.is_empty() {
                continue;
            }
            check_round(g, &tx, &rx, first_round + out.len())?;
            out.push(tx);
        }
    }
    Ok(out)
}

/// Landmarks of a level matched to earlier path nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LandmarkMatching {
    pub target: BTreeMap<usize, usize>,
    /// `q_v`: from the landmark to its target, at most `L` hops, inside the
    /// landmark's component plus the target.
    pub witness: BTreeMap<usize, Vec<usize>>,
}

impl LandmarkMatching {
    /// Landmarks matched to each target.
    pub fn load(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for &u in self.target.values() {
            *out.entry(u).or_insert(0) += 1;
        }
        out
    }
}

/// Matches every landmark of `level` (at least 1) to a node of the earlier
/// paths within `L` hops, each such node taking at most `3L` landmarks.
pub fn find_landmark_matching(g: &Graph, dec: &GossipDecomposition, level: usize) -> Result<LandmarkMatching, Error> {
    let l = dec.l;
    let n = g.node_count();
    let lv = &dec.levels[level];
    let prefix = dec.prefix(level);
    if prefix.is_empty() {
        return Err(Error::BadParams("first level has no earlier paths"));
    }
    let mut in_prefix = vec![false; n];
    prefix.iter().for_each(|&u| in_prefix[u] = true);
    let u_index: BTreeMap<usize, usize> = prefix.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let lm = &lv.landmarks;
    let (src, sink) = (0, 1);
    let mut flow = MaxFlow::new(2 + lm.len() + prefix.len());
    let mut arcs = Vec::new();
    for (a, &v) in lm.iter().enumerate() {
        flow.add_arc(src, 2 + a, 1);
        let comp = lv.components.iter().find(|c| c.binary_search(&v).is_ok()).unwrap();
        let mut mask = vec![false; n];
        comp.iter().for_each(|&w| mask[w] = true);
        let dist = g.bfs_distances(v, Some(&mask));
        let mut reach = BTreeSet::new();
        for &w in comp {
            if dist[w] != UNREACHABLE && dist[w] < l {
                reach.extend(g.neighbors(w).iter().copied().filter(|&u| in_prefix[u]));
            }
        }
        for u in reach {
            arcs.push((v, u, flow.add_arc(2 + a, 2 + lm.len() + u_index[&u], 1)));
        }
    }
    for i in 0..prefix.len() {
        flow.add_arc(2 + lm.len() + i, sink, 3 * l as i64);
    }
    if (flow.max_flow(src, sink) as usize) < lm.len() {
        return Err(Error::MatchingInfeasible);
    }
    let mut out = LandmarkMatching { target: BTreeMap::new(), witness: BTreeMap::new() };
    for (v, u, h) in arcs {
        if flow.flow(h) > 0 {
            let comp = lv.components.iter().find(|c| c.binary_search(&v).is_ok()).unwrap();
            let mut mask = vec![false; n];
            comp.iter().for_each(|&w| mask[w] = true);
            mask[u] = true;
            let q = g.shortest_path_within(v, u, Some(&mask)).unwrap();
            out.target.insert(v, u);
            out.witness.insert(v, q);
        }
    }
    Ok(out)
}

/// Greedy radio rounds advancing node sequences one hop at a time. A hop
/// joins a round only if its receiver hears nobody else and its transmitter
/// does not disturb an earlier receiver of the round.
pub fn schedule_hops(g: &Graph, tasks: &[Vec<usize>]) -> RadioSchedule {
    let n = g.node_count();
    let mut at = vec![0usize; tasks.len()];
    let mut out = RadioSchedule::new();
    loop {
        let mut sending = vec![false; n];
        let mut claimed = vec![false; n];
        let mut tx = Vec::new();
        let mut moved = Vec::new();
        for (t, seq) in tasks.iter().enumerate() {
            if at[t] + 1 >= seq.len() {
                continue;
            }
            let (a, b) = (seq[at[t]], seq[at[t] + 1]);
            if sending[b] || claimed[a] {
                continue;
            }
            let heard = g.neighbors(b).iter().filter(|&&x| sending[x]).count();
            let ok = if sending[a] { heard == 1 } else { heard == 0 && !g.neighbors(a).iter().any(|&x| claimed[x]) };
            if ok {
                if !sending[a] {
                    sending[a] = true;
                    tx.push(a);
                }
                claimed[b] = true;
                moved.push(t);
            }
        }
        if moved.is_empty() {
            break;
        }
        moved.iter().for_each(|&t| at[t] += 1);
        out.push(tx);
    }
    out
}

/// Moves each landmark's messages along its witness path to the last node
/// before the target, then hands them to the targets grouped by the
/// target's `(level, class, position mod 3)`.
pub fn move_to_prefix(g: &Graph, dec: &GossipDecomposition, matching: &LandmarkMatching) -> (RadioSchedule, RadioSchedule) {
    let walks: Vec<Vec<usize>> = matching.witness.values().map(|q| q[..q.len() - 1].to_vec()).collect();
    let walk = schedule_hops(g, &walks);
    let place = dec.placement();
    let mut groups: BTreeMap<(usize, usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
    for q in matching.witness.values() {
        let (w, u) = (q[q.len() - 2], q[q.len() - 1]);
        let (j, k, pos) = place[&u];
        groups.entry((j, k, pos % 3)).or_default().push(vec![w, u]);
    }
    let mut hand = RadioSchedule::new();
    for hops in groups.values() {
        hand.extend(schedule_hops(g, hops));
    }
    (walk, hand)
}

/// BFS-layer broadcast of everything `r` holds: each round takes informed
/// transmitters nearest `r` first while every claimed receiver still hears
/// exactly one of them.
pub fn broadcast_from(g: &Graph, r: usize) -> RadioSchedule {
    let n = g.node_count();
    let dist = g.bfs_distances(r, None);
    let mut order: Vec<usize> = (0..n).filter(|&v| dist[v] != UNREACHABLE).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut informed = vec![false; n];
    informed[r] = true;
    let mut out = RadioSchedule::new();
    loop {
        let mut sending = vec![false; n];
        let mut claimed = vec![false; n];
        let mut tx = Vec::new();
        for &c in &order {
            if !informed[c] || g.neighbors(c).iter().any(|&x| claimed[x]) {
                continue;
            }
            let fresh: Vec<usize> = g
                .neighbors(c)
                .iter()
                .copied()
                .filter(|&w| !informed[w] && !g.neighbors(w).iter().any(|&x| sending[x]))
                .collect();
            if fresh.is_empty() {
                continue;
            }
            sending[c] = true;
            tx.push(c);
            fresh.iter().for_each(|&w| claimed[w] = true);
        }
        if tx.is_empty() {
            break;
        }
        (0..n).filter(|&w| claimed[w]).for_each(|w| informed[w] = true);
        out.push(tx);
    }
    out
}

/// Rounds spent on one level of the gathering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LevelRounds {
    pub gather: usize,
    pub walk: usize,
    pub hand: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GossipOutcome {
    pub schedule: RadioSchedule,
    pub l: usize,
    pub depth: usize,
    pub root: usize,
    /// Rounds before the broadcast back starts.
    pub gather_len: usize,
    pub levels: Vec<LevelRounds>,
    /// Every `L` tried, in order.
    pub tried: Vec<usize>,
}

/// The gathering schedule for one `L`, or `MatchingInfeasible`.
pub fn gather_for(g: &Graph, l: usize) -> Result<(GossipDecomposition, RadioSchedule, Vec<LevelRounds>), Error> {
    let dec = decompose(g, l)?;
    let mut sched = RadioSchedule::new();
    let mut rounds = vec![LevelRounds::default(); dec.depth()];
    for i in (0..dec.depth()).rev() {
        let gather = gather_on_paths(g, &dec, i, sched.len())?;
        rounds[i].gather = gather.len();
        sched.extend(gather);
        if i == 0 {
            let r = dec.root;
            let mut tasks = Vec::new();
            for &v in dec.levels[0].landmarks.iter().filter(|&&v| v != r) {
                let p = dec.levels[0].paths.iter().find_map(|p| p.nodes.iter().position(|&x| x == v).map(|k| &p.nodes[..=k]));
                tasks.push(p.unwrap().iter().rev().copied().collect());
            }
            let walk = schedule_hops(g, &tasks);
            rounds[0].walk = walk.len();
            sched.extend(walk);
        } else {
            let m = find_landmark_matching(g, &dec, i)?;
            let (walk, hand) = move_to_prefix(g, &dec, &m);
            rounds[i].walk = walk.len();
            rounds[i].hand = hand.len();
            sched.extend(walk);
            sched.extend(hand);
        }
    }
    Ok((dec, sched, rounds))
}

/// Gossip schedule: doubling search over `L` from `max(3, diameter)` up to
/// `2n`, keeping the first `L` whose matchings all exist. The result is
/// checked by simulation for all-pairs possession.
pub fn radio_gossip(g: &Graph) -> Result<GossipOutcome, Error> {
    let n = g.node_count();
    let (_, diam) = g.eccentricity_and_diameter()?;
    if n <= 1 {
        return Ok(GossipOutcome {
            schedule: RadioSchedule::new(),
            l: 0,
            depth: 0,
            root: 0,
            gather_len: 0,
            levels: Vec::new(),
            tried: Vec::new(),
        });
    }
    let cap = (2 * n).max(3);
    let mut l = diam.max(3).min(cap);
    let mut tried = Vec::new();
    loop {
        tried.push(l);
        match gather_for(g, l) {
            Ok((dec, mut schedule, levels)) => {
                let gather_len = schedule.len();
                schedule.extend(broadcast_from(g, dec.root));
                let end = simulate_radio(g, &PossessionState::initial(n), &schedule)?;
                if !check_demands_met(&end, &DemandSet::gossip(n)).met {
                    return Err(Error::DemandsUnmet);
                }
                return Ok(GossipOutcome { schedule, l, depth: dec.depth(), root: dec.root, gather_len, levels, tried });
            }
            Err(Error::MatchingInfeasible) if l < cap => l = (2 * l).min(cap),
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_grid;

    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn decompositions() {
        let d = decompose(&path(7), 3).unwrap();
        assert_eq!(d.depth(), 3);
        assert_eq!(d.levels[0].paths[0].nodes, vec![3]);
        let star = Graph::new(5, (1..5).map(|i| (0, i))).unwrap();
        let d = decompose(&star, 3).unwrap();
        assert_eq!(d.depth(), 2);
        assert!(d.levels[0].paths.iter().any(|p| p.nodes.contains(&0)));
        let grid = test_grid(4, 4);
        let d = decompose(&grid, 6).unwrap();
        for lv in &d.levels {
            let starts: BTreeSet<usize> = lv.paths.iter().map(|p| p.nodes[0]).collect();
            assert_eq!(lv.landmarks, starts.into_iter().collect::<Vec<_>>());
        }
        let all: BTreeSet<usize> = d.levels.iter().flat_map(|lv| lv.paths.iter().flat_map(|p| p.nodes.clone())).collect();
        assert_eq!(all.len(), 16);
        assert!(d.depth() <= 5);
    }

    #[test]
    fn landmark_spacing() {
        let d = decompose(&path(20), 2).unwrap();
        for p in &d.levels[0].paths {
            for (i, &v) in p.nodes.iter().enumerate() {
                assert_eq!(d.levels[0].landmarks.contains(&v), i % 5 == 0 || v == d.root);
            }
        }
    }

    #[test]
    fn path_pipeline() {
        let g = path(5);
        let dec = GossipDecomposition {
            l: 2,
            root: 0,
            levels: vec![GossipLevel {
                components: vec![(0..5).collect()],
                paths: vec![GossipPath { component: 0, class: 0, nodes: vec![0, 1, 2, 3, 4] }],
                landmarks: vec![0],
                remaining: vec![],
            }],
        };
        let s = gather_on_paths(&g, &dec, 0, 0).unwrap();
        assert_eq!(s.rounds, vec![vec![4], vec![3], vec![2], vec![1]]);
        let end = simulate_radio(&g, &PossessionState::initial(5), &s).unwrap();
        assert_eq!(end.messages(0).len(), 5);

        let short = GossipDecomposition {
            levels: vec![GossipLevel { paths: vec![GossipPath { component: 0, class: 0, nodes: vec![2] }], ..dec.levels[0].clone() }],
            ..dec
        };
        assert!(gather_on_paths(&g, &short, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn two_components_share_rounds() {
        // 0-1-2 and 4-5-6 hang off 3; both arms are level-2 paths.
        let g = Graph::new(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        let arm = |c, nodes: Vec<usize>| GossipPath { component: c, class: 0, nodes };
        let lv = GossipLevel {
            components: vec![vec![0, 1, 2], vec![4, 5, 6]],
            paths: vec![arm(0, vec![2, 1, 0]), arm(1, vec![4, 5, 6])],
            landmarks: vec![2, 4],
            remaining: vec![],
        };
        let dec = GossipDecomposition { l: 1, root: 3, levels: vec![lv.clone(), lv] };
        let s = gather_on_paths(&g, &dec, 1, 0).unwrap();
        assert_eq!(s.rounds, vec![vec![0, 6], vec![1, 5]]);
        let end = simulate_radio(&g, &PossessionState::initial(7), &s).unwrap();
        assert!(end.holds(2, 0) && end.holds(4, 6));
    }

    #[test]
    fn matching_cases() {
        // Landmark 1 next to prefix node 0.
        let g = path(3);
        let mk = |l, first: Vec<usize>, second: Vec<usize>, comp: Vec<usize>| GossipDecomposition {
            l,
            root: first[0],
            levels: vec![
                GossipLevel {
                    components: vec![(0..g.node_count()).collect()],
                    paths: vec![GossipPath { component: 0, class: 0, nodes: first }],
                    landmarks: vec![],
                    remaining: vec![],
                },
                GossipLevel {
                    components: vec![comp],
                    landmarks: second.clone(),
                    paths: vec![GossipPath { component: 0, class: 0, nodes: second }],
                    remaining: vec![],
                },
            ],
        };
        let dec = mk(1, vec![0], vec![1], vec![1, 2]);
        let m = find_landmark_matching(&g, &dec, 1).unwrap();
        assert_eq!(m.witness[&1], vec![1, 0]);
        let (walk, hand) = move_to_prefix(&g, &dec, &m);
        assert!(walk.is_empty());
        assert_eq!(hand.rounds, vec![vec![1]]);

        // A star: 4 landmarks (the leaves) reach only the center; 3L = 3.
        let star = Graph::new(5, (1..5).map(|i| (0, i))).unwrap();
        let lv2 = GossipLevel {
            components: (1..5).map(|i| vec![i]).collect(),
            paths: (1..5).map(|i| GossipPath { component: i - 1, class: 0, nodes: vec![i] }).collect(),
            landmarks: vec![1, 2, 3, 4],
            remaining: vec![],
        };
        let lv1 = GossipLevel {
            components: vec![(0..5).collect()],
            paths: vec![GossipPath { component: 0, class: 0, nodes: vec![0] }],
            landmarks: vec![0],
            remaining: vec![1, 2, 3, 4],
        };
        let dec = GossipDecomposition { l: 1, root: 0, levels: vec![lv1, lv2] };
        assert_eq!(find_landmark_matching(&star, &dec, 1), Err(Error::MatchingInfeasible));
        let dec = GossipDecomposition { l: 2, ..dec };
        assert_eq!(find_landmark_matching(&star, &dec, 1).unwrap().load()[&0], 4);
    }

    #[test]
    fn grid_level_matching_is_full() {
        let g = test_grid(5, 5);
        let dec = decompose(&g, 8).unwrap();
        for i in 1..dec.depth() {
            let m = find_landmark_matching(&g, &dec, i).unwrap();
            assert_eq!(m.target.len(), dec.levels[i].landmarks.len());
            assert!(m.load().values().all(|&c| c <= 3 * 8));
            assert!(m.witness.values().all(|q| q.len() - 1 <= 8 && g.is_simple_path(q)));
        }
    }

    #[test]
    fn hand_over_uses_shift_classes() {
        // Prefix path 0-1-2-3 with pendant nodes 4 (at 1) and 5 (at 2), joined by 4-5.
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5), (4, 5)]).unwrap();
        let dec = GossipDecomposition {
            l: 1,
            root: 0,
            levels: vec![
                GossipLevel {
                    components: vec![(0..6).collect()],
                    paths: vec![GossipPath { component: 0, class: 0, nodes: vec![0, 1, 2, 3] }],
                    landmarks: vec![0],
                    remaining: vec![4, 5],
                },
                GossipLevel {
                    components: vec![vec![4, 5]],
                    paths: vec![GossipPath { component: 0, class: 0, nodes: vec![4, 5] }],
                    landmarks: vec![4, 5],
                    remaining: vec![],
                },
            ],
        };
        let m = LandmarkMatching {
            target: BTreeMap::from([(4, 1), (5, 2)]),
            witness: BTreeMap::from([(4, vec![4, 1]), (5, vec![5, 2])]),
        };
        let (_, hand) = move_to_prefix(&g, &dec, &m);
        assert_eq!(hand.rounds, vec![vec![4], vec![5]]);
        let end = simulate_radio(&g, &PossessionState::initial(6), &hand).unwrap();
        assert!(end.holds(1, 4) && end.holds(2, 5));
    }

    #[test]
    fn gossip_small() {
        assert!(radio_gossip(&Graph::new(1, []).unwrap()).unwrap().schedule.is_empty());
        let two = radio_gossip(&path(2)).unwrap();
        assert_eq!(two.schedule.len(), 2);
        let five = radio_gossip(&path(5)).unwrap();
        assert!(five.schedule.len() <= 40);
        let grid = radio_gossip(&test_grid(5, 5)).unwrap();
        assert!(grid.gather_len < grid.schedule.len());
        assert_eq!(grid.tried[0], 8);
    }

    #[test]
    fn broadcast_reaches_everyone() {
        let g = test_grid(4, 5);
        let s = broadcast_from(&g, 7);
        let end = simulate_radio(&g, &PossessionState::initial(20), &s).unwrap();
        assert!((0..20).all(|v| end.holds(v, 7)));
    }
}
