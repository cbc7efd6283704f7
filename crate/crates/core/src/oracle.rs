//! Exhaustive optima for small instances.
//!
//! Both schedule oracles run a breadth-first search over possession states,
//! one round per layer, dropping every state dominated by one already seen
//! (pointwise at most its possessions). Only the messages named by the
//! demands are tracked.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{DemandSet, Graph, UNREACHABLE};
use crate::rounding::PoiseTree;
use crate::schedule::{RadioSchedule, RadioSemantics, TelephoneSchedule};
use crate::Error;

pub use crate::multiflow::pack_tpaths_exhaustive;

/// An optimum schedule found by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<S> {
    pub length: usize,
    pub witness: S,
    /// States kept after pruning.
    pub explored: usize,
}

// Possessions as one bitmask per node over the tracked messages.
type State = Vec<u64>;

struct Tracked {
    bit: BTreeMap<usize, usize>,
    goal: Vec<u64>,
}

fn tracked(n: usize, demands: &DemandSet) -> Result<Tracked, Error> {
    let sources: BTreeSet<usize> = demands.pairs().iter().map(|p| p.0).collect();
    if sources.len() > 64 {
        return Err(Error::BadParams("oracle tracks at most 64 sources"));
    }
    let bit: BTreeMap<usize, usize> = sources.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut goal = vec![0u64; n];
    for &(s, t) in demands.pairs() {
        goal[t] |= 1 << bit[&s];
    }
    Ok(Tracked { bit, goal })
}

fn start(n: usize, tr: &Tracked) -> State {
    let mut st = vec![0u64; n];
    for (&s, &b) in &tr.bit {
        st[s] |= 1 << b;
    }
    st
}

fn done(st: &State, goal: &[u64]) -> bool {
    st.iter().zip(goal).all(|(a, g)| a & g == *g)
}

fn dominated(st: &State, by: &State) -> bool {
    st.iter().zip(by).all(|(a, b)| a & !b == 0)
}

// Layered search shared by both models.
fn search<M: Clone>(
    init: State,
    goal: &[u64],
    max_rounds: usize,
    moves: impl Fn(&State) -> Vec<(M, State)>,
) -> Result<(usize, Vec<M>, usize), Error> {
    let mut seen: Vec<State> = vec![init.clone()];
    let mut parent: Vec<Option<(usize, M)>> = vec![None];
    let mut frontier = vec![0usize];
    let finish = |mut i: usize, parent: &Vec<Option<(usize, M)>>| {
        let mut path = Vec::new();
        while let Some((p, m)) = &parent[i] {
            path.push(m.clone());
            i = *p;
        }
        path.reverse();
        path
    };
    if done(&init, goal) {
        return Ok((0, Vec::new(), 1));
    }
    for round in 1..=max_rounds {
        let mut next = Vec::new();
        for &i in &frontier {
            let cur = seen[i].clone();
            for (m, st) in moves(&cur) {
                if seen.iter().any(|s| dominated(&st, s)) {
                    continue;
                }
                seen.push(st.clone());
                parent.push(Some((i, m)));
                let id = seen.len() - 1;
                if done(&st, goal) {
                    return Ok((round, finish(id, &parent), seen.len()));
                }
                next.push(id);
            }
        }
        // Later states of this layer may dominate earlier ones.
        let layer: Vec<State> = next.iter().map(|&i| seen[i].clone()).collect();
        frontier = next
            .iter()
            .enumerate()
            .filter(|&(a, _)| !layer.iter().enumerate().any(|(b, s)| b != a && dominated(&layer[a], s) && (layer[a] != *s || b < a)))
            .map(|(_, &i)| i)
            .collect();
        if frontier.is_empty() {
            break;
        }
    }
    Err(Error::Exceeded)
}

// Maximal matchings among the edges whose endpoints hold different sets.
fn maximal_matchings(edges: &[(usize, usize)], n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(edges: &[(usize, usize)], i: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if i == edges.len() {
            // maximal: no skipped edge with both ends free
            if edges.iter().all(|&(u, v)| used[u] || used[v]) {
                out.push(cur.clone());
            }
            return;
        }
        let (u, v) = edges[i];
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            cur.push((u, v));
            rec(edges, i + 1, used, cur, out);
            cur.pop();
            used[u] = false;
            used[v] = false;
        }
        rec(edges, i + 1, used, cur, out);
    }
    let mut out = Vec::new();
    rec(edges, 0, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Shortest telephone schedule meeting `demands`, or `Exceeded` if none
/// has at most `max_rounds` rounds.
pub fn brute_force_telephone(g: &Graph, demands: &DemandSet, max_rounds: usize) -> Result<OracleResult<TelephoneSchedule>, Error> {
    let n = g.node_count();
    let tr = tracked(n, demands)?;
    for &(s, t) in demands.pairs() {
        if s >= n || t >= n || g.bfs_distances(s, None)[t] == UNREACHABLE {
            return Err(Error::InfeasiblePair(s, t));
        }
    }
    let moves = |st: &State| {
        let useful: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&(u, v)| st[u] != st[v]).collect();
        maximal_matchings(&useful, n)
            .into_iter()
            .map(|m| {
                let mut nx = st.clone();
                for &(u, v) in &m {
                    let x = st[u] | st[v];
                    nx[u] = x;
                    nx[v] = x;
                }
                (m, nx)
            })
            .collect()
    };
    let (length, rounds, explored) = search(start(n, &tr), &tr.goal, max_rounds, moves)?;
    Ok(OracleResult { length, witness: TelephoneSchedule::from_rounds(rounds), explored })
}

/// Shortest radio schedule meeting `demands` under `semantics`.
pub fn brute_force_radio(
    g: &Graph,
    demands: &DemandSet,
    semantics: RadioSemantics,
    max_rounds: usize,
) -> Result<OracleResult<RadioSchedule>, Error> {
    let n = g.node_count();
    if n > 12 {
        return Err(Error::BadParams("radio oracle limited to 12 nodes"));
    }
    let tr = tracked(n, demands)?;
    let moves = |st: &State| {
        // Only nodes with something new for a neighbour are worth keying.
        let useful: Vec<usize> =
            (0..n).filter(|&v| g.neighbors(v).iter().any(|&w| st[v] & !st[w] != 0)).collect();
        let mut out: Vec<(Vec<usize>, State)> = Vec::new();
        let mut states: BTreeSet<State> = BTreeSet::new();
        for mask in 1u32..(1 << useful.len()) {
            let tx: Vec<usize> = (0..useful.len()).filter(|&i| mask >> i & 1 == 1).map(|i| useful[i]).collect();
            let mut sending = vec![false; n];
            tx.iter().for_each(|&v| sending[v] = true);
            let mut nx = st.clone();
            for w in 0..n {
                if semantics == RadioSemantics::HalfDuplex && sending[w] {
                    continue;
                }
                let mut it = g.neighbors(w).iter().filter(|&&x| sending[x]);
                if let (Some(&x), None) = (it.next(), it.next()) {
                    nx[w] |= st[x];
                }
            }
            if nx != *st && states.insert(nx.clone()) {
                out.push((tx, nx));
            }
        }
        out
    };
    let (length, rounds, explored) = search(start(n, &tr), &tr.goal, max_rounds, moves)?;
    let mut witness = RadioSchedule::new();
    rounds.into_iter().for_each(|r| witness.push(r));
    Ok(OracleResult { length, witness, explored })
}

/// Minimum poise (diameter plus maximum degree) over the subtrees of `g`
/// containing `r` and all `terminals`.
pub fn min_poise_tree(g: &Graph, r: usize, terminals: &[usize]) -> Result<PoiseTree, Error> {
    let n = g.node_count();
    let need: BTreeSet<usize> = terminals.iter().copied().chain([r]).collect();
    let dist = g.bfs_distances(r, None);
    if need.iter().any(|&t| t >= n || dist[t] == UNREACHABLE) {
        return Err(Error::Disconnected);
    }
    struct Search<'a> {
        g: &'a Graph,
        need: &'a BTreeSet<usize>,
        best: Option<(usize, Vec<(usize, usize)>)>,
    }
    fn measure(n: usize, edges: &[(usize, usize)]) -> usize {
        let mut deg = vec![0usize; n];
        let mut nodes = BTreeSet::new();
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
            nodes.insert(u);
            nodes.insert(v);
        }
        let t = Graph::new(n, edges.iter().copied()).unwrap();
        let diam = nodes
            .iter()
            .map(|&s| t.bfs_distances(s, None).into_iter().filter(|&d| d != UNREACHABLE).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        diam + deg.into_iter().max().unwrap_or(0)
    }
    fn grow(s: &mut Search, inside: &mut Vec<bool>, edges: &mut Vec<(usize, usize)>, cand: Vec<(usize, usize)>) {
        let n = s.g.node_count();
        let value = measure(n, edges);
        if s.best.as_ref().is_some_and(|b| value >= b.0) {
            return;
        }
        if s.need.iter().all(|&t| inside[t]) {
            s.best = Some((value, edges.clone()));
            return;
        }
        for i in 0..cand.len() {
            let (u, w) = cand[i];
            let mut next: Vec<(usize, usize)> = cand[i + 1..].iter().copied().filter(|e| e.1 != w).collect();
            next.extend(s.g.neighbors(w).iter().filter(|&&x| !inside[x] && x != w).map(|&x| (w, x)));
            inside[w] = true;
            edges.push((u.min(w), u.max(w)));
            grow(s, inside, edges, next);
            edges.pop();
            inside[w] = false;
        }
    }
    let mut inside = vec![false; n];
    inside[r] = true;
    let cand = g.neighbors(r).iter().map(|&x| (r, x)).collect();
    let mut s = Search { g, need: &need, best: None };
    grow(&mut s, &mut inside, &mut Vec::new(), cand);
    let (_, mut edges) = s.best.unwrap();
    edges.sort_unstable();
    PoiseTree::from_edges(n, r, &edges)
}

/// Labelled tree of a Prüfer sequence over `0..seq.len() + 2`.
pub fn prufer_tree(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    seq.iter().for_each(|&v| degree[v] += 1);
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::new();
    for &v in seq {
        let leaf = leaves.pop_first().unwrap();
        edges.push((leaf.min(v), leaf.max(v)));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

// Rooted canonical string (AHU).
fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> Vec<u8> {
    let mut kids: Vec<Vec<u8>> = adj[v].iter().filter(|&&w| w != parent).map(|&w| encode(adj, w, v)).collect();
    kids.sort();
    let mut out = vec![b'('];
    kids.into_iter().for_each(|k| out.extend(k));
    out.push(b')');
    out
}

/// Canonical form of an unlabelled tree: the smallest rooted code over its
/// centers.
pub fn tree_canonical(n: usize, edges: &[(usize, usize)]) -> Vec<u8> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let t = Graph::new(n, edges.iter().copied()).unwrap();
    let ecc: Vec<usize> = (0..n).map(|v| t.bfs_distances(v, None).into_iter().max().unwrap_or(0)).collect();
    let radius = ecc.iter().copied().min().unwrap_or(0);
    (0..n).filter(|&v| ecc[v] == radius).map(|c| encode(&adj, c, usize::MAX)).min().unwrap_or_default()
}

/// One tree per isomorphism class on `n` nodes (`n >= 1`), as edge lists.
pub fn tree_catalog(n: usize) -> Vec<Vec<(usize, usize)>> {
    match n {
        0 => return Vec::new(),
        1 => return vec![Vec::new()],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let mut seen: BTreeMap<Vec<u8>, Vec<(usize, usize)>> = BTreeMap::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = prufer_tree(&seq);
        seen.entry(tree_canonical(n, &edges)).or_insert(edges);
        // odometer
        let mut i = 0;
        while i < seq.len() && seq[i] == n - 1 {
            seq[i] = 0;
            i += 1;
        }
        if i == seq.len() {
            break;
        }
        seq[i] += 1;
    }
    seen.into_values().collect()
}
