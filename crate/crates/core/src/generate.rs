//! Seeded instance generators.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DemandSet, Graph};
use crate::planar::is_planar;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Grid { rows: usize, cols: usize },
    Path { n: usize },
    /// A center `0` and `leaves` leaves.
    Star { leaves: usize },
    /// Complete `d`-ary tree; the root alone has depth 0.
    DaryTree { d: usize, depth: usize },
    /// Greedy triangulation of perturbed grid points.
    RandomPlanar { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemandKind {
    None,
    /// `k` distinct random ordered pairs.
    Random { k: usize },
    Broadcast { root: usize },
    Gossip,
}

pub fn grid(rows: usize, cols: usize) -> Result<Graph, Error> {
    if rows == 0 || cols == 0 {
        return Err(Error::BadParams("grid needs positive sides"));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::new(rows * cols, edges)
}

pub fn path(n: usize) -> Result<Graph, Error> {
    if n == 0 {
        return Err(Error::BadParams("path needs a node"));
    }
    Graph::new(n, (1..n).map(|i| (i - 1, i)))
}

pub fn star(leaves: usize) -> Result<Graph, Error> {
    Graph::new(leaves + 1, (1..=leaves).map(|i| (0, i)))
}

/// Node ids in BFS order, so `(d^(depth+1) - 1) / (d - 1)` nodes for `d >= 2`.
pub fn dary_tree(d: usize, depth: usize) -> Result<Graph, Error> {
    if d == 0 {
        return Err(Error::BadParams("arity must be positive"));
    }
    let mut edges = Vec::new();
    let mut level = alloc::vec![0usize];
    let mut next = 1;
    for _ in 0..depth {
        let mut nl = Vec::new();
        for &v in &level {
            for _ in 0..d {
                edges.push((v, next));
                nl.push(next);
                next += 1;
                if next > 1 << 20 {
                    return Err(Error::BadParams("tree too large"));
                }
            }
        }
        level = nl;
    }
    Graph::new(next, edges)
}

fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (i64, i64), b: (i64, i64), p: (i64, i64)) -> bool {
    orient(a, b, p) == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

// Segments cross or overlap somewhere other than a shared endpoint.
fn conflict(p: &[(i64, i64)], (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    let shared = [a, b].iter().filter(|x| **x == c || **x == d).count();
    let (pa, pb, pc, pd) = (p[a], p[b], p[c], p[d]);
    if shared == 1 {
        // Only collinear overlap can conflict.
        let (o, x, y) = if a == c {
            (pa, pb, pd)
        } else if a == d {
            (pa, pb, pc)
        } else if b == c {
            (pb, pa, pd)
        } else {
            (pb, pa, pc)
        };
        return orient(o, x, y) == 0 && (x.0 - o.0) * (y.0 - o.0) + (x.1 - o.1) * (y.1 - o.1) > 0;
    }
    let (d1, d2) = (orient(pa, pb, pc), orient(pa, pb, pd));
    let (d3, d4) = (orient(pc, pd, pa), orient(pc, pd, pb));
    if ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)) {
        return true;
    }
    on_segment(pa, pb, pc) || on_segment(pa, pb, pd) || on_segment(pc, pd, pa) || on_segment(pc, pd, pb)
}

/// Points on a `ceil(sqrt n)`-wide grid, each moved by up to 30% of the
/// spacing; edges added shortest first unless they cross an earlier one.
pub fn random_planar(n: usize, seed: u64) -> Result<Graph, Error> {
    if n == 0 {
        return Err(Error::BadParams("random planar graph needs a node"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = 1;
    while w * w < n {
        w += 1;
    }
    let pts: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let (r, c) = ((i / w) as i64, (i % w) as i64);
            (c * 1000 + rng.gen_range(-300..=300), r * 1000 + rng.gen_range(-300..=300))
        })
        .collect();
    let mut cand: Vec<(i64, usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
            cand.push((dx * dx + dy * dy, a, b));
        }
    }
    cand.sort_unstable();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (_, a, b) in cand {
        if (0..n).any(|v| v != a && v != b && on_segment(pts[a], pts[b], pts[v])) {
            continue;
        }
        if edges.iter().all(|&e| !conflict(&pts, (a, b), e)) {
            edges.push((a, b));
        }
    }
    let g = Graph::new(n, edges)?;
    if !is_planar(&g) || !g.is_connected() {
        return Err(Error::NotPlanar);
    }
    Ok(g)
}

pub fn graph(kind: GraphKind, seed: u64) -> Result<Graph, Error> {
    match kind {
        GraphKind::Grid { rows, cols } => grid(rows, cols),
        GraphKind::Path { n } => path(n),
        GraphKind::Star { leaves } => star(leaves),
        GraphKind::DaryTree { d, depth } => dary_tree(d, depth),
        GraphKind::RandomPlanar { n } => random_planar(n, seed),
    }
}

/// `k` distinct ordered pairs drawn uniformly.
pub fn random_pairs(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<DemandSet, Error> {
    if n < 2 || k > n * (n - 1) {
        return Err(Error::BadParams("too many pairs for the node count"));
    }
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    while pairs.len() < k {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s != t && seen.insert((s, t)) {
            pairs.push((s, t));
        }
    }
    DemandSet::new(n, pairs)
}

/// A graph and demands. The graph uses `seed`; random demands use an
/// independent stream of the same seed.
pub fn generate_instance(kind: GraphKind, demands: DemandKind, seed: u64) -> Result<(Graph, DemandSet), Error> {
    let g = graph(kind, seed)?;
    let n = g.node_count();
    let d = match demands {
        DemandKind::None => DemandSet::new(n, [])?,
        DemandKind::Random { k } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            random_pairs(n, k, &mut rng)?
        }
        DemandKind::Broadcast { root } => {
            if root >= n {
                return Err(Error::BadParams("root out of range"));
            }
            DemandSet::rooted(n, root, &(0..n).filter(|&t| t != root).collect::<Vec<_>>())?
        }
        DemandKind::Gossip => DemandSet::gossip(n),
    };
    Ok((g, d))
}
