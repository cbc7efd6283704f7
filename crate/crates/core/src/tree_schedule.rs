//! Telephone schedules on trees and paths.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::schedule::TelephoneSchedule;
use crate::Error;

/// Children lists of the tree given by `edges`, rooted at `root`. Errors if
/// the edges contain a cycle or a part not connected to the root.
fn rooted_children(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Vec<Vec<usize>>, Error> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n || u == v {
            return Err(Error::NotATree);
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut children = vec![Vec::new(); n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        let mut nb = adj[u].clone();
        nb.sort_unstable();
        for w in nb {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                children[u].push(w);
                queue.push_back(w);
            }
        }
    }
    if edges.len() + 1 != reached {
        return Err(Error::NotATree);
    }
    Ok(children)
}

/// Optimal broadcast from `root` over a tree: every informed node calls its
/// children in decreasing order of their subtree completion time.
pub fn tree_broadcast_schedule(n: usize, edges: &[(usize, usize)], root: usize) -> Result<TelephoneSchedule, Error> {
    let mut children = rooted_children(n, edges, root)?;
    // Post-order via reversed BFS order.
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        order.extend_from_slice(&children[v]);
        i += 1;
    }
    let mut done = vec![0usize; n];
    for &v in order.iter().rev() {
        children[v].sort_by(|&a, &b| done[b].cmp(&done[a]).then(a.cmp(&b)));
        done[v] = children[v].iter().enumerate().map(|(i, &c)| i + 1 + done[c]).max().unwrap_or(0);
    }
    let mut rounds = vec![Vec::new(); done[root]];
    let mut informed = vec![0usize; n];
    for &v in &order {
        for (i, &c) in children[v].iter().enumerate() {
            informed[c] = informed[v] + i + 1;
            rounds[informed[c] - 1].push((v.min(c), v.max(c)));
        }
    }
    Ok(TelephoneSchedule::from_rounds(rounds))
}

/// The broadcast schedule run backwards: collects every tree message at
/// `root` in the same number of rounds.
pub fn tree_gather_schedule(n: usize, edges: &[(usize, usize)], root: usize) -> Result<TelephoneSchedule, Error> {
    Ok(tree_broadcast_schedule(n, edges, root)?.reversed())
}

/// `rounds` rounds alternating the even matching `{p0p1, p2p3, ...}` and the
/// odd matching `{p1p2, p3p4, ...}`. A two-node path repeats its one edge.
pub fn path_shuttle_schedule(path: &[usize], rounds: usize) -> TelephoneSchedule {
    if path.len() < 2 {
        return TelephoneSchedule::new();
    }
    let matching = |parity: usize| -> Vec<(usize, usize)> {
        (parity..path.len() - 1).step_by(2).map(|i| (path[i], path[i + 1])).collect()
    };
    let (even, odd) = (matching(0), matching(1));
    let odd = if odd.is_empty() { even.clone() } else { odd };
    TelephoneSchedule::from_rounds((0..rounds).map(|r| if r % 2 == 0 { even.clone() } else { odd.clone() }).collect())
}
