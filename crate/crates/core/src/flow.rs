//! Dinic's maximum flow with integer capacities.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: i64,
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct MaxFlow {
    adj: Vec<Vec<Arc>>,
    // (tail, index in adj[tail], original capacity)
    handles: Vec<(usize, usize, i64)>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow { adj: vec![Vec::new(); n], handles: Vec::new(), level: vec![0; n], iter: vec![0; n] }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds arc `u -> v`; returns a handle for [`MaxFlow::flow`].
    pub fn add_arc(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let (iu, iv) = (self.adj[u].len(), self.adj[v].len() + usize::from(u == v));
        self.adj[u].push(Arc { to: v, cap, rev: iv });
        self.adj[v].push(Arc { to: u, cap: 0, rev: iu });
        self.handles.push((u, iu, cap));
        self.handles.len() - 1
    }

    /// Adds an undirected edge of capacity `cap` in each direction.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let (iu, iv) = (self.adj[u].len(), self.adj[v].len());
        self.adj[u].push(Arc { to: v, cap, rev: iv });
        self.adj[v].push(Arc { to: u, cap, rev: iu });
        self.handles.push((u, iu, cap));
        self.handles.len() - 1
    }

    /// Net flow through the arc or edge behind `handle` (positive in the
    /// direction it was added).
    pub fn flow(&self, handle: usize) -> i64 {
        let (u, i, cap) = self.handles[handle];
        cap - self.adj[u][i].cap
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for a in &self.adj[u] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[u] + 1;
                    q.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: i64) -> i64 {
        if u == t {
            return limit;
        }
        while self.iter[u] < self.adj[u].len() {
            let i = self.iter[u];
            let Arc { to, cap, rev } = self.adj[u][i];
            if cap > 0 && self.level[u] < self.level[to] {
                let d = self.dfs(to, t, limit.min(cap));
                if d > 0 {
                    self.adj[u][i].cap -= d;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    /// Pushes a maximum flow from `s` to `t` and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    /// Nodes reachable from `s` in the residual graph (the source side of a
    /// minimum cut after [`MaxFlow::max_flow`]).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &self.adj[u] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}
