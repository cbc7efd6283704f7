//! Combinatorial planar embeddings.
//!
//! Each biconnected block is embedded with the Demoucron-Malgrange-Pertuiset
//! face-insertion method. Block rotations are then concatenated at cut
//! vertices, and the result is checked against Euler's formula.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::Error;

/// Cyclic neighbour order at every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    rotation: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    /// The neighbour after `u` in the rotation at `v`.
    fn next_at(&self, v: usize, u: usize) -> usize {
        let r = &self.rotation[v];
        let i = r.iter().position(|&x| x == u).unwrap();
        r[(i + 1) % r.len()]
    }

    /// Face boundary walks, each listed by the tails of its darts. The dart
    /// `u -> v` is followed by `v -> w` with `w` after `u` at `v`.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut faces = Vec::new();
        for u in 0..self.rotation.len() {
            for &v in &self.rotation[u] {
                if seen.contains(&(u, v)) {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (u, v);
                while seen.insert((a, b)) {
                    face.push(a);
                    let c = self.next_at(b, a);
                    a = b;
                    b = c;
                }
                faces.push(face);
            }
        }
        faces
    }
}

/// Biconnected blocks as edge lists (bridges are single-edge blocks).
fn blocks(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    struct St<'a> {
        g: &'a Graph,
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<Vec<(usize, usize)>>,
    }
    fn dfs(s: &mut St, u: usize, parent: usize) {
        s.time += 1;
        s.disc[u] = s.time;
        s.low[u] = s.time;
        for &v in s.g.neighbors(u) {
            if s.disc[v] == 0 {
                s.stack.push((u, v));
                dfs(s, v, u);
                s.low[u] = s.low[u].min(s.low[v]);
                if s.low[v] >= s.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = s.stack.pop() {
                        block.push((e.0.min(e.1), e.0.max(e.1)));
                        if e == (u, v) {
                            break;
                        }
                    }
                    block.sort_unstable();
                    s.out.push(block);
                }
            } else if v != parent && s.disc[v] < s.disc[u] {
                s.stack.push((u, v));
                s.low[u] = s.low[u].min(s.disc[v]);
            }
        }
    }
    let n = g.node_count();
    let mut s = St { g, disc: vec![0; n], low: vec![0; n], time: 0, stack: Vec::new(), out: Vec::new() };
    for v in 0..n {
        if s.disc[v] == 0 {
            dfs(&mut s, v, usize::MAX);
        }
    }
    s.out
}

/// Oriented faces of a biconnected block with at least one cycle.
fn embed_block(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>, Error> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let start = edges[0].0;
    // Initial cycle from the first non-tree edge of a BFS tree.
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    depth[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let &(cu, cv) = edges.iter().find(|&&(u, v)| parent[u] != v && parent[v] != u).ok_or(Error::NotPlanar)?;
    let (mut a, mut b) = (cu, cv);
    let (mut left, mut right) = (vec![a], vec![b]);
    while a != b {
        if depth[a] >= depth[b] {
            a = parent[a];
            left.push(a);
        } else {
            b = parent[b];
            right.push(b);
        }
    }
    right.pop();
    right.reverse();
    let mut cycle = left;
    cycle.extend(right);
    // cycle runs cu -> ... -> lca -> ... -> cv, closed by the edge cv-cu.

    let mut in_h = vec![false; n];
    let mut h_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..cycle.len() {
        let (x, y) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        in_h[x] = true;
        h_edges.insert((x.min(y), x.max(y)));
    }
    let mut rev = cycle.clone();
    rev.reverse();
    let mut faces = vec![cycle, rev];

    while h_edges.len() < edges.len() {
        // Fragments: (attachments, path provider)
        let mut frags: Vec<(Vec<usize>, Vec<usize>)> = Vec::new(); // (attachments, vertices)
        for &(u, v) in edges {
            if in_h[u] && in_h[v] && !h_edges.contains(&(u, v)) {
                frags.push((vec![u, v], Vec::new()));
            }
        }
        let mut comp_seen = vec![false; n];
        for &(u0, v0) in edges {
            for s in [u0, v0] {
                if in_h[s] || comp_seen[s] {
                    continue;
                }
                comp_seen[s] = true;
                let mut verts = vec![s];
                let mut att = BTreeSet::new();
                let mut i = 0;
                while i < verts.len() {
                    let x = verts[i];
                    for &y in &adj[x] {
                        if in_h[y] {
                            att.insert(y);
                        } else if !comp_seen[y] {
                            comp_seen[y] = true;
                            verts.push(y);
                        }
                    }
                    i += 1;
                }
                verts.sort_unstable();
                frags.push((att.into_iter().collect(), verts));
            }
        }
        let face_sets: Vec<BTreeSet<usize>> = faces.iter().map(|f| f.iter().copied().collect()).collect();
        let admissible: Vec<Vec<usize>> = frags
            .iter()
            .map(|(att, _)| (0..faces.len()).filter(|&f| att.iter().all(|a| face_sets[f].contains(a))).collect())
            .collect();
        if admissible.iter().any(Vec::is_empty) {
            return Err(Error::NotPlanar);
        }
        let pick = admissible.iter().position(|a| a.len() == 1).unwrap_or(0);
        let face_id = admissible[pick][0];
        let (att, verts) = &frags[pick];
        let path = if verts.is_empty() {
            att.clone()
        } else {
            fragment_path(&adj, &in_h, att[0], verts)
        };
        for w in path.windows(2) {
            h_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        path.iter().for_each(|&v| in_h[v] = true);
        let face = faces.swap_remove(face_id);
        let (x, y) = (path[0], *path.last().unwrap());
        let i = face.iter().position(|&v| v == x).unwrap();
        let j = face.iter().position(|&v| v == y).unwrap();
        let inner = &path[1..path.len() - 1];
        let arc = |from: usize, to: usize| -> Vec<usize> {
            let mut out = Vec::new();
            let mut k = from;
            loop {
                out.push(face[k]);
                if k == to {
                    break;
                }
                k = (k + 1) % face.len();
            }
            out
        };
        let mut f1 = arc(i, j);
        f1.extend(inner.iter().rev());
        let mut f2 = arc(j, i);
        f2.extend(inner.iter());
        faces.push(f1);
        faces.push(f2);
    }
    Ok(faces)
}

// Path a -> (fragment vertices) -> b with b a second attachment.
fn fragment_path(adj: &[Vec<usize>], in_h: &[bool], a: usize, verts: &[usize]) -> Vec<usize> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &x in &adj[a] {
        if !in_h[x] && verts.binary_search(&x).is_ok() && !prev.contains_key(&x) {
            prev.insert(x, a);
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        if let Some(&b) = adj[x].iter().filter(|&&y| in_h[y] && y != a).min() {
            let mut path = vec![b, x];
            let mut c = x;
            while prev[&c] != a {
                c = prev[&c];
                path.push(c);
            }
            path.push(a);
            path.reverse();
            return path;
        }
        for &y in &adj[x] {
            if !in_h[y] && !prev.contains_key(&y) {
                prev.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    unreachable!("fragment of a biconnected block has two attachments")
}

/// Computes a planar embedding, or `NotPlanar`.
pub fn planar_embedding(g: &Graph) -> Result<Embedding, Error> {
    let n = g.node_count();
    let m = g.edge_count();
    if n >= 3 && m > 3 * n - 6 {
        return Err(Error::NotPlanar);
    }
    let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); n];
    for block in blocks(g) {
        if block.len() == 1 {
            let (u, v) = block[0];
            rotation[u].push(v);
            rotation[v].push(u);
            continue;
        }
        let faces = embed_block(n, &block)?;
        let mut sigma: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
        for f in &faces {
            let k = f.len();
            for i in 0..k {
                let (u, v, w) = (f[i], f[(i + 1) % k], f[(i + 2) % k]);
                sigma.entry(v).or_default().insert(u, w);
            }
        }
        for (v, s) in sigma {
            let first = *s.keys().next().unwrap();
            let mut order = vec![first];
            let mut x = s[&first];
            while x != first {
                order.push(x);
                x = *s.get(&x).ok_or(Error::NotPlanar)?;
                if order.len() > s.len() {
                    return Err(Error::NotPlanar);
                }
            }
            if order.len() != s.len() {
                return Err(Error::NotPlanar);
            }
            rotation[v].extend(order);
        }
    }
    let emb = Embedding { rotation };
    // Euler: per component with edges, V - E + F = 2.
    let comps = g.connected_components(&[]).into_iter().filter(|c| c.len() > 1).collect::<Vec<_>>();
    let v_sum: usize = comps.iter().map(Vec::len).sum();
    let f = emb.faces().len();
    if v_sum + f != m + 2 * comps.len() {
        return Err(Error::NotPlanar);
    }
    Ok(emb)
}

pub fn is_planar(g: &Graph) -> bool {
    planar_embedding(g).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_grid;

    fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn small_planar_graphs() {
        assert!(is_planar(&complete(4)));
        assert!(is_planar(&test_grid(4, 5)));
        assert!(is_planar(&Graph::new(5, [(0, 1), (1, 2), (3, 4)]).unwrap()));
        // two triangles sharing a cut vertex
        let bowtie = Graph::new(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let emb = planar_embedding(&bowtie).unwrap();
        assert_eq!(emb.faces().len(), 3);
    }

    #[test]
    fn kuratowski_graphs_rejected() {
        assert!(!is_planar(&complete(5)));
        let k33 = Graph::new(6, (0..3).flat_map(|u| (3..6).map(move |v| (u, v)))).unwrap();
        assert!(!is_planar(&k33));
        // subdivided K5
        let mut e: Vec<(usize, usize)> = Vec::new();
        let mut next = 5;
        for u in 0..5 {
            for v in u + 1..5 {
                e.push((u, next));
                e.push((next, v));
                next += 1;
            }
        }
        assert!(!is_planar(&Graph::new(next, e).unwrap()));
    }

    #[test]
    fn grid_faces() {
        let g = test_grid(3, 3);
        let faces = planar_embedding(&g).unwrap().faces();
        assert_eq!(faces.len(), 5);
        let mut sizes: Vec<usize> = faces.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 4, 4, 4, 8]);
    }
}
