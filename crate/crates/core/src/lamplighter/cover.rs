//! Covering walks: paths through every vertex of a connected graph `H`
//! that use each edge at most twice.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;

/// A walk `w_0 .. w_k` in `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPath {
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    NotAdjacent { index: usize },
    Uncovered { vertex: usize },
    Multiplicity { edge: (usize, usize), count: usize },
    Endpoints { first: usize, last: usize },
    TooLong { length: usize, bound: usize },
}

impl CoverPath {
    /// Number of steps `k`.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Traversal count of every undirected edge, keyed by `(min, max)`.
    pub fn edge_multiplicities(&self) -> FxHashMap<(usize, usize), usize> {
        let mut m = FxHashMap::default();
        for w in self.vertices.windows(2) {
            *m.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0) += 1;
        }
        m
    }

    /// Every way this walk fails to be a covering path of `h` from `x` to `y`
    /// with edge multiplicities at most 2 and length at most `2 M #V(H)`.
    pub fn violations(&self, h: &WeightedGraph, x: usize, y: usize) -> Vec<CoverViolation> {
        let mut out = Vec::new();
        for (i, w) in self.vertices.windows(2).enumerate() {
            if !h.is_adjacent(w[0], w[1]) {
                out.push(CoverViolation::NotAdjacent { index: i });
            }
        }
        let mut seen = vec![false; h.vertex_count()];
        for &v in &self.vertices {
            if v < seen.len() {
                seen[v] = true;
            }
        }
        out.extend(seen.iter().enumerate().filter(|(_, s)| !**s).map(|(v, _)| CoverViolation::Uncovered { vertex: v }));
        let mut mult: Vec<_> = self.edge_multiplicities().into_iter().filter(|&(_, c)| c > 2).collect();
        mult.sort_unstable();
        out.extend(mult.into_iter().map(|(edge, count)| CoverViolation::Multiplicity { edge, count }));
        let (first, last) = (self.vertices[0], *self.vertices.last().unwrap());
        if first != x || last != y {
            out.push(CoverViolation::Endpoints { first, last });
        }
        let bound = 2 * h.max_degree() * h.vertex_count();
        if self.len() > bound {
            out.push(CoverViolation::TooLong { length: self.len(), bound });
        }
        out
    }
}

fn check_endpoints(h: &WeightedGraph, x: usize, y: usize) -> Result<()> {
    h.check_vertex(x)?;
    h.check_vertex(y)
}

/// BFS spanning tree of the vertices accepted by `inside`, rooted at `x`.
/// Returns parents (`usize::MAX` for the root and outside vertices) and
/// children lists in increasing id order.
fn bfs_tree(
    h: &WeightedGraph,
    x: usize,
    inside: &dyn Fn(usize) -> bool,
) -> (Vec<usize>, Vec<Vec<usize>>, usize) {
    let n = h.vertex_count();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut children = vec![Vec::new(); n];
    let mut queue = VecDeque::from([x]);
    seen[x] = true;
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for &w in h.neighbor_ids(v) {
            let w = w as usize;
            if !seen[w] && inside(w) {
                seen[w] = true;
                parent[w] = v;
                children[v].push(w);
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    (parent, children, reached)
}

/// Depth-first exploration of a BFS spanning tree of the `inside` vertices,
/// from `x` to `y`. At every ancestor of `y` the branch containing `y` is
/// explored last and the walk stops on its final arrival at `y`, so its
/// length is `2 (k - 1) - d_T(x, y)` for `k` inside vertices.
pub(crate) fn tree_cover_in(
    h: &WeightedGraph,
    inside: &dyn Fn(usize) -> bool,
    size: usize,
    x: usize,
    y: usize,
) -> Result<Vec<usize>> {
    let (parent, mut children, reached) = bfs_tree(h, x, inside);
    if reached != size {
        return Err(LabError::SubgraphDisconnected);
    }
    // move each child on the x..y tree path to the end of its parent's list
    let mut v = y;
    while v != x {
        let p = parent[v];
        let list = &mut children[p];
        let i = list.iter().position(|&c| c == v).expect("tree child");
        list.remove(i);
        list.push(v);
        v = p;
    }
    let on_spine = {
        let mut s = vec![false; h.vertex_count()];
        let mut v = y;
        s[v] = true;
        while v != x {
            v = parent[v];
            s[v] = true;
        }
        s
    };
    let mut walk = vec![x];
    // iterative DFS; frames are (vertex, next child index)
    let mut stack: Vec<(usize, usize)> = vec![(x, 0)];
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        if v == y && *i == children[v].len() {
            break;
        }
        if *i < children[v].len() {
            let c = children[v][*i];
            *i += 1;
            walk.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            let p = stack.last().expect("spine vertices are never popped").0;
            debug_assert!(!on_spine[v]);
            walk.push(p);
        }
    }
    Ok(walk)
}

/// Spanning-tree exploration from `x` back to `x`: every tree edge is
/// crossed exactly twice and the length is `2 (#V(H) - 1)`.
pub fn cover_path_tree(h: &WeightedGraph, x: usize) -> Result<CoverPath> {
    cover_path_tree_to(h, x, x)
}

/// Spanning-tree exploration from `x` ending at `y`.
pub fn cover_path_tree_to(h: &WeightedGraph, x: usize, y: usize) -> Result<CoverPath> {
    check_endpoints(h, x, y)?;
    let vertices = tree_cover_in(h, &|_| true, h.vertex_count(), x, y)?;
    Ok(CoverPath { vertices })
}

/// Depth-first walk from `x` that backtracks along the DFS tree and stops as
/// soon as every vertex has been seen.
pub fn dfs_cover_walk(h: &WeightedGraph, x: usize) -> Result<Vec<usize>> {
    h.check_vertex(x)?;
    let n = h.vertex_count();
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut count = 1;
    let mut walk = vec![x];
    let mut stack = vec![(x, 0usize)];
    while count < n {
        let Some(&mut (v, ref mut i)) = stack.last_mut() else {
            return Err(LabError::SubgraphDisconnected);
        };
        let nbrs = h.neighbor_ids(v);
        if *i < nbrs.len() {
            let w = nbrs[*i] as usize;
            *i += 1;
            if !seen[w] {
                seen[w] = true;
                count += 1;
                walk.push(w);
                stack.push((w, 0));
            }
        } else {
            stack.pop();
            match stack.last() {
                Some(&(p, _)) => walk.push(p),
                None => return Err(LabError::SubgraphDisconnected),
            }
        }
    }
    Ok(walk)
}

fn shortest_path(h: &WeightedGraph, from: usize, to: usize) -> Vec<usize> {
    let n = h.vertex_count();
    let mut parent = vec![usize::MAX; n];
    parent[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in h.neighbor_ids(v) {
            let w = w as usize;
            if parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = parent[v];
        path.push(v);
    }
    path.reverse();
    path
}

/// One surgery: the multiplicity of `edge` dropped from `before` to `before - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurgeryStep {
    pub edge: (usize, usize),
    pub before: usize,
    pub length_before: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryOutcome {
    pub path: CoverPath,
    pub initial_length: usize,
    pub steps: Vec<SurgeryStep>,
}

/// Reduce every edge multiplicity of `walk` to at most 2.
///
/// While some edge is traversed three or more times, two of those
/// traversals, at `s < t`, go the same direction `a -> b`. The walk
/// `u_0..u_s, u_{t-1}, .., u_{s+1}, u_{t+2}, ..` drops exactly those two
/// traversals and keeps the vertex set and both endpoints.
pub fn surgery_from(h: &WeightedGraph, walk: Vec<usize>) -> Result<SurgeryOutcome> {
    if walk.is_empty() {
        return Err(LabError::param("surgery needs a nonempty walk"));
    }
    for w in walk.windows(2) {
        if !h.is_adjacent(w[0], w[1]) {
            return Err(LabError::param(format!("walk steps between non-adjacent vertices {} and {}", w[0], w[1])));
        }
    }
    let initial_length = walk.len() - 1;
    let mut u = walk;
    let mut steps = Vec::new();
    loop {
        let path = CoverPath { vertices: u };
        let mut heavy: Vec<((usize, usize), usize)> =
            path.edge_multiplicities().into_iter().filter(|&(_, c)| c >= 3).collect();
        u = path.vertices;
        if heavy.is_empty() {
            break;
        }
        heavy.sort_unstable();
        let (edge, before) = heavy[0];
        let traversals: Vec<usize> = (0..u.len() - 1)
            .filter(|&i| (u[i].min(u[i + 1]), u[i].max(u[i + 1])) == edge)
            .collect();
        let (s, t) = same_direction_pair(&u, &traversals);
        let mut next = Vec::with_capacity(u.len() - 2);
        next.extend_from_slice(&u[..=s]);
        next.extend(u[s + 1..t].iter().rev());
        next.extend_from_slice(&u[t + 2..]);
        steps.push(SurgeryStep { edge, before, length_before: u.len() - 1 });
        u = next;
    }
    Ok(SurgeryOutcome { path: CoverPath { vertices: u }, initial_length, steps })
}

fn same_direction_pair(u: &[usize], traversals: &[usize]) -> (usize, usize) {
    for (i, &s) in traversals.iter().enumerate() {
        for &t in &traversals[i + 1..] {
            if u[s] == u[t] {
                return (s, t);
            }
        }
    }
    unreachable!("three traversals of one edge include two in the same direction")
}

/// A covering path from `x` to `y` with every edge used at most twice:
/// a DFS covering walk, a shortest path on to `y`, then surgery.
pub fn cover_path_surgery(h: &WeightedGraph, x: usize, y: usize) -> Result<CoverPath> {
    check_endpoints(h, x, y)?;
    let mut walk = dfs_cover_walk(h, x)?;
    let end = *walk.last().unwrap();
    walk.extend(shortest_path(h, end, y).into_iter().skip(1));
    Ok(surgery_from(h, walk)?.path)
}
