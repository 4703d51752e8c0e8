//! Distances in `Z_2 wr G`: cheap two-sided bounds and an exact BFS oracle
//! for small base graphs.

use std::collections::VecDeque;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;

use super::cover::tree_cover_in;
use super::WreathState;

/// Largest base graph accepted by the exact oracle (`2^16 * 16` states).
pub const EXACT_MAX_VERTICES: usize = 16;

/// A connected vertex set containing `from` and every vertex of `required`,
/// grown greedily: repeatedly attach the required vertex nearest to the
/// current set along a shortest path.
pub fn steiner_superset(g: &WeightedGraph, from: usize, required: &[usize]) -> Vec<bool> {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut pending: Vec<usize> = required.to_vec();
    pending.sort_unstable();
    pending.dedup();
    let mut queue = VecDeque::new();
    let mut grow = |vs: &[usize], inside: &mut Vec<bool>, dist: &mut Vec<u32>, parent: &mut Vec<usize>| {
        for &v in vs {
            inside[v] = true;
            dist[v] = 0;
            queue.push_back(v);
        }
        // distances only shrink, so relax from the new sources outward
        while let Some(v) = queue.pop_front() {
            let dv = dist[v] + 1;
            for &w in g.neighbor_ids(v) {
                let w = w as usize;
                if dv < dist[w] {
                    dist[w] = dv;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
    };
    grow(&[from], &mut inside, &mut dist, &mut parent);
    loop {
        pending.retain(|&v| !inside[v]);
        let Some(&next) = pending.iter().min_by_key(|&&v| (dist[v], v)) else {
            break;
        };
        let mut path = Vec::new();
        let mut v = next;
        while !inside[v] {
            path.push(v);
            v = parent[v];
        }
        grow(&path, &mut inside, &mut dist, &mut parent);
    }
    inside
}

/// `(lower, upper)` with `lower <= d(s0, s1) <= upper`.
///
/// `lower` counts lamps that differ. `upper` adds to that count the length
/// of a spanning-tree exploration, from `s0`'s position to `s1`'s, of a
/// connected superset of both positions and all differing lamps.
pub fn lamp_distance_bounds(g: &WeightedGraph, s0: &WreathState, s1: &WreathState) -> Result<(usize, usize)> {
    s0.validate(g.vertex_count())?;
    s1.validate(g.vertex_count())?;
    let diff = s0.lamp_difference(s1);
    let lower = diff.len();
    let (x, y) = (s0.position(), s1.position());
    if lower == 0 && x == y {
        return Ok((0, 0));
    }
    let mut required = diff;
    required.push(y);
    let inside = steiner_superset(g, x, &required);
    let size = inside.iter().filter(|&&b| b).count();
    let walk = tree_cover_in(g, &|v| inside[v], size, x, y)?;
    Ok((lower, walk.len() - 1 + lower))
}

/// Exact distances from one state to every state of `Z_2 wr G`.
pub struct WreathDistances {
    n: usize,
    lamps: u32,
    dist: Vec<u32>,
}

impl WreathDistances {
    fn mask(&self, s: &WreathState) -> usize {
        s.lamps().iter().fold(0usize, |m, &v| m | (1 << v)) ^ self.lamps as usize
    }

    pub fn get(&self, s: &WreathState) -> Result<usize> {
        s.validate(self.n)?;
        Ok(self.dist[self.mask(s) * self.n + s.position()] as usize)
    }

    /// Largest distance from the source.
    pub fn eccentricity(&self) -> usize {
        self.dist.iter().copied().max().unwrap_or(0) as usize
    }
}

/// BFS over all `2^N * N` states from `s0`, using walk edges `(f, x) ~ (f, y)`
/// for `x ~ y` and flip edges `(f, x) ~ (f + 1_x, x)`.
pub fn wreath_distances_from(g: &WeightedGraph, s0: &WreathState) -> Result<WreathDistances> {
    let n = g.vertex_count();
    if n > EXACT_MAX_VERTICES {
        return Err(LabError::TooLarge(format!(
            "exact wreath distances need at most {EXACT_MAX_VERTICES} base vertices, got {n}"
        )));
    }
    s0.validate(n)?;
    // distances are invariant under xoring every lamp configuration by
    // s0's lamps, so search from the all-off configuration
    let lamps = s0.lamps().iter().fold(0u32, |m, &v| m | (1 << v));
    let states = n << n;
    let mut dist = vec![u32::MAX; states];
    let start = s0.position();
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(id) = queue.pop_front() {
        let (mask, x) = (id / n, id % n);
        let d = dist[id] + 1;
        let flip = (mask ^ (1 << x)) * n + x;
        if dist[flip] == u32::MAX {
            dist[flip] = d;
            queue.push_back(flip);
        }
        for &y in g.neighbor_ids(x) {
            let next = mask * n + y as usize;
            if dist[next] == u32::MAX {
                dist[next] = d;
                queue.push_back(next);
            }
        }
    }
    Ok(WreathDistances { n, lamps, dist })
}

/// Exact graph distance in `Z_2 wr G` for `#V(G) <= 16`.
pub fn wreath_distance_exact(g: &WeightedGraph, s0: &WreathState, s1: &WreathState) -> Result<usize> {
    wreath_distances_from(g, s0)?.get(s1)
}
