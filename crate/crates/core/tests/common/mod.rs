//! Independent oracles and graph corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use lamplab::graph::build_graph;
use lamplab::WeightedGraph;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<i128>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-weight path `0 - 1 - .. - (k-1)`.
pub fn path_graph(k: usize) -> WeightedGraph {
    let edges: Vec<(usize, usize, f64)> = (0..k.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
    build_graph(&edges, k).unwrap()
}

/// Connected random graph: a random spanning tree plus each other pair
/// with probability `p`. Weights are 1 unless `weighted`.
pub fn random_connected(r: &mut ChaCha8Rng, n: usize, p: f64, weighted: bool) -> WeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut pairs = std::collections::BTreeSet::new();
    for i in 1..n {
        let j = r.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        pairs.insert((a.min(b), a.max(b)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if r.gen::<f64>() < p {
                pairs.insert((a, b));
            }
        }
    }
    let edges: Vec<(usize, usize, f64)> = pairs
        .into_iter()
        .map(|(a, b)| (a, b, if weighted { r.gen_range(1..=8) as f64 / 4.0 } else { 1.0 }))
        .collect();
    build_graph(&edges, n).unwrap()
}

/// Integer adjacency of a unit-weight graph.
fn adjacency(g: &WeightedGraph) -> Vec<Vec<usize>> {
    (0..g.vertex_count()).map(|v| g.neighbor_ids(v).iter().map(|&w| w as usize).collect()).collect()
}

/// `P(Y_n = (0, x))` for the switch-walk-switch chain on `Z_2 wr G`, in
/// exact arithmetic, by iterating the full kernel on `(lamps, position)`.
pub fn wreath_return_rational(g: &WeightedGraph, x: usize, n: usize) -> Q {
    let adj = adjacency(g);
    let nv = g.vertex_count();
    let mut dist = vec![Q::from_integer(0); nv << nv];
    dist[x] = Q::from_integer(1);
    for _ in 0..n {
        let mut next = vec![Q::from_integer(0); nv << nv];
        for (id, p) in dist.iter().enumerate() {
            if *p == Q::from_integer(0) {
                continue;
            }
            let (mask, v) = (id / nv, id % nv);
            let share = *p / Q::from_integer((4 * adj[v].len()) as i128);
            for &y in &adj[v] {
                // flip at v or not, move to y, flip at y or not
                for a in [0, 1usize << v] {
                    for b in [0, 1usize << y] {
                        next[(mask ^ a ^ b) * nv + y] += share;
                    }
                }
            }
        }
        dist = next;
    }
    dist[x]
}

/// `E_x[1{X_n = x} 2^{-R_n}]` by enumerating every base path.
pub fn collapsed_rational(g: &WeightedGraph, x: usize, n: usize) -> Q {
    fn rec(adj: &[Vec<usize>], x: usize, v: usize, left: usize, prob: Q, seen: &mut Vec<usize>, acc: &mut Q) {
        if left == 0 {
            if v == x {
                *acc += prob / Q::from_integer(1i128 << seen.len());
            }
            return;
        }
        let p = prob / Q::from_integer(adj[v].len() as i128);
        for &y in &adj[v] {
            let fresh = !seen.contains(&y);
            if fresh {
                seen.push(y);
            }
            rec(adj, x, y, left - 1, p, seen, acc);
            if fresh {
                seen.pop();
            }
        }
    }
    let adj = adjacency(g);
    let mut acc = Q::from_integer(0);
    rec(&adj, x, x, n, Q::from_integer(1), &mut vec![x], &mut acc);
    acc
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Shortest walk from `x` visiting every vertex and ending at `y`, for
/// every `y`, by BFS over `(position, visited set)`.
pub fn min_cover_walks(h: &WeightedGraph, x: usize) -> Vec<usize> {
    let n = h.vertex_count();
    assert!(n <= 16);
    let full = (1usize << n) - 1;
    let mut dist = vec![usize::MAX; n << n];
    let start = (1 << x) * n + x;
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(id) = queue.pop_front() {
        let (mask, v) = (id / n, id % n);
        for &w in h.neighbor_ids(v) {
            let w = w as usize;
            let next = (mask | (1 << w)) * n + w;
            if dist[next] == usize::MAX {
                dist[next] = dist[id] + 1;
                queue.push_back(next);
            }
        }
    }
    (0..n).map(|y| dist[full * n + y]).collect()
}

/// Every vertex subset (as a sorted list) of size at most `max` whose
/// induced subgraph is connected.
pub fn connected_subsets(g: &WeightedGraph, max: usize) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    assert!(n <= 20);
    let mut out = Vec::new();
    for mask in 1usize..(1 << n) {
        if mask.count_ones() as usize > max {
            continue;
        }
        let verts: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let mut seen = 1usize << verts[0];
        let mut stack = vec![verts[0]];
        while let Some(v) = stack.pop() {
            for &w in g.neighbor_ids(v) {
                let w = w as usize;
                if mask >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        if seen == mask {
            out.push(verts);
        }
    }
    out
}

/// `P(X_{2n} = 0)` for simple random walk on `Z`: `C(2n, n) / 4^n`.
pub fn line_return_binomial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / (2 * k) as f64)
}
