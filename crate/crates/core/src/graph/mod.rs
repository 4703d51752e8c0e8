//! Immutable weighted graphs and their metric primitives.
//!
//! A [`WeightedGraph`] stores symmetric positive conductances `mu_xy` in CSR
//! form. Each undirected edge is written into both adjacency rows from the
//! same `f64`, so `mu_xy == mu_yx` holds bit for bit. The vertex measure
//! `m(x) = sum_y mu_xy` is cached, as are per-row cumulative weights used by
//! the inverse-CDF walk step.

mod edgelist;
mod metric;

pub use edgelist::{load_graph, parse_edge_list, save_graph, write_edge_list};
pub use metric::{
    ball_volume, bfs_distances, graph_distance, graph_stats, graph_stats_window, Ball, GraphStats,
    VolumeSample,
};

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::error::{LabError, Result};

/// One undirected input edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, weight: f64) -> Self {
        Edge { u, v, weight }
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((u, v, weight): (usize, usize, f64)) -> Self {
        Edge { u, v, weight }
    }
}

/// Generator-provided annotations. None of this affects the walk kernel.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GraphMeta {
    pub family: String,
    /// Vertices whose degree differs from the infinite-graph pattern.
    pub boundary: Vec<usize>,
    /// Apex of a one-sided (wedge) construction. It belongs to the modeled
    /// infinite graph, so the boundary guard does not count it.
    pub origin: Option<usize>,
    /// A designated start vertex away from the boundary.
    pub interior: Option<usize>,
    /// Nominal walk dimension of the family, used by the boundary guard.
    pub walk_dim: Option<f64>,
    /// Optional integer coordinates, `dim` values per vertex.
    pub coord_dim: usize,
    pub coords: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    measure: Vec<f64>,
    edges: Vec<Edge>,
    max_degree: usize,
    max_measure: f64,
    meta: GraphMeta,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.offsets == other.offsets
            && self.targets == other.targets
            && self.weights.iter().map(|w| w.to_bits()).eq(other.weights.iter().map(|w| w.to_bits()))
    }
}

/// Build a graph from an edge list, validating every standing assumption.
pub fn build_graph<E: Into<Edge> + Copy>(edges: &[E], n_vertices: usize) -> Result<WeightedGraph> {
    WeightedGraph::from_edges(edges.iter().map(|&e| e.into()).collect(), n_vertices, GraphMeta::default())
}

impl WeightedGraph {
    pub fn from_edges(edges: Vec<Edge>, n: usize, meta: GraphMeta) -> Result<Self> {
        if n == 0 {
            return Err(LabError::EmptyGraph);
        }
        if n > u32::MAX as usize {
            return Err(LabError::param("vertex count exceeds u32 ids"));
        }
        let mut seen: FxHashMap<(usize, usize), usize> = FxHashMap::default();
        seen.reserve(edges.len());
        let mut degree = vec![0usize; n];
        for (index, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(LabError::VertexOutOfRange { index, u: e.u, v: e.v, n });
            }
            if e.u == e.v {
                return Err(LabError::SelfLoop { index, u: e.u });
            }
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(LabError::NonPositiveWeight { index, u: e.u, v: e.v, weight: e.weight });
            }
            let key = (e.u.min(e.v), e.u.max(e.v));
            if let Some(&first) = seen.get(&key) {
                return Err(LabError::DuplicateEdge { index, first, u: e.u, v: e.v });
            }
            seen.insert(key, index);
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        drop(seen);

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let slots = *offsets.last().unwrap();
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; slots];
        let mut weights = vec![0.0; slots];
        for e in &edges {
            targets[fill[e.u]] = e.v as u32;
            weights[fill[e.u]] = e.weight;
            fill[e.u] += 1;
            targets[fill[e.v]] = e.u as u32;
            weights[fill[e.v]] = e.weight;
            fill[e.v] += 1;
        }
        // rows sorted by neighbor id
        for x in 0..n {
            let (a, b) = (offsets[x], offsets[x + 1]);
            if b - a > 1 {
                let mut row: Vec<(u32, f64)> =
                    targets[a..b].iter().copied().zip(weights[a..b].iter().copied()).collect();
                row.sort_by_key(|r| r.0);
                for (i, (t, w)) in row.into_iter().enumerate() {
                    targets[a + i] = t;
                    weights[a + i] = w;
                }
            }
        }
        let mut cumulative = vec![0.0; slots];
        let mut measure = vec![0.0; n];
        for x in 0..n {
            let mut acc = 0.0;
            for s in offsets[x]..offsets[x + 1] {
                acc += weights[s];
                cumulative[s] = acc;
            }
            measure[x] = acc;
        }
        let max_degree = degree.iter().copied().max().unwrap_or(0);
        let max_measure = measure.iter().copied().fold(0.0, f64::max);
        let g = WeightedGraph { offsets, targets, weights, cumulative, measure, edges, max_degree, max_measure, meta };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &y in self.neighbor_ids(x) {
                let y = y as usize;
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(b) => Err(LabError::Disconnected { a: 0, b }),
            None => Ok(()),
        }
    }

    pub fn with_meta(mut self, meta: GraphMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut GraphMeta {
        &mut self.meta
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Input edges in their original order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn measure(&self, x: usize) -> f64 {
        self.measure[x]
    }

    pub fn max_measure(&self) -> f64 {
        self.max_measure
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    #[inline]
    pub fn neighbor_ids(&self, x: usize) -> &[u32] {
        &self.targets[self.offsets[x]..self.offsets[x + 1]]
    }

    #[inline]
    pub fn neighbor_weights(&self, x: usize) -> &[f64] {
        &self.weights[self.offsets[x]..self.offsets[x + 1]]
    }

    /// `(neighbor, mu)` pairs of `x`, ordered by neighbor id.
    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighbor_ids(x).iter().map(|&y| y as usize).zip(self.neighbor_weights(x).iter().copied())
    }

    /// Conductance `mu_xy`, zero when `x` and `y` are not adjacent.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.neighbors(x).find(|&(z, _)| z == y).map_or(0.0, |(_, w)| w)
    }

    /// One-step transition probability `p(x, y) = mu_xy / m(x)`.
    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.weight(x, y) / self.measure[x]
    }

    pub fn is_adjacent(&self, x: usize, y: usize) -> bool {
        self.neighbor_ids(x).binary_search(&(y as u32)).is_ok()
    }

    /// Inverse-CDF neighbor selection: the first neighbor whose cumulative
    /// weight exceeds `u * m(x)`.
    #[inline]
    pub fn walk_step(&self, x: usize, u: f64) -> usize {
        let (a, b) = (self.offsets[x], self.offsets[x + 1]);
        let target = u * self.measure[x];
        let cum = &self.cumulative[a..b];
        let i = if cum.len() <= 8 {
            cum.iter().position(|&c| c > target).unwrap_or(cum.len() - 1)
        } else {
            cum.partition_point(|&c| c <= target).min(cum.len() - 1)
        };
        self.targets[a + i] as usize
    }

    /// `min_{x~y} mu_xy / m(x)`.
    pub fn p0(&self) -> f64 {
        (0..self.vertex_count())
            .flat_map(|x| self.neighbor_weights(x).iter().map(move |w| w / self.measure[x]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_boundary(&self, x: usize) -> bool {
        self.meta.boundary.contains(&x)
    }

    /// `mask[v]` is true for boundary vertices.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.vertex_count()];
        for &b in &self.meta.boundary {
            if b < mask.len() {
                mask[b] = true;
            }
        }
        mask
    }

    pub fn coords(&self, x: usize) -> Option<&[i64]> {
        let d = self.meta.coord_dim;
        if d == 0 || self.meta.coords.len() < (x + 1) * d {
            None
        } else {
            Some(&self.meta.coords[x * d..(x + 1) * d])
        }
    }

    /// Hops from `x` to the nearest boundary vertex other than the wedge
    /// origin; `None` when the graph carries no boundary annotation.
    pub fn boundary_clearance(&self, x: usize) -> Option<usize> {
        let mut flags = vec![false; self.vertex_count()];
        let mut any = false;
        for &b in &self.meta.boundary {
            if Some(b) != self.meta.origin {
                flags[b] = true;
                any = true;
            }
        }
        if !any {
            return None;
        }
        let dist = bfs_distances(self, x);
        (0..self.vertex_count()).filter(|&v| flags[v]).map(|v| dist[v] as usize).min()
    }

    /// Induced subgraph on `vertices` (relabelled `0..k` in the given order).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<WeightedGraph> {
        let mut index: FxHashMap<usize, usize> = FxHashMap::default();
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.vertex_count() {
                return Err(LabError::InvalidVertex { vertex: v, n: self.vertex_count() });
            }
            index.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for (w, mu) in self.neighbors(v) {
                if let Some(&j) = index.get(&w) {
                    if i < j {
                        edges.push(Edge::new(i, j, mu));
                    }
                }
            }
        }
        WeightedGraph::from_edges(edges, vertices.len(), GraphMeta::default())
            .map_err(|e| match e {
                LabError::Disconnected { .. } => LabError::SubgraphDisconnected,
                other => other,
            })
    }

    pub(crate) fn check_vertex(&self, x: usize) -> Result<()> {
        if x < self.vertex_count() {
            Ok(())
        } else {
            Err(LabError::InvalidVertex { vertex: x, n: self.vertex_count() })
        }
    }
}
