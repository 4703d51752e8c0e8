//! Graph families: `Z^d` boxes, pre-Sierpinski gaskets and carpets.

use std::path::PathBuf;

use rustc_hash::FxHashMap;

use crate::error::{LabError, Result};
use crate::graph::{load_graph, Edge, GraphMeta, WeightedGraph};

pub const GASKET_MAX_LEVEL: u32 = 12;
pub const CARPET_MAX_LEVEL: u32 = 7;
const LATTICE_MAX_VERTICES: u128 = 100_000_000;

/// `log 5 / log 2`, the walk dimension of the Sierpinski gasket.
pub fn gasket_walk_dim() -> f64 {
    5f64.ln() / 2f64.ln()
}

/// Numerical estimate of the carpet's walk dimension; no closed form exists.
pub const CARPET_WALK_DIM: f64 = 2.097;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Lattice { dim: usize, radius: usize },
    Gasket { level: u32 },
    Carpet { level: u32 },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub weight: f64,
}

impl GeneratorSpec {
    pub fn new(family: Family) -> Self {
        GeneratorSpec { family, weight: 1.0 }
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        if !(self.weight > 0.0) {
            return Err(LabError::param(format!("edge weight must be positive, got {}", self.weight)));
        }
        let uniform = self.weight != 1.0;
        let g = match &self.family {
            Family::Lattice { dim, radius } => return make_lattice(*dim, *radius, self.weight),
            Family::Gasket { level } => make_gasket(*level)?,
            Family::Carpet { level } => make_carpet(*level)?,
            Family::File { path } => return load_graph(path),
        };
        if uniform {
            reweight(g, self.weight)
        } else {
            Ok(g)
        }
    }

    /// Stable short label used in CSV output.
    pub fn label(&self) -> String {
        match &self.family {
            Family::Lattice { dim, radius } => format!("lattice-d{dim}-r{radius}"),
            Family::Gasket { level } => format!("gasket-L{level}"),
            Family::Carpet { level } => format!("carpet-L{level}"),
            Family::File { path } => format!("file-{}", path.display()),
        }
    }
}

fn reweight(g: WeightedGraph, w: f64) -> Result<WeightedGraph> {
    let edges = g.edges().iter().map(|e| Edge::new(e.u, e.v, w)).collect();
    WeightedGraph::from_edges(edges, g.vertex_count(), g.meta().clone())
}

/// Box `{-radius..radius}^d` with nearest-neighbor edges of weight `weight`.
///
/// Vertex ids are mixed-radix: `id = sum_i (c_i + radius) * side^i`.
pub fn make_lattice(d: usize, radius: usize, weight: f64) -> Result<WeightedGraph> {
    if !(1..=4).contains(&d) {
        return Err(LabError::param(format!("lattice dimension must be in 1..=4, got {d}")));
    }
    if radius == 0 {
        return Err(LabError::param("lattice radius must be at least 1"));
    }
    let side = 2 * radius + 1;
    let total = (side as u128).pow(d as u32);
    if total > LATTICE_MAX_VERTICES {
        return Err(LabError::param(format!("lattice would have {total} vertices (limit 10^8)")));
    }
    let n = total as usize;
    let strides: Vec<usize> = (0..d).map(|i| side.pow(i as u32)).collect();
    let mut edges = Vec::with_capacity(n * d);
    let mut coords = Vec::with_capacity(n * d);
    let mut boundary = Vec::new();
    for x in 0..n {
        let mut on_boundary = false;
        for (axis, &s) in strides.iter().enumerate() {
            let c = (x / s) % side;
            coords.push(c as i64 - radius as i64);
            if c == 0 || c + 1 == side {
                on_boundary = true;
            }
            if c + 1 < side {
                edges.push(Edge::new(x, x + strides[axis], weight));
            }
        }
        if on_boundary {
            boundary.push(x);
        }
    }
    let center: usize = strides.iter().map(|s| radius * s).sum();
    let meta = GraphMeta {
        family: format!("lattice-d{d}"),
        boundary,
        origin: None,
        interior: Some(center),
        walk_dim: Some(2.0),
        coord_dim: d,
        coords,
    };
    WeightedGraph::from_edges(edges, n, meta)
}

/// Level-`level` one-sided pre-Sierpinski gasket with unit weights.
///
/// Coordinates are in the triangular basis: the big triangle has corners
/// `(0,0)`, `(2^L,0)` and `(0,2^L)`. Vertex 0 is the apex `(0,0)`.
pub fn make_gasket(level: u32) -> Result<WeightedGraph> {
    if level > GASKET_MAX_LEVEL {
        return Err(LabError::param(format!("gasket level must be in 0..={GASKET_MAX_LEVEL}, got {level}")));
    }
    let side = 1i64 << level;
    let expected = 3 * (3usize.pow(level) + 1) / 2;
    let mut ids: FxHashMap<(i64, i64), usize> = FxHashMap::default();
    ids.reserve(expected);
    let mut coords: Vec<i64> = Vec::with_capacity(2 * expected);
    let mut edges = Vec::with_capacity(3usize.pow(level + 1));
    let mut id_of = |p: (i64, i64), coords: &mut Vec<i64>| -> usize {
        let next = ids.len();
        *ids.entry(p).or_insert_with(|| {
            coords.push(p.0);
            coords.push(p.1);
            next
        })
    };
    // depth-first subdivision, lower-left child first so the apex gets id 0
    let mut stack = vec![(0i64, 0i64, side)];
    while let Some((a, b, s)) = stack.pop() {
        if s == 1 {
            let p = id_of((a, b), &mut coords);
            let q = id_of((a + 1, b), &mut coords);
            let r = id_of((a, b + 1), &mut coords);
            edges.push(Edge::new(p, q, 1.0));
            edges.push(Edge::new(q, r, 1.0));
            edges.push(Edge::new(r, p, 1.0));
        } else {
            let h = s / 2;
            stack.push((a, b + h, h));
            stack.push((a + h, b, h));
            stack.push((a, b, h));
        }
    }
    let n = ids.len();
    debug_assert_eq!(n, expected);
    let corner = |p: (i64, i64)| ids[&p];
    let boundary = vec![corner((0, 0)), corner((side, 0)), corner((0, side))];
    let interior = (level >= 2).then(|| corner((side / 4, side / 4)));
    let meta = GraphMeta {
        family: "gasket".into(),
        boundary,
        origin: Some(0),
        interior,
        walk_dim: Some(gasket_walk_dim()),
        coord_dim: 2,
        coords,
    };
    WeightedGraph::from_edges(edges, n, meta)
}

/// Is cell `(x, y)` of the `3^level` grid retained in the pre-carpet?
pub fn carpet_cell_retained(mut x: usize, mut y: usize, level: u32) -> bool {
    for _ in 0..level {
        if x % 3 == 1 && y % 3 == 1 {
            return false;
        }
        x /= 3;
        y /= 3;
    }
    true
}

/// Level-`level` pre-Sierpinski carpet as a cell-adjacency graph.
///
/// Retained cells are numbered row-major (`y` outer, `x` inner).
pub fn make_carpet(level: u32) -> Result<WeightedGraph> {
    if level > CARPET_MAX_LEVEL {
        return Err(LabError::param(format!("carpet level must be in 0..={CARPET_MAX_LEVEL}, got {level}")));
    }
    let side = 3usize.pow(level);
    let mut index = vec![u32::MAX; side * side];
    let mut coords = Vec::new();
    let mut n = 0usize;
    for y in 0..side {
        for x in 0..side {
            if carpet_cell_retained(x, y, level) {
                index[y * side + x] = n as u32;
                coords.push(x as i64);
                coords.push(y as i64);
                n += 1;
            }
        }
    }
    let mut edges = Vec::with_capacity(2 * n);
    let mut boundary = Vec::new();
    for y in 0..side {
        for x in 0..side {
            let id = index[y * side + x];
            if id == u32::MAX {
                continue;
            }
            if x == 0 || y == 0 || x + 1 == side || y + 1 == side {
                boundary.push(id as usize);
            }
            if x + 1 < side && index[y * side + x + 1] != u32::MAX {
                edges.push(Edge::new(id as usize, index[y * side + x + 1] as usize, 1.0));
            }
            if y + 1 < side && index[(y + 1) * side + x] != u32::MAX {
                edges.push(Edge::new(id as usize, index[(y + 1) * side + x] as usize, 1.0));
            }
        }
    }
    // retained cell nearest the center, smallest id on ties
    let c = side as i64 / 2;
    let interior = (0..n).min_by_key(|&i| (coords[2 * i] - c).abs() + (coords[2 * i + 1] - c).abs());
    let meta = GraphMeta {
        family: "carpet".into(),
        boundary,
        origin: None,
        interior,
        walk_dim: Some(CARPET_WALK_DIM),
        coord_dim: 2,
        coords,
    };
    WeightedGraph::from_edges(edges, n, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_distance;

    #[test]
    fn small_lattices() {
        let g = make_lattice(1, 2, 1.0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 4));
        let g = make_lattice(2, 1, 1.0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (9, 12));
        assert_eq!(g.meta().boundary.len(), 8);
        assert!(make_lattice(5, 1, 1.0).is_err());
        assert!(make_lattice(2, 0, 1.0).is_err());
        assert!(make_lattice(4, 60, 1.0).is_err());
    }

    #[test]
    fn lattice_interior_degree_audit() {
        let g = make_lattice(3, 20, 1.0).unwrap();
        for x in 0..g.vertex_count() {
            if g.is_boundary(x) {
                assert!(g.degree(x) < 6);
            } else {
                assert_eq!(g.degree(x), 6);
            }
        }
    }

    #[test]
    fn gasket_counts() {
        let g0 = make_gasket(0).unwrap();
        assert_eq!((g0.vertex_count(), g0.edge_count()), (3, 3));
        let g1 = make_gasket(1).unwrap();
        assert_eq!((g1.vertex_count(), g1.edge_count()), (6, 9));
        let mut n = 3usize;
        for level in 1..=8 {
            n = 3 * n - 3;
            assert_eq!(make_gasket(level).unwrap().vertex_count(), n);
        }
        assert_eq!(n, 9843);
        assert!(make_gasket(13).is_err());
    }

    #[test]
    fn gasket_degrees() {
        for level in 0..=6 {
            let g = make_gasket(level).unwrap();
            assert_eq!(g.meta().boundary.len(), 3);
            for x in 0..g.vertex_count() {
                let expected = if g.is_boundary(x) { 2 } else { 4 };
                assert_eq!(g.degree(x), expected, "level {level} vertex {x}");
            }
        }
    }

    #[test]
    fn gasket_corner_to_corner_distance() {
        let g = make_gasket(2).unwrap();
        assert_eq!(g.vertex_count(), 15);
        let b = g.meta().boundary.clone();
        assert_eq!(graph_distance(&g, b[0], b[1]).unwrap(), 4);
        assert_eq!(graph_distance(&g, b[1], b[2]).unwrap(), 4);
        assert_eq!(b[0], 0);
    }

    #[test]
    fn carpet_counts() {
        let g1 = make_carpet(1).unwrap();
        assert_eq!((g1.vertex_count(), g1.edge_count()), (8, 8));
        assert!((0..8).all(|x| g1.degree(x) == 2));
        for level in 0..=4 {
            assert_eq!(make_carpet(level).unwrap().vertex_count(), 8usize.pow(level));
        }
        assert!(make_carpet(8).is_err());
    }

    #[test]
    fn spec_builds_with_weight() {
        let spec = GeneratorSpec { family: Family::Gasket { level: 1 }, weight: 2.5 };
        let g = spec.build().unwrap();
        assert!(g.edges().iter().all(|e| e.weight == 2.5));
        assert_eq!(g.meta().origin, Some(0));
        assert!(GeneratorSpec { family: Family::Carpet { level: 1 }, weight: 0.0 }.build().is_err());
    }
}
