//! What a random walk needs from its state space.
//!
//! The simulators are generic over [`WalkGraph`] so that very large boxes of
//! `Z^d` can be walked without materializing their adjacency: [`LatticeBox`]
//! computes neighbors from coordinates and selects them in exactly the same
//! order as the explicit lattice from [`crate::generators::make_lattice`].

use crate::graph::{bfs_distances, WeightedGraph};

pub trait WalkGraph: Sync {
    fn vertex_count(&self) -> usize;
    fn measure(&self, x: usize) -> f64;
    fn max_measure(&self) -> f64;
    fn max_degree(&self) -> usize;
    /// Neighbor of `x` selected by the uniform draw `u` in `[0, 1)`.
    fn step(&self, x: usize, u: f64) -> usize;
    /// Hop distances from `origin`, for displacement tracking.
    fn displacement(&self, origin: usize) -> Displacement<'_>;
    /// Hops from `x` to the truncation boundary, if annotated.
    fn boundary_clearance(&self, x: usize) -> Option<usize>;
    fn walk_dim_hint(&self) -> Option<f64>;
}

pub enum Displacement<'a> {
    Table(Vec<u32>),
    Lattice { lattice: &'a LatticeBox, origin: Vec<i64> },
}

impl Displacement<'_> {
    #[inline]
    pub fn distance(&self, x: usize) -> u32 {
        match self {
            Displacement::Table(t) => t[x],
            Displacement::Lattice { lattice, origin } => {
                let mut rest = x;
                let mut d = 0i64;
                for &o in origin.iter() {
                    let c = (rest % lattice.side) as i64 - lattice.radius as i64;
                    rest /= lattice.side;
                    d += (c - o).abs();
                }
                d as u32
            }
        }
    }
}

impl WalkGraph for WeightedGraph {
    fn vertex_count(&self) -> usize {
        WeightedGraph::vertex_count(self)
    }
    fn measure(&self, x: usize) -> f64 {
        WeightedGraph::measure(self, x)
    }
    fn max_measure(&self) -> f64 {
        WeightedGraph::max_measure(self)
    }
    fn max_degree(&self) -> usize {
        WeightedGraph::max_degree(self)
    }
    #[inline]
    fn step(&self, x: usize, u: f64) -> usize {
        self.walk_step(x, u)
    }
    fn displacement(&self, origin: usize) -> Displacement<'_> {
        Displacement::Table(bfs_distances(self, origin))
    }
    fn boundary_clearance(&self, x: usize) -> Option<usize> {
        WeightedGraph::boundary_clearance(self, x)
    }
    fn walk_dim_hint(&self) -> Option<f64> {
        self.meta().walk_dim
    }
}

/// Implicit unit-weight box `{-radius..radius}^dim` of `Z^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBox {
    dim: usize,
    radius: usize,
    side: usize,
    strides: Vec<usize>,
}

impl LatticeBox {
    pub fn new(dim: usize, radius: usize) -> crate::Result<Self> {
        if !(1..=4).contains(&dim) || radius == 0 {
            return Err(crate::LabError::param(format!("lattice box needs dim in 1..=4 and radius >= 1, got dim {dim}, radius {radius}")));
        }
        let side = 2 * radius + 1;
        let total = (side as u128).pow(dim as u32);
        if total > u32::MAX as u128 {
            return Err(crate::LabError::param(format!("lattice box with {total} vertices exceeds u32 ids")));
        }
        let strides = (0..dim).map(|i| side.pow(i as u32)).collect();
        Ok(LatticeBox { dim, radius, side, strides })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn center(&self) -> usize {
        self.encode(&vec![0; self.dim])
    }

    pub fn encode(&self, coords: &[i64]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| (c + self.radius as i64) as usize * s)
            .sum()
    }

    pub fn decode(&self, x: usize) -> Vec<i64> {
        let mut rest = x;
        (0..self.dim)
            .map(|_| {
                let c = (rest % self.side) as i64 - self.radius as i64;
                rest /= self.side;
                c
            })
            .collect()
    }

    #[inline]
    fn coord(&self, x: usize, axis: usize) -> usize {
        (x / self.strides[axis]) % self.side
    }

    #[inline]
    fn degree(&self, x: usize) -> usize {
        (0..self.dim)
            .map(|a| {
                let c = self.coord(x, a);
                (c > 0) as usize + (c + 1 < self.side) as usize
            })
            .sum()
    }
}

impl WalkGraph for LatticeBox {
    fn vertex_count(&self) -> usize {
        self.side.pow(self.dim as u32)
    }
    fn measure(&self, x: usize) -> f64 {
        self.degree(x) as f64
    }
    fn max_measure(&self) -> f64 {
        (2 * self.dim) as f64
    }
    fn max_degree(&self) -> usize {
        2 * self.dim
    }
    #[inline]
    fn step(&self, x: usize, u: f64) -> usize {
        // neighbor order matches sorted ids: -e_{d-1} .. -e_0, +e_0 .. +e_{d-1}
        let mut nbrs = [0usize; 8];
        let mut k = 0;
        for a in (0..self.dim).rev() {
            if self.coord(x, a) > 0 {
                nbrs[k] = x - self.strides[a];
                k += 1;
            }
        }
        for a in 0..self.dim {
            if self.coord(x, a) + 1 < self.side {
                nbrs[k] = x + self.strides[a];
                k += 1;
            }
        }
        let i = ((u * k as f64) as usize).min(k - 1);
        nbrs[i]
    }
    fn displacement(&self, origin: usize) -> Displacement<'_> {
        Displacement::Lattice { lattice: self, origin: self.decode(origin) }
    }
    fn boundary_clearance(&self, x: usize) -> Option<usize> {
        self.decode(x).iter().map(|c| self.radius - c.unsigned_abs() as usize).min()
    }
    fn walk_dim_hint(&self) -> Option<f64> {
        Some(2.0)
    }
}
