//! Exact `n`-step distributions by sparse gather iteration.
//!
//! Vertices are relabelled in BFS order from the base vertex, so the support
//! after `t` steps is a prefix of the local arrays and each step touches only
//! that prefix.

use std::collections::VecDeque;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;

use super::guard_check;

/// A killed (sub-Markov) chain on a BFS-ordered vertex subset.
pub(crate) struct LocalChain {
    /// Local id to global id; local 0 is the base vertex.
    pub verts: Vec<usize>,
    offsets: Vec<usize>,
    src: Vec<u32>,
    coef: Vec<f64>,
    /// `layer_end[d]` = number of local vertices at distance `<= d`.
    layer_end: Vec<usize>,
}

impl LocalChain {
    /// Vertices reachable from `x` within `max_dist` hops through `allowed`
    /// vertices. Mass that leaves the subset is lost.
    pub fn build(g: &WeightedGraph, x: usize, max_dist: usize, allowed: impl Fn(usize) -> bool) -> Self {
        let mut local = vec![u32::MAX; g.vertex_count()];
        let mut verts = vec![x];
        let mut dist = vec![0u32];
        local[x] = 0;
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[local[v] as usize];
            if dv as usize >= max_dist {
                continue;
            }
            for &w in g.neighbor_ids(v) {
                let w = w as usize;
                if local[w] == u32::MAX && allowed(w) {
                    local[w] = verts.len() as u32;
                    verts.push(w);
                    dist.push(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        let top = *dist.last().unwrap() as usize;
        let mut layer_end = vec![0usize; top + 1];
        for &d in &dist {
            layer_end[d as usize] += 1;
        }
        for d in 1..=top {
            layer_end[d] += layer_end[d - 1];
        }
        let mut offsets = Vec::with_capacity(verts.len() + 1);
        let mut src = Vec::new();
        let mut coef = Vec::new();
        offsets.push(0);
        for &y in &verts {
            for (z, mu) in g.neighbors(y) {
                let lz = local[z];
                if lz != u32::MAX {
                    src.push(lz);
                    coef.push(mu / g.measure(z));
                }
            }
            offsets.push(src.len());
        }
        LocalChain { verts, offsets, src, coef, layer_end }
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    /// Local vertices that can carry mass after `t` steps.
    #[inline]
    pub fn active(&self, t: usize) -> usize {
        self.layer_end[t.min(self.layer_end.len() - 1)]
    }

    /// `next = prev * P` on the prefix reachable after `t + 1` steps.
    #[inline]
    pub fn step(&self, prev: &[f64], next: &mut [f64], t: usize) {
        let end = self.active(t + 1);
        for y in 0..end {
            let (a, b) = (self.offsets[y], self.offsets[y + 1]);
            let mut acc = 0.0;
            for s in a..b {
                acc += prev[self.src[s] as usize] * self.coef[s];
            }
            next[y] = acc;
        }
    }
}

/// `p_n(x, .)` on a truncated vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatVector {
    pub base: usize,
    pub step: usize,
    /// Support lies within this many hops of `base`.
    pub radius: usize,
    /// `(y, p_n(x, y))` sorted by `y`, zero entries omitted.
    pub entries: Vec<(usize, f64)>,
}

impl HeatVector {
    pub fn get(&self, y: usize) -> f64 {
        self.entries.binary_search_by_key(&y, |e| e.0).map_or(0.0, |i| self.entries[i].1)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Keep {
    None,
    All,
    Steps(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct HeatOptions {
    pub keep: Keep,
    /// Bytes allowed for retained vectors.
    pub memory_budget: usize,
    /// Vertices at which the walk is killed on arrival.
    pub killed: Option<Vec<bool>>,
    pub override_guard: bool,
}

impl Default for HeatOptions {
    fn default() -> Self {
        HeatOptions { keep: Keep::None, memory_budget: 1 << 31, killed: None, override_guard: false }
    }
}

#[derive(Debug, Clone)]
pub struct HeatRun {
    pub base: usize,
    /// `p_n(x, x)` for `n = 0..=n_max`.
    pub diagonal: Vec<f64>,
    /// `sum_y p_n(x, y)`; below 1 only under killing.
    pub mass: Vec<f64>,
    pub vectors: Vec<HeatVector>,
}

impl HeatRun {
    /// `p_{2n}(x, x)` for `n = 0..=n_max/2`.
    pub fn even_diagonal(&self) -> Vec<f64> {
        self.diagonal.iter().step_by(2).copied().collect()
    }
}

/// Every `p_n(x, .)` for `n = 0..=n_max`.
pub fn heat_kernel_exact(g: &WeightedGraph, x: usize, n_max: usize) -> Result<HeatRun> {
    heat_kernel_with(g, x, n_max, &HeatOptions { keep: Keep::All, ..Default::default() })
}

pub fn heat_kernel_with(g: &WeightedGraph, x: usize, n_max: usize, opts: &HeatOptions) -> Result<HeatRun> {
    g.check_vertex(x)?;
    if !opts.override_guard {
        guard_check(g, x, n_max as u64)?;
    }
    let chain = match &opts.killed {
        Some(k) => {
            if k.len() != g.vertex_count() {
                return Err(LabError::param("killed mask length differs from vertex count"));
            }
            if k[x] {
                return Err(LabError::param("start vertex lies in the killed set"));
            }
            LocalChain::build(g, x, n_max, |v| !k[v])
        }
        None => LocalChain::build(g, x, n_max, |_| true),
    };
    let wanted = |t: usize| match &opts.keep {
        Keep::None => false,
        Keep::All => true,
        Keep::Steps(s) => s.contains(&t),
    };
    let retained: usize = (0..=n_max).filter(|&t| wanted(t)).map(|t| chain.active(t) * 16).sum();
    let working = chain.len() * 16 + chain.src.len() * 12;
    if retained + working > opts.memory_budget {
        return Err(LabError::MemoryBudget { required: retained + working, budget: opts.memory_budget });
    }
    let mut prev = vec![0.0; chain.len()];
    let mut next = vec![0.0; chain.len()];
    prev[0] = 1.0;
    let mut diagonal = Vec::with_capacity(n_max + 1);
    let mut mass = Vec::with_capacity(n_max + 1);
    let mut vectors = Vec::new();
    for t in 0..=n_max {
        let end = chain.active(t);
        diagonal.push(prev[0]);
        mass.push(prev[..end].iter().sum());
        if wanted(t) {
            let mut entries: Vec<(usize, f64)> =
                (0..end).filter(|&i| prev[i] != 0.0).map(|i| (chain.verts[i], prev[i])).collect();
            entries.sort_unstable_by_key(|e| e.0);
            vectors.push(HeatVector { base: x, step: t, radius: t, entries });
        }
        if t < n_max {
            chain.step(&prev, &mut next, t);
            std::mem::swap(&mut prev, &mut next);
        }
    }
    Ok(HeatRun { base: x, diagonal, mass, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{make_gasket, make_lattice};

    #[test]
    fn line_two_step_return() {
        let g = make_lattice(1, 20, 1.0).unwrap();
        let run = heat_kernel_exact(&g, 20, 4).unwrap();
        assert_eq!(run.diagonal[1], 0.0);
        assert_eq!(run.diagonal[2], 0.5);
        assert_eq!(run.vectors.len(), 5);
        for v in &run.vectors {
            assert!((v.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gasket_reversibility() {
        let g = make_gasket(3).unwrap();
        let opts = HeatOptions { keep: Keep::Steps(vec![7]), override_guard: true, ..Default::default() };
        let a = heat_kernel_with(&g, 0, 7, &opts).unwrap();
        let b = heat_kernel_with(&g, 11, 7, &opts).unwrap();
        let lhs = g.measure(0) * a.vectors[0].get(11);
        let rhs = g.measure(11) * b.vectors[0].get(0);
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let g = make_lattice(2, 50, 1.0).unwrap();
        let opts = HeatOptions { keep: Keep::All, memory_budget: 1000, ..Default::default() };
        assert!(matches!(heat_kernel_with(&g, g.meta().interior.unwrap(), 100, &opts), Err(LabError::MemoryBudget { .. })));
    }
}
