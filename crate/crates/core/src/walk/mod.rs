//! The base walk `X_n` on `(G, mu)`: simulation with range, local-time and
//! displacement functionals, exact kernels, and confinement probabilities.

mod confine;
mod heat;

pub use confine::{confinement_exact, confinement_prob, Confinement, CONFINEMENT_EXACT_LIMIT};
pub(crate) use heat::LocalChain;
pub use heat::{heat_kernel_exact, heat_kernel_with, HeatOptions, HeatRun, HeatVector, Keep};

use rand::RngCore;
use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{LabError, Result};
use crate::rng::{stream_rng, stream_seed, uniform, rng_from_seed};
use crate::topology::{Displacement, WalkGraph};
use crate::graph::WeightedGraph;

/// Neighbor of `x` chosen by the inverse CDF of `p(x, .)` at `u`.
#[inline]
pub fn walk_step(g: &WeightedGraph, x: usize, u: f64) -> usize {
    g.walk_step(x, u)
}

/// Clearance needed by the boundary guard for an `n`-step walk.
pub fn guard_radius(n: u64, walk_dim: f64) -> f64 {
    3.0 * (n as f64).powf(1.0 / walk_dim)
}

/// Refuse walks whose typical displacement could reach the boundary.
///
/// Graphs without a boundary annotation or walk-dimension hint pass.
pub fn guard_check<G: WalkGraph + ?Sized>(g: &G, x0: usize, n: u64) -> Result<()> {
    let (Some(dw), Some(available)) = (g.walk_dim_hint(), g.boundary_clearance(x0)) else {
        return Ok(());
    };
    let required = guard_radius(n, dw);
    if required > available as f64 {
        return Err(LabError::GuardViolation {
            steps: n,
            required,
            available,
            suggested: 2 * required.ceil() as usize + 1,
        });
    }
    Ok(())
}

/// Dyadic checkpoint schedule `2^a, .., 2^b` plus `extra` times, sorted and deduplicated.
pub fn checkpoint_schedule(lo_exp: u32, hi_exp: u32, extra: &[u64]) -> Vec<u64> {
    let mut v: Vec<u64> = (lo_exp..=hi_exp).map(|e| 1u64 << e).chain(extra.iter().copied()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Clone)]
pub struct WalkOptions {
    /// Times at which a [`CheckpointRow`] is recorded. Times beyond the
    /// walk length are ignored.
    pub checkpoints: Vec<u64>,
    pub local_times: bool,
    pub displacement: bool,
    pub override_guard: bool,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions { checkpoints: Vec::new(), local_times: true, displacement: true, override_guard: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointRow {
    pub n: u64,
    pub range: u64,
    /// `L_n^* = max_x L_n(x)`.
    pub lstar: f64,
    pub max_displacement: u32,
    pub vertex: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalTime {
    pub vertex: usize,
    /// `#{k < n : X_k = x}`.
    pub visits: u64,
    pub measure: f64,
}

impl LocalTime {
    pub fn value(&self) -> f64 {
        self.visits as f64 / self.measure
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: usize,
    pub steps: u64,
    pub seed: u64,
    /// `R_n`, the number of distinct vertices among `X_0..X_n`.
    pub range: u64,
    pub final_vertex: usize,
    pub max_displacement: u32,
    pub lstar: f64,
    /// Sorted by vertex; empty when local times were not tracked.
    pub local_times: Vec<LocalTime>,
    pub checkpoints: Vec<CheckpointRow>,
}

impl Trajectory {
    pub fn local_time(&self, x: usize) -> f64 {
        self.local_times
            .binary_search_by_key(&x, |l| l.vertex)
            .map_or(0.0, |i| self.local_times[i].value())
    }

    /// `sum_x m(x) L_n(x)` as an exact visit count; equals `n`.
    pub fn local_mass(&self) -> u64 {
        self.local_times.iter().map(|l| l.visits).sum()
    }
}

pub(crate) enum VisitSet {
    Dense(Vec<u64>),
    Sparse(FxHashSet<u32>),
}

impl VisitSet {
    const DENSE_LIMIT: usize = 1 << 27;

    pub(crate) fn new(n: usize) -> Self {
        if n <= Self::DENSE_LIMIT {
            VisitSet::Dense(vec![0; n.div_ceil(64)])
        } else {
            VisitSet::Sparse(FxHashSet::default())
        }
    }

    /// True when `x` was not yet present.
    #[inline]
    pub(crate) fn insert(&mut self, x: usize) -> bool {
        match self {
            VisitSet::Dense(bits) => {
                let (w, b) = (x >> 6, 1u64 << (x & 63));
                let fresh = bits[w] & b == 0;
                bits[w] |= b;
                fresh
            }
            VisitSet::Sparse(set) => set.insert(x as u32),
        }
    }

    /// Flip membership of `x`; true when `x` is now present.
    #[inline]
    pub(crate) fn toggle(&mut self, x: usize) -> bool {
        match self {
            VisitSet::Dense(bits) => {
                bits[x >> 6] ^= 1u64 << (x & 63);
                bits[x >> 6] & (1u64 << (x & 63)) != 0
            }
            VisitSet::Sparse(set) => {
                if set.remove(&(x as u32)) {
                    false
                } else {
                    set.insert(x as u32);
                    true
                }
            }
        }
    }

    #[inline]
    pub(crate) fn contains(&self, x: usize) -> bool {
        match self {
            VisitSet::Dense(bits) => bits[x >> 6] & (1u64 << (x & 63)) != 0,
            VisitSet::Sparse(set) => set.contains(&(x as u32)),
        }
    }
}

enum Counts {
    Off,
    Dense(Vec<u32>),
    Sparse(FxHashMap<u32, u64>),
}

impl Counts {
    fn new(n: usize, on: bool) -> Self {
        if !on {
            Counts::Off
        } else if n <= 1 << 22 {
            Counts::Dense(vec![0; n])
        } else {
            Counts::Sparse(FxHashMap::default())
        }
    }

    #[inline]
    fn bump(&mut self, x: usize) -> u64 {
        match self {
            Counts::Off => 0,
            Counts::Dense(c) => {
                c[x] += 1;
                c[x] as u64
            }
            Counts::Sparse(m) => {
                let c = m.entry(x as u32).or_insert(0);
                *c += 1;
                *c
            }
        }
    }

    fn collect<G: WalkGraph + ?Sized>(self, g: &G, visited: &[usize]) -> Vec<LocalTime> {
        let mut out: Vec<LocalTime> = match self {
            Counts::Off => return Vec::new(),
            Counts::Dense(c) => visited
                .iter()
                .filter(|&&x| c[x] > 0)
                .map(|&x| LocalTime { vertex: x, visits: c[x] as u64, measure: g.measure(x) })
                .collect(),
            Counts::Sparse(m) => m
                .into_iter()
                .map(|(x, v)| LocalTime { vertex: x as usize, visits: v, measure: g.measure(x as usize) })
                .collect(),
        };
        out.sort_unstable_by_key(|l| l.vertex);
        out
    }
}

/// Simulate `n` steps from `x0` with the stream keyed by `seed`.
pub fn simulate<G: WalkGraph + ?Sized>(
    g: &G,
    x0: usize,
    n: u64,
    seed: u64,
    opts: &WalkOptions,
) -> Result<Trajectory> {
    check_start(g, x0)?;
    if !opts.override_guard {
        guard_check(g, x0, n)?;
    }
    let disp = opts.displacement.then(|| g.displacement(x0));
    let mut rng = rng_from_seed(seed);
    Ok(run_walk(g, disp.as_ref(), x0, n, seed, &mut rng, opts))
}

/// `count` independent trajectories; trajectory `k` uses `stream_seed(master, k)`.
///
/// The output order and every value are independent of the worker count.
pub fn simulate_ensemble<G: WalkGraph + ?Sized>(
    g: &G,
    x0: usize,
    n: u64,
    master: u64,
    count: usize,
    opts: &WalkOptions,
) -> Result<Vec<Trajectory>> {
    check_start(g, x0)?;
    if !opts.override_guard {
        guard_check(g, x0, n)?;
    }
    let disp = opts.displacement.then(|| g.displacement(x0));
    Ok((0..count as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(master, k);
            run_walk(g, disp.as_ref(), x0, n, stream_seed(master, k), &mut rng, opts)
        })
        .collect())
}

pub(crate) fn check_start<G: WalkGraph + ?Sized>(g: &G, x0: usize) -> Result<()> {
    if x0 >= g.vertex_count() {
        return Err(LabError::InvalidVertex { vertex: x0, n: g.vertex_count() });
    }
    Ok(())
}

fn run_walk<G: WalkGraph + ?Sized, R: RngCore>(
    g: &G,
    disp: Option<&Displacement<'_>>,
    x0: usize,
    n: u64,
    seed: u64,
    rng: &mut R,
    opts: &WalkOptions,
) -> Trajectory {
    let mut visited = VisitSet::new(g.vertex_count());
    let mut order = Vec::new();
    let mut counts = Counts::new(g.vertex_count(), opts.local_times);
    visited.insert(x0);
    if opts.local_times {
        order.push(x0);
    }
    let mut x = x0;
    let mut range = 1u64;
    let mut lstar = 0.0f64;
    let mut max_disp = 0u32;
    let mut rows = Vec::with_capacity(opts.checkpoints.len());
    let mut next_cp = opts.checkpoints.iter().copied().filter(|&c| c <= n).peekable();
    for k in 0..n {
        while next_cp.peek() == Some(&k) {
            next_cp.next();
            rows.push(CheckpointRow { n: k, range, lstar, max_displacement: max_disp, vertex: x });
        }
        if opts.local_times {
            let c = counts.bump(x);
            let l = c as f64 / g.measure(x);
            if l > lstar {
                lstar = l;
            }
        }
        x = g.step(x, uniform(rng));
        if visited.insert(x) {
            range += 1;
            if opts.local_times {
                order.push(x);
            }
        }
        if let Some(d) = disp {
            let dx = d.distance(x);
            if dx > max_disp {
                max_disp = dx;
            }
        }
    }
    if next_cp.peek() == Some(&n) {
        rows.push(CheckpointRow { n, range, lstar, max_displacement: max_disp, vertex: x });
    }
    Trajectory {
        start: x0,
        steps: n,
        seed,
        range,
        final_vertex: x,
        max_displacement: max_disp,
        lstar,
        local_times: counts.collect(g, &order),
        checkpoints: rows,
    }
}
