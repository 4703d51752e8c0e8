use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::graph::{bfs_distances, WeightedGraph};
use crate::rng::{stream_rng, uniform};
use crate::stats::wilson_interval;

use super::heat::LocalChain;

/// Balls with more states than this are handled by Monte Carlo only.
pub const CONFINEMENT_EXACT_LIMIT: usize = 100_000;

/// `P_x(max_{j<=n} d(x, X_j) <= r)` for `n = 0..=n_max`, by absorbing
/// iteration on `B(x, r)`.
pub fn confinement_exact(g: &WeightedGraph, x: usize, r: usize, n_max: usize) -> Result<Vec<f64>> {
    g.check_vertex(x)?;
    let chain = LocalChain::build(g, x, r, |_| true);
    if chain.len() > CONFINEMENT_EXACT_LIMIT {
        return Err(LabError::TooLarge(format!(
            "ball of radius {r} has {} states (exact limit {CONFINEMENT_EXACT_LIMIT})",
            chain.len()
        )));
    }
    let mut prev = vec![0.0; chain.len()];
    let mut next = vec![0.0; chain.len()];
    prev[0] = 1.0;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    for t in 0..n_max {
        chain.step(&prev, &mut next, t);
        std::mem::swap(&mut prev, &mut next);
        out.push(prev[..chain.active(t + 1)].iter().sum());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Confinement {
    pub successes: u64,
    pub trials: u64,
    /// `None` when no trajectory stayed confined.
    pub estimate: Option<f64>,
    /// 95% Wilson interval; `[0, upper)` when there were no successes.
    pub interval: (f64, f64),
    /// Exact value when the ball has at most [`CONFINEMENT_EXACT_LIMIT`] states.
    pub exact: Option<f64>,
}

/// Empirical confinement probability over `ensemble` walks, plus the exact
/// value when the ball is small.
pub fn confinement_prob(
    g: &WeightedGraph,
    x: usize,
    n: u64,
    r: usize,
    ensemble: usize,
    seed: u64,
) -> Result<Confinement> {
    g.check_vertex(x)?;
    if ensemble < 100 {
        return Err(LabError::param(format!("confinement ensemble must be at least 100, got {ensemble}")));
    }
    let dist = bfs_distances(g, x);
    let confined: Vec<bool> = (0..ensemble as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            let mut y = x;
            for _ in 0..n {
                y = g.walk_step(y, uniform(&mut rng));
                if dist[y] as usize > r {
                    return false;
                }
            }
            true
        })
        .collect();
    let successes = confined.iter().filter(|&&c| c).count() as u64;
    let trials = ensemble as u64;
    let interval = wilson_interval(successes, trials, 1.959_963_984_540_054);
    let estimate = (successes > 0).then(|| successes as f64 / trials as f64);
    let exact = match confinement_exact(g, x, r, n as usize) {
        Ok(series) => series.last().copied(),
        Err(LabError::TooLarge(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(Confinement { successes, trials, estimate, interval: if successes == 0 { (0.0, interval.1) } else { interval }, exact })
}
