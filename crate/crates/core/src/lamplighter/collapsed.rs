//! Return probabilities of the lamplighter walk through the base walk.
//!
//! For `n >= 1` every vertex of the range has been flipped by at least one
//! fair coin, so given the base path the lamps are uniform on the
//! `2^{R_n}` configurations supported in the range. Hence
//! `p_n((0,x),(0,x)) = E_x[1{X_n = x} 2^{-R_n}]`, which these estimators
//! compute exactly on `Z`, by enumeration, or by Monte Carlo.

use std::f64::consts::PI;

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;
use crate::rng::{stream_rng, uniform};
use crate::stats::mean_stderr;
use crate::topology::WalkGraph;
use crate::walk::VisitSet;

pub const MAX_WIDTH_CUTOFF: usize = 512;
const RELATIVE_TAIL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum CollapsedMode {
    /// `(width, position, start offset)` range chain on `Z`, dropping
    /// widths above `w_cut`.
    ExactDp { w_cut: usize },
    /// Closed form on `Z` via killed-interval spectra.
    Spectral,
    /// Exhaustive path enumeration with `deg^n` paths.
    Enumerate,
    /// Full distribution of the wreath chain on `2^N * N` states.
    ExactKernel,
    MonteCarlo { samples: usize, seed: u64 },
    /// Resampling particle estimator, averaged over independent replicates.
    Population { particles: usize, replicates: usize, seed: u64 },
}

impl CollapsedMode {
    pub fn label(&self) -> &'static str {
        match self {
            CollapsedMode::ExactDp { .. } => "exact-dp",
            CollapsedMode::Spectral => "spectral",
            CollapsedMode::Enumerate => "enumerate",
            CollapsedMode::ExactKernel => "exact-kernel",
            CollapsedMode::MonteCarlo { .. } => "monte-carlo",
            CollapsedMode::Population { .. } => "population",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapsedEstimate {
    pub n: u64,
    /// `p_n((0,x),(0,x))`.
    pub return_prob: f64,
    /// `E_x[2^{-R_n}]`, when the method provides it.
    pub range_moment: Option<f64>,
    pub return_stderr: Option<f64>,
    pub range_stderr: Option<f64>,
    /// Absolute bound on the error from width truncation.
    pub truncation_bound: f64,
    pub method: &'static str,
}

impl CollapsedEstimate {
    fn exact(n: u64, p: f64, r: Option<f64>, bound: f64, method: &'static str) -> Self {
        CollapsedEstimate {
            n,
            return_prob: p,
            range_moment: r,
            return_stderr: None,
            range_stderr: None,
            truncation_bound: bound,
            method,
        }
    }

    /// Standard error over estimate, when both exist.
    pub fn relative_stderr(&self) -> Option<f64> {
        self.return_stderr.map(|s| if self.return_prob > 0.0 { s / self.return_prob } else { f64::INFINITY })
    }
}

/// Range-chain dynamic program on `Z` for `n` steps.
///
/// Returns `(E[1{X_n=0} 2^{-R_n}], E[2^{-R_n}], truncation bound)`. Costs
/// `O(n W^3)` with `W = min(n + 1, w_cut)`.
pub fn line_return_dp(n: u64, w_cut: usize) -> Result<(f64, f64, f64)> {
    if w_cut == 0 || w_cut > MAX_WIDTH_CUTOFF {
        return Err(LabError::WidthCutoff(w_cut));
    }
    let w_max = (n as usize + 1).min(w_cut);
    if w_max.pow(3) > 50_000_000 {
        return Err(LabError::TooLarge(format!("range chain with width {w_max} has too many states")));
    }
    // state (w, j, s): width w, walker at j, start at s, with j, s in 0..w
    let idx = |w: usize, j: usize, s: usize| ((w - 1) * w_max + j) * w_max + s;
    let size = w_max * w_max * w_max;
    let mut cur = vec![0.0f64; size];
    let mut nxt = vec![0.0f64; size];
    cur[idx(1, 0, 0)] = 1.0;
    let mut dropped = 0.0;
    for t in 0..n as usize {
        nxt.iter_mut().for_each(|v| *v = 0.0);
        let wmax_t = (t + 1).min(w_max);
        for w in 1..=wmax_t {
            for j in 0..w {
                for s in 0..w {
                    let p = cur[idx(w, j, s)];
                    if p == 0.0 {
                        continue;
                    }
                    let half = 0.5 * p;
                    if j > 0 {
                        nxt[idx(w, j - 1, s)] += half;
                    } else if w < w_max {
                        nxt[idx(w + 1, 0, s + 1)] += half;
                    } else {
                        dropped += half;
                    }
                    if j + 1 < w {
                        nxt[idx(w, j + 1, s)] += half;
                    } else if w < w_max {
                        nxt[idx(w + 1, w, s)] += half;
                    } else {
                        dropped += half;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut nxt);
    }
    let (mut ret, mut moment) = (0.0, 0.0);
    for w in 1..=w_max {
        let weight = 0.5f64.powi(w as i32);
        for j in 0..w {
            for s in 0..w {
                let p = cur[idx(w, j, s)];
                moment += p * weight;
                if j == s {
                    ret += p * weight;
                }
            }
        }
    }
    Ok((ret, moment, dropped * 0.5f64.powi(w_max as i32 + 1)))
}

/// Closed form on `Z` for `n` steps.
///
/// Summing by parts over the range `[-a, b]` turns the two expectations
/// into sums over interval lengths `L` of killed-walk quantities:
/// `E[1{X_n=0} 2^{-R_n}] = sum_L 2^{-(L+2)} sum_k cos^n(pi k/(L+1))` and
/// `E[2^{-R_n}] = sum_L 2^{-(L+2)} sum_{k odd} 2/(L+1) cot^2(pi k/(2(L+1))) cos^n(pi k/(L+1))`.
/// Lengths are added until the remaining tail, at most
/// `(L+2) 2^{-(L+2)}`, falls below `1e-15` of the running sums.
///
/// Returns `(return probability, range moment, tail bound, lengths used)`.
pub fn line_return_spectral(n: u64) -> Result<(f64, f64, f64, usize)> {
    if n == 0 {
        return Ok((1.0, 0.5, 0.0, 0));
    }
    let e = n as i32;
    let (mut ret, mut moment) = (0.0f64, 0.0f64);
    for l in 1..=MAX_WIDTH_CUTOFF {
        let lf = l as f64;
        let scale = 0.5f64.powi(l as i32 + 2);
        let (mut tr, mut surv) = (0.0, 0.0);
        for k in 1..=l {
            let theta = PI * k as f64 / (lf + 1.0);
            let c = theta.cos().powi(e);
            tr += c;
            if k % 2 == 1 {
                let cot = 1.0 / (theta / 2.0).tan();
                surv += 2.0 / (lf + 1.0) * cot * cot * c;
            }
        }
        ret += scale * tr;
        moment += scale * surv;
        let tail = (lf + 2.0) * 0.5f64.powi(l as i32 + 2);
        let floor = if n % 2 == 1 { moment } else { ret.min(moment) };
        if tail < RELATIVE_TAIL * floor {
            return Ok((if n % 2 == 1 { 0.0 } else { ret }, moment, tail, l));
        }
    }
    Err(LabError::WidthCutoff(MAX_WIDTH_CUTOFF + 1))
}

fn is_line_surrogate(g: &WeightedGraph, x: usize, n: u64) -> Result<()> {
    let nv = g.vertex_count();
    let w0 = g.edges().first().map_or(1.0, |e| e.weight);
    let line = g.edge_count() + 1 == nv
        && (0..nv).all(|v| g.degree(v) <= 2)
        && g.edges().iter().all(|e| e.weight == w0);
    if !line {
        return Err(LabError::param("exact Z modes need a uniform-weight path graph"));
    }
    let ends: Vec<usize> = (0..nv).filter(|&v| g.degree(v) <= 1).collect();
    let clearance = ends.iter().map(|&e| crate::graph::graph_distance(g, x, e)).collect::<Result<Vec<_>>>()?;
    if clearance.iter().any(|&c| (c as u64) < n) {
        return Err(LabError::param(format!("start vertex is within {n} steps of a path end")));
    }
    Ok(())
}

/// Estimate `p_n((0,x),(0,x))` and `E_x[2^{-R_n}]`.
pub fn return_prob_collapsed(g: &WeightedGraph, x: usize, n: u64, mode: &CollapsedMode) -> Result<CollapsedEstimate> {
    g.check_vertex(x)?;
    let label = mode.label();
    match *mode {
        CollapsedMode::ExactDp { w_cut } => {
            is_line_surrogate(g, x, n)?;
            if n == 0 {
                return Ok(CollapsedEstimate::exact(0, 1.0, Some(0.5), 0.0, label));
            }
            let (p, r, bound) = line_return_dp(n, w_cut)?;
            Ok(CollapsedEstimate::exact(n, p, Some(r), bound, label))
        }
        CollapsedMode::Spectral => {
            is_line_surrogate(g, x, n)?;
            let (p, r, tail, _) = line_return_spectral(n)?;
            Ok(CollapsedEstimate::exact(n, p, Some(r), tail, label))
        }
        CollapsedMode::Enumerate => {
            let (p, r) = enumerate_paths(g, x, n)?;
            Ok(CollapsedEstimate::exact(n, p, Some(r), 0.0, label))
        }
        CollapsedMode::ExactKernel => {
            let p = wreath_chain_return(g, x, n)?;
            Ok(CollapsedEstimate::exact(n, p, None, 0.0, label))
        }
        CollapsedMode::MonteCarlo { samples, seed } => monte_carlo(g, x, n, samples, seed),
        CollapsedMode::Population { particles, replicates, seed } => {
            population(g, x, n, particles, replicates, seed)
        }
    }
}

fn enumerate_paths(g: &WeightedGraph, x: usize, n: u64) -> Result<(f64, f64)> {
    let paths = (g.max_degree() as f64).powf(n as f64);
    if paths > 5e7 {
        return Err(LabError::TooLarge(format!("enumeration of about {paths:.0} paths")));
    }
    if n == 0 {
        return Ok((1.0, 0.5));
    }
    fn rec(g: &WeightedGraph, x: usize, v: usize, left: u64, prob: f64, visited: &mut Vec<usize>, acc: &mut (f64, f64)) {
        if left == 0 {
            let w = prob * 0.5f64.powi(visited.len() as i32);
            acc.1 += w;
            if v == x {
                acc.0 += w;
            }
            return;
        }
        for (y, mu) in g.neighbors(v) {
            let fresh = !visited.contains(&y);
            if fresh {
                visited.push(y);
            }
            rec(g, x, y, left - 1, prob * mu / g.measure(v), visited, acc);
            if fresh {
                visited.pop();
            }
        }
    }
    let mut acc = (0.0, 0.0);
    rec(g, x, x, n, 1.0, &mut vec![x], &mut acc);
    Ok(acc)
}

/// `P(Y_n = (0, x))` by iterating the full switch-walk-switch kernel.
fn wreath_chain_return(g: &WeightedGraph, x: usize, n: u64) -> Result<f64> {
    let nv = g.vertex_count();
    if nv > super::EXACT_MAX_VERTICES {
        return Err(LabError::TooLarge(format!("wreath chain on {nv} base vertices")));
    }
    let states = nv << nv;
    let mut cur = vec![0.0f64; states];
    let mut nxt = vec![0.0f64; states];
    cur[x] = 1.0;
    for _ in 0..n {
        nxt.iter_mut().for_each(|v| *v = 0.0);
        for (id, &p) in cur.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (mask, v) = (id / nv, id % nv);
            for (y, mu) in g.neighbors(v) {
                let q = 0.25 * p * mu / g.measure(v);
                for flips in [0, 1usize << v, 1usize << y, (1usize << v) ^ (1usize << y)] {
                    nxt[(mask ^ flips) * nv + y] += q;
                }
            }
        }
        std::mem::swap(&mut cur, &mut nxt);
    }
    Ok(cur[x])
}

fn sample_path<G: WalkGraph + ?Sized, R: RngCore>(g: &G, x: usize, n: u64, rng: &mut R) -> (usize, u64) {
    let mut visited = VisitSet::new(g.vertex_count());
    visited.insert(x);
    let (mut v, mut range) = (x, 1u64);
    for _ in 0..n {
        v = g.step(v, uniform(rng));
        if visited.insert(v) {
            range += 1;
        }
    }
    (v, range)
}

fn monte_carlo(g: &WeightedGraph, x: usize, n: u64, samples: usize, seed: u64) -> Result<CollapsedEstimate> {
    if samples < 2 {
        return Err(LabError::param("monte-carlo mode needs at least 2 samples"));
    }
    if n > 10_000 {
        log::warn!("monte-carlo return estimate at n = {n}: the event is rare and the estimate unreliable");
    }
    let draws: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            let (end, range) = sample_path(g, x, n, &mut rng);
            let w = if n == 0 { 1.0 } else { 0.5f64.powi(range.min(2000) as i32) };
            (if end == x { w } else { 0.0 }, if n == 0 { 0.5 } else { w })
        })
        .collect();
    let (ret, ret_se) = mean_stderr(&draws.iter().map(|d| d.0).collect::<Vec<_>>());
    let (mom, mom_se) = mean_stderr(&draws.iter().map(|d| d.1).collect::<Vec<_>>());
    Ok(CollapsedEstimate {
        n,
        return_prob: ret,
        range_moment: Some(mom),
        return_stderr: Some(ret_se),
        range_stderr: Some(mom_se),
        truncation_bound: 0.0,
        method: "monte-carlo",
    })
}

struct Particle {
    position: usize,
    visited: rustc_hash::FxHashSet<u32>,
}

/// One resampling run. Each step multiplies a particle's weight by 1/2 when
/// it enters a new vertex; the running product of mean weights estimates
/// `E[2^{-(R_n - 1)}]`.
fn population_run(g: &WeightedGraph, x: usize, n: u64, particles: usize, seed: u64, replicate: u64) -> (f64, f64) {
    let mut rng = stream_rng(seed, replicate);
    let mut pop: Vec<Particle> = (0..particles)
        .map(|_| Particle { position: x, visited: std::iter::once(x as u32).collect() })
        .collect();
    let mut weights = vec![1.0 / particles as f64; particles];
    let mut log_z = 0.0f64;
    for _ in 0..n {
        let mut total = 0.0;
        for (p, w) in pop.iter_mut().zip(weights.iter_mut()) {
            p.position = g.walk_step(p.position, uniform(&mut rng));
            if p.visited.insert(p.position as u32) {
                *w *= 0.5;
            }
            total += *w;
        }
        log_z += total.ln();
        let mut ess_inv = 0.0;
        for w in weights.iter_mut() {
            *w /= total;
            ess_inv += *w * *w;
        }
        if ess_inv * (particles as f64) > 2.0 {
            // systematic resampling
            let u0 = uniform(&mut rng) / particles as f64;
            let mut picks = Vec::with_capacity(particles);
            let (mut cum, mut i) = (weights[0], 0usize);
            for k in 0..particles {
                let u = u0 + k as f64 / particles as f64;
                while u > cum && i + 1 < particles {
                    i += 1;
                    cum += weights[i];
                }
                picks.push(i);
            }
            pop = picks
                .iter()
                .map(|&i| Particle { position: pop[i].position, visited: pop[i].visited.clone() })
                .collect();
            weights.iter_mut().for_each(|w| *w = 1.0 / particles as f64);
        }
    }
    let at_home: f64 = pop.iter().zip(&weights).filter(|(p, _)| p.position == x).map(|(_, w)| w).sum();
    let z = 0.5 * log_z.exp();
    (z * at_home, z)
}

fn population(
    g: &WeightedGraph,
    x: usize,
    n: u64,
    particles: usize,
    replicates: usize,
    seed: u64,
) -> Result<CollapsedEstimate> {
    if particles < 2 || replicates < 2 {
        return Err(LabError::param("population mode needs at least 2 particles and 2 replicates"));
    }
    if n == 0 {
        return Ok(CollapsedEstimate::exact(0, 1.0, Some(0.5), 0.0, "population"));
    }
    let runs: Vec<(f64, f64)> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| population_run(g, x, n, particles, seed, r))
        .collect();
    let (ret, ret_se) = mean_stderr(&runs.iter().map(|r| r.0).collect::<Vec<_>>());
    let (mom, mom_se) = mean_stderr(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(CollapsedEstimate {
        n,
        return_prob: ret,
        range_moment: Some(mom),
        return_stderr: Some(ret_se),
        range_stderr: Some(mom_se),
        truncation_bound: 0.0,
        method: "population",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::make_lattice;
    use crate::graph::build_graph;

    #[test]
    fn two_steps_on_the_line() {
        let (p, r, _, _) = line_return_spectral(2).unwrap();
        assert!((p - 0.125).abs() < 1e-15);
        // R_2 = 2 w.p. 1/2 and 3 w.p. 1/2
        assert!((r - (0.5 * 0.25 + 0.5 * 0.125)).abs() < 1e-15);
        let (pd, rd, _) = line_return_dp(2, 96).unwrap();
        assert!((pd - 0.125).abs() < 1e-15);
        assert!((rd - r).abs() < 1e-15);
    }

    #[test]
    fn dp_matches_spectral() {
        for n in 1..=40u64 {
            let (p, r, _, _) = line_return_spectral(n).unwrap();
            let (pd, rd, bound) = line_return_dp(n, 96).unwrap();
            assert_eq!(bound, 0.0);
            assert!((p - pd).abs() <= 1e-13 * pd.max(1e-300) + 1e-300, "n {n}: {p} vs {pd}");
            assert!((r - rd).abs() <= 1e-13 * rd, "n {n}: {r} vs {rd}");
        }
    }

    #[test]
    fn truncated_dp_reports_bound() {
        let (p_full, _, _) = line_return_dp(30, 96).unwrap();
        let (p_cut, _, bound) = line_return_dp(30, 6).unwrap();
        assert!(bound > 0.0);
        assert!((p_full - p_cut).abs() <= bound);
        assert!(matches!(line_return_dp(10, 513), Err(LabError::WidthCutoff(513))));
    }

    #[test]
    fn large_n_is_finite_and_positive() {
        let (p, r, tail, used) = line_return_spectral(200_000).unwrap();
        assert!(p > 0.0 && r > p);
        assert!(tail < 1e-15 * p);
        assert!(used < MAX_WIDTH_CUTOFF);
    }

    #[test]
    fn modes_agree_on_small_path() {
        let g = make_lattice(1, 12, 1.0).unwrap();
        let x = 12;
        for n in [2u64, 4, 6] {
            let sp = return_prob_collapsed(&g, x, n, &CollapsedMode::Spectral).unwrap();
            let en = return_prob_collapsed(&g, x, n, &CollapsedMode::Enumerate).unwrap();
            assert!((sp.return_prob - en.return_prob).abs() < 1e-14);
            assert!((sp.range_moment.unwrap() - en.range_moment.unwrap()).abs() < 1e-14);
        }
        let short = build_graph(&[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)], 5).unwrap();
        let kernel = return_prob_collapsed(&short, 2, 4, &CollapsedMode::ExactKernel).unwrap();
        let en = return_prob_collapsed(&short, 2, 4, &CollapsedMode::Enumerate).unwrap();
        assert!((kernel.return_prob - en.return_prob).abs() < 1e-15);
        assert!(return_prob_collapsed(&short, 2, 40, &CollapsedMode::Spectral).is_err());
    }

    #[test]
    fn stochastic_modes_bracket_exact() {
        let g = make_lattice(1, 80, 1.0).unwrap();
        let x = 80;
        let exact = line_return_spectral(40).unwrap();
        let mc = return_prob_collapsed(&g, x, 40, &CollapsedMode::MonteCarlo { samples: 200_000, seed: 1 }).unwrap();
        assert!((mc.return_prob - exact.0).abs() < 4.0 * mc.return_stderr.unwrap(), "{mc:?} vs {exact:?}");
        let pop = return_prob_collapsed(
            &g,
            x,
            40,
            &CollapsedMode::Population { particles: 2000, replicates: 16, seed: 2 },
        )
        .unwrap();
        assert!((pop.range_moment.unwrap() - exact.1).abs() < 4.0 * pop.range_stderr.unwrap() + 1e-3 * exact.1, "{pop:?} vs {exact:?}");
        assert!((pop.return_prob - exact.0).abs() < 4.0 * pop.return_stderr.unwrap() + 1e-3 * exact.0, "{pop:?} vs {exact:?}");
    }
}
