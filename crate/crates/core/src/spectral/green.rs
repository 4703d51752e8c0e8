//! Green function `G(x, x)` and first-return probability `F(x, x)`.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::{dyadic, loglog_fit};
use crate::graph::WeightedGraph;
use crate::rng::{stream_rng, uniform};
use crate::stats::wilson_interval;
use crate::walk::{guard_check, LocalChain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenMode {
    /// Sum `p_n(x, x)` exactly and derive `F` by renewal.
    Series,
    /// Estimate `F` as the fraction of walks that return before the horizon.
    MonteCarlo { trajectories: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Killing {
    /// Walks die on boundary vertices.
    Boundary,
    /// No killing; the boundary guard applies to the horizon.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    pub horizon: usize,
    pub mode: GreenMode,
    pub killing: Killing,
}

impl Default for GreenOptions {
    fn default() -> Self {
        GreenOptions { horizon: 6000, mode: GreenMode::Series, killing: Killing::Boundary }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnStats {
    /// `G(x, x)`; infinite when divergent.
    pub green: f64,
    pub divergent: bool,
    /// `F(x, x)`, set to 1 when divergent.
    pub first_return: f64,
    /// Steps actually used (series mode may stop early).
    pub horizon: usize,
    /// Decay exponent `a` of `p_n ~ n^(-a)` when a power-law tail was fitted.
    pub tail_exponent: Option<f64>,
    /// Estimated contribution of steps beyond the horizon to `G`.
    pub tail: f64,
    /// Standard error of `F` (Monte Carlo only).
    pub stderr: Option<f64>,
    /// `p_n(x, x)` for `n = 0..=horizon` (series only).
    pub diagonal: Vec<f64>,
}

impl ReturnStats {
    /// `|F - (G - 1) / G|`; zero when divergent.
    pub fn identity_gap(&self) -> f64 {
        if self.divergent {
            0.0
        } else {
            (self.first_return - (self.green - 1.0) / self.green).abs()
        }
    }

    /// `sum_{n > m} p_n(x, x)` including the tail estimate (series only).
    pub fn tail_mass(&self, m: usize) -> Option<f64> {
        if self.diagonal.is_empty() || m >= self.diagonal.len() || self.divergent {
            return None;
        }
        Some(self.diagonal[m + 1..].iter().sum::<f64>() + self.tail)
    }
}

/// Geometric tail from the last two consecutive pair sums.
fn geometric_tail(series: &[f64]) -> f64 {
    let k = series.len();
    if k < 4 {
        return 0.0;
    }
    let last = series[k - 1] + series[k - 2];
    let prev = series[k - 3] + series[k - 4];
    if prev <= 0.0 || last <= 0.0 {
        return 0.0;
    }
    let q = last / prev;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    last * q / (1.0 - q)
}

/// Decay exponent of the pair sums `p_{2j} + p_{2j+1}` over the last decade.
fn power_exponent(series: &[f64]) -> Result<f64> {
    let pairs: Vec<f64> = series.chunks(2).map(|c| c.iter().sum()).collect();
    let j_hi = pairs.len() as u64 - 1;
    let js = dyadic((j_hi / 16).max(1), j_hi);
    let x: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let y: Vec<f64> = js.iter().map(|&j| pairs[j as usize]).collect();
    if y.iter().any(|&v| v <= 0.0) {
        return Err(LabError::param("return series vanishes inside the fit window"));
    }
    Ok(-loglog_fit(&x, &y)?.slope)
}

fn series_stats(g: &WeightedGraph, x: usize, opts: &GreenOptions) -> Result<ReturnStats> {
    let killed: Vec<bool> = match opts.killing {
        Killing::Boundary => g.boundary_mask(),
        Killing::None => vec![false; g.vertex_count()],
    };
    let chain = LocalChain::build(g, x, opts.horizon, |v| !killed[v]);
    let mut prev = vec![0.0; chain.len()];
    let mut next = vec![0.0; chain.len()];
    prev[0] = 1.0;
    let mut diagonal = vec![1.0];
    let mut partial = 1.0;
    for t in 0..opts.horizon {
        chain.step(&prev, &mut next, t);
        std::mem::swap(&mut prev, &mut next);
        diagonal.push(prev[0]);
        partial += prev[0];
        // past the mixing of the killed chain the geometric tail is reliable
        if opts.killing == Killing::Boundary && t >= 256 && t % 2 == 1 && geometric_tail(&diagonal) < 1e-9 * partial {
            break;
        }
    }
    let horizon = diagonal.len() - 1;
    let (tail, exponent) = match opts.killing {
        Killing::Boundary => (geometric_tail(&diagonal), None),
        Killing::None => {
            let a = power_exponent(&diagonal)?;
            let j = (horizon / 2) as f64;
            let last = diagonal[horizon] + diagonal[horizon - 1];
            let tail = if a > 1.0 { last * j / (a - 1.0) } else { f64::INFINITY };
            (tail, Some(a))
        }
    };
    if !tail.is_finite() {
        log::info!("return series from {x} diverges (tail exponent {exponent:?})");
        return Ok(ReturnStats {
            green: f64::INFINITY,
            divergent: true,
            first_return: 1.0,
            horizon,
            tail_exponent: exponent,
            tail,
            stderr: None,
            diagonal,
        });
    }
    let green = partial + tail;
    // renewal: p_n = sum_{k=1}^n f_k p_{n-k}
    let mut f = vec![0.0; horizon + 1];
    for n in 1..=horizon {
        let conv: f64 = (1..n).map(|k| f[k] * diagonal[n - k]).sum();
        f[n] = diagonal[n] - conv;
    }
    let f_tail = match opts.killing {
        Killing::Boundary => geometric_tail(&f),
        // f_n ~ p_n / G^2 for transient walks
        Killing::None => tail / (green * green),
    };
    let first_return = f.iter().sum::<f64>() + f_tail;
    Ok(ReturnStats {
        green,
        divergent: false,
        first_return,
        horizon,
        tail_exponent: exponent,
        tail,
        stderr: None,
        diagonal,
    })
}

fn monte_carlo_stats(g: &WeightedGraph, x: usize, opts: &GreenOptions, trajectories: usize, seed: u64) -> Result<ReturnStats> {
    if trajectories == 0 {
        return Err(LabError::param("Monte Carlo needs at least one trajectory"));
    }
    let killed = match opts.killing {
        Killing::Boundary => g.boundary_mask(),
        Killing::None => vec![false; g.vertex_count()],
    };
    let returned: u64 = (0..trajectories as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            let mut v = x;
            for _ in 0..opts.horizon {
                v = g.walk_step(v, uniform(&mut rng));
                if v == x {
                    return 1;
                }
                if killed[v] {
                    return 0;
                }
            }
            0
        })
        .sum();
    let n = trajectories as f64;
    let p = returned as f64 / n;
    let (lo, hi) = wilson_interval(returned, trajectories as u64, 1.0);
    let stderr = (p * (1.0 - p) / n).sqrt().max((hi - lo) / 2.0);
    Ok(ReturnStats {
        green: 1.0 / (1.0 - p),
        divergent: p >= 1.0,
        first_return: p,
        horizon: opts.horizon,
        tail_exponent: None,
        tail: 0.0,
        stderr: Some(stderr),
        diagonal: Vec::new(),
    })
}

/// Green function and first-return probability at `x`.
///
/// With boundary killing the quantities are those of the walk absorbed on
/// the boundary and the series tail is geometric. Without killing the tail
/// follows a power-law fit; a decay exponent of at most 1 means the series
/// diverges, in which case `G` is infinite and `F` is 1.
pub fn green_and_return(g: &WeightedGraph, x: usize, opts: &GreenOptions) -> Result<ReturnStats> {
    g.check_vertex(x)?;
    if opts.horizon < 1 {
        return Err(LabError::param("horizon must be at least 1"));
    }
    match opts.killing {
        Killing::Boundary if g.is_boundary(x) => {
            return Err(LabError::param(format!("vertex {x} lies on the absorbing boundary")));
        }
        Killing::None => guard_check(g, x, opts.horizon as u64)?,
        _ => {}
    }
    match opts.mode {
        GreenMode::Series => {
            if opts.killing == Killing::None && opts.horizon < 64 {
                return Err(LabError::param("divergence detection needs a horizon of at least 64"));
            }
            series_stats(g, x, opts)
        }
        GreenMode::MonteCarlo { trajectories, seed } => monte_carlo_stats(g, x, opts, trajectories, seed),
    }
}

/// `sum_{n > m} p_n(x, x)` for each `m`, from a boundary-killed series.
pub fn return_tail(g: &WeightedGraph, x: usize, ms: &[usize], horizon: usize) -> Result<Vec<(usize, f64)>> {
    let stats = green_and_return(g, x, &GreenOptions { horizon, mode: GreenMode::Series, killing: Killing::Boundary })?;
    ms.iter()
        .map(|&m| {
            stats
                .tail_mass(m)
                .map(|t| (m, t))
                .ok_or_else(|| LabError::param(format!("tail point {m} lies beyond the series horizon {}", stats.horizon)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::make_lattice;
    use crate::graph::build_graph;

    #[test]
    fn line_is_recurrent() {
        let g = make_lattice(1, 400, 1.0).unwrap();
        let opts = GreenOptions { horizon: 16000, mode: GreenMode::Series, killing: Killing::None };
        let s = green_and_return(&g, 400, &opts).unwrap();
        assert!(s.divergent);
        assert_eq!(s.first_return, 1.0);
        assert!(s.tail_exponent.unwrap() < 1.0);
    }

    #[test]
    fn killed_path_matches_gamblers_ruin() {
        // path 0..=4 absorbed at both ends, start at 2: return needs a step
        // to 1 or 3 and then a step back, each with probability 1/2
        let edges: Vec<(usize, usize, f64)> = (0..4).map(|i| (i, i + 1, 1.0)).collect();
        let mut g = build_graph(&edges, 5).unwrap();
        g.meta_mut().boundary = vec![0, 4];
        let s = green_and_return(&g, 2, &GreenOptions { horizon: 400, ..Default::default() }).unwrap();
        assert!((s.first_return - 0.5).abs() < 1e-12, "{s:?}");
        assert!((s.green - 2.0).abs() < 1e-12);
        assert!(s.identity_gap() < 1e-12);
        let mc = GreenOptions { horizon: 400, mode: GreenMode::MonteCarlo { trajectories: 20000, seed: 3 }, killing: Killing::Boundary };
        let m = green_and_return(&g, 2, &mc).unwrap();
        assert!((m.first_return - 0.5).abs() < 4.0 * m.stderr.unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let g = make_lattice(1, 10, 1.0).unwrap();
        assert!(green_and_return(&g, 0, &Default::default()).is_err());
        assert!(green_and_return(&g, 10, &GreenOptions { horizon: 0, ..Default::default() }).is_err());
    }
}
