//! Dirichlet energy, effective resistance, `rho(x, n)` growth, Green
//! functions and spectral-dimension fits.

mod green;

pub use green::{green_and_return, return_tail, GreenMode, GreenOptions, Killing, ReturnStats};

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fit::{dyadic, loglog_fit, FitResult};
use crate::graph::{bfs_distances, WeightedGraph};

/// How the energy sums over vertex pairs.
///
/// `Single` counts each undirected edge once, so unit edges behave as unit
/// resistors. `Double` sums over ordered pairs and is twice as large.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Single,
    Double,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Single => 1.0,
            Convention::Double => 2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Convention::Single => "single",
            Convention::Double => "double",
        }
    }
}

/// `E(f, f) = sum (f(x) - f(y))^2 mu_xy` in the given convention.
pub fn dirichlet_energy(g: &WeightedGraph, f: &[f64], convention: Convention) -> Result<f64> {
    if f.len() != g.vertex_count() {
        return Err(LabError::param(format!("potential has {} values for {} vertices", f.len(), g.vertex_count())));
    }
    let e: f64 = g.edges().iter().map(|e| (f[e.u] - f[e.v]).powi(2) * e.weight).sum();
    Ok(convention.factor() * e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceProblem {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    /// Harmonic off `A` and `B`, 1 on `A`, 0 on `B`.
    pub potential: Vec<f64>,
    pub energy: f64,
    pub resistance: f64,
    pub convention: Convention,
    pub residual: f64,
    pub iterations: usize,
}

impl ResistanceProblem {
    pub fn resistance_in(&self, convention: Convention) -> f64 {
        self.resistance * self.convention.factor() / convention.factor()
    }
}

struct Solve {
    values: Vec<f64>,
    residual: f64,
    iterations: usize,
}

/// Solve the Laplace equation on `unknowns` with `fixed` boundary values;
/// every neighbor of an unknown must be an unknown or fixed. Jacobi
/// preconditioned CG, relative residual `1e-10`, at most `50 sqrt(N)` steps.
fn harmonic_extension(g: &WeightedGraph, unknowns: &[usize], fixed: &[Option<f64>]) -> Result<Solve> {
    let k = unknowns.len();
    let mut local = vec![u32::MAX; g.vertex_count()];
    for (i, &u) in unknowns.iter().enumerate() {
        local[u] = i as u32;
    }
    let mut b = vec![0.0; k];
    for (i, &u) in unknowns.iter().enumerate() {
        for (w, mu) in g.neighbors(u) {
            if local[w] == u32::MAX {
                match fixed[w] {
                    Some(v) => b[i] += mu * v,
                    None => return Err(LabError::param(format!("vertex {w} is neither fixed nor unknown"))),
                }
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for (i, &u) in unknowns.iter().enumerate() {
            let mut acc = g.measure(u) * x[i];
            for (w, mu) in g.neighbors(u) {
                let lw = local[w];
                if lw != u32::MAX {
                    acc -= mu * x[lw as usize];
                }
            }
            out[i] = acc;
        }
    };
    let diag: Vec<f64> = unknowns.iter().map(|&u| g.measure(u)).collect();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let b_norm = norm(&b);
    let mut x = vec![0.0; k];
    let mut iterations = 0;
    let mut residual = 0.0;
    if k > 0 && b_norm > 0.0 {
        let cap = ((50.0 * (k as f64).sqrt()).ceil() as usize).max(50);
        let mut r = b.clone();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; k];
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        residual = 1.0;
        while residual > 1e-10 {
            if iterations == cap {
                return Err(LabError::NoConvergence { iterations, residual });
            }
            apply(&p, &mut ap);
            let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..k {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            iterations += 1;
            residual = norm(&r) / b_norm;
            for i in 0..k {
                z[i] = r[i] / diag[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..k {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    Ok(Solve { values: x, residual, iterations })
}

/// `R_eff(A, B)` in the single-count convention.
pub fn effective_resistance(g: &WeightedGraph, a: &[usize], b: &[usize]) -> Result<ResistanceProblem> {
    effective_resistance_with(g, a, b, Convention::Single)
}

pub fn effective_resistance_with(
    g: &WeightedGraph,
    a: &[usize],
    b: &[usize],
    convention: Convention,
) -> Result<ResistanceProblem> {
    if a.is_empty() || b.is_empty() {
        return Err(LabError::param("source and sink sets must be nonempty"));
    }
    let n = g.vertex_count();
    let mut fixed = vec![None; n];
    for &v in a {
        g.check_vertex(v)?;
        fixed[v] = Some(1.0);
    }
    for &v in b {
        g.check_vertex(v)?;
        if fixed[v].is_some() {
            return Err(LabError::param(format!("vertex {v} is in both source and sink sets")));
        }
        fixed[v] = Some(0.0);
    }
    let unknowns: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let solve = harmonic_extension(g, &unknowns, &fixed)?;
    let mut potential: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    for (i, &u) in unknowns.iter().enumerate() {
        potential[u] = solve.values[i];
    }
    let energy = dirichlet_energy(g, &potential, convention)?;
    Ok(ResistanceProblem {
        sources: a.to_vec(),
        sinks: b.to_vec(),
        potential,
        energy,
        resistance: 1.0 / energy,
        convention,
        residual: solve.residual,
        iterations: solve.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoRow {
    pub n: usize,
    /// `NaN` when the ball swallows the graph.
    pub rho: f64,
    pub residual: f64,
    pub clipped: bool,
}

/// `rho(x, n) = R_eff({x}, B(x, n)^c)` (single-count) for each `n`.
///
/// Only `B(x, n + 1)` takes part in the solve: the sphere at distance
/// `n + 1` carries the zero boundary value.
pub fn rho_growth(g: &WeightedGraph, x: usize, n_list: &[usize]) -> Result<Vec<RhoRow>> {
    g.check_vertex(x)?;
    let dist = bfs_distances(g, x);
    n_list
        .par_iter()
        .map(|&n| {
            let sphere = dist.iter().any(|&d| d as usize == n + 1);
            if !sphere {
                return Ok(RhoRow { n, rho: f64::NAN, residual: 0.0, clipped: true });
            }
            let mut fixed = vec![None; g.vertex_count()];
            fixed[x] = Some(1.0);
            let mut unknowns = Vec::new();
            let mut touched = vec![x];
            for (v, &d) in dist.iter().enumerate() {
                let d = d as usize;
                if d == n + 1 {
                    fixed[v] = Some(0.0);
                    touched.push(v);
                } else if d >= 1 && d <= n {
                    unknowns.push(v);
                    touched.push(v);
                }
            }
            let solve = harmonic_extension(g, &unknowns, &fixed)?;
            let mut f = vec![0.0; g.vertex_count()];
            f[x] = 1.0;
            for (i, &u) in unknowns.iter().enumerate() {
                f[u] = solve.values[i];
            }
            // edges leaving the region join two zero potentials or a zero
            // sphere vertex to the outside, so only region edges count
            let mut energy = 0.0;
            for &v in &touched {
                for (w, mu) in g.neighbors(v) {
                    if v < w || dist[w] as usize > n + 1 {
                        energy += (f[v] - f[w]).powi(2) * mu;
                    }
                }
            }
            Ok(RhoRow { n, rho: 1.0 / energy, residual: solve.residual, clipped: false })
        })
        .collect()
}

/// Condition (U) diagnostic: `rho(x, n_max) - rho(x, n_min)` per center and
/// the largest of them. Reported, never asserted.
pub fn rho_spread(g: &WeightedGraph, centers: &[usize], n_min: usize, n_max: usize) -> Result<(Vec<(usize, f64)>, f64)> {
    let mut per = Vec::with_capacity(centers.len());
    for &c in centers {
        let rows = rho_growth(g, c, &[n_min, n_max])?;
        per.push((c, rows[1].rho - rows[0].rho));
    }
    let sup = per.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok((per, sup))
}

/// Fit `d_s / 2` from `p_{2n}(x, x)` (indexed by `n`) over the dyadic `n`
/// in `[n_lo, n_hi]`: the returned slope is minus the log-log slope.
pub fn spectral_dim_fit(even_series: &[f64], n_lo: usize, n_hi: usize) -> Result<FitResult> {
    let ns: Vec<u64> = dyadic(n_lo.max(1) as u64, n_hi as u64).into_iter().filter(|&n| (n as usize) < even_series.len()).collect();
    if ns.len() < 4 {
        return Err(LabError::ShortWindow { points: ns.len() });
    }
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = ns.iter().map(|&n| even_series[n as usize]).collect();
    let mut fit = loglog_fit(&x, &y)?;
    fit.slope = -fit.slope;
    Ok(fit)
}
