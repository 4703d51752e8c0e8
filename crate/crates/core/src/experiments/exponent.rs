//! The stretched-exponential return exponent of the lamplighter walk.

use crate::error::{LabError, Result};
use crate::fit::{dyadic, loglog_fit, FitResult};
use crate::generators::{gasket_walk_dim, Family, GeneratorSpec, CARPET_WALK_DIM};
use crate::lamplighter::{line_return_spectral, return_prob_collapsed, CollapsedMode};
use crate::walk::guard_check;

/// Relative standard error above which a point is flagged.
pub const VARIANCE_FLAG_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// `E[1{X_2n = x} 2^{-R_2n}]`: exact on `Z`, population Monte Carlo elsewhere.
    Collapsed,
    /// Full wreath-chain iteration; small graphs only.
    ExactKernel,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::Collapsed => "collapsed",
            Estimator::ExactKernel => "exact-kernel",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "collapsed" => Ok(Estimator::Collapsed),
            "exact-kernel" => Ok(Estimator::ExactKernel),
            _ => Err(format!("unknown estimator `{s}` (expected collapsed or exact-kernel)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentOptions {
    /// Fit over dyadic `n` in `[n_lo, n_hi]`, using `p_{2n}`.
    pub n_lo: u64,
    pub n_hi: u64,
    pub estimator: Estimator,
    pub particles: usize,
    pub replicates: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ExponentOptions {
    fn default() -> Self {
        ExponentOptions {
            n_lo: 1000,
            n_hi: 100_000,
            estimator: Estimator::Collapsed,
            particles: 4096,
            replicates: 8,
            seed: 0,
            tolerance: 0.06,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPoint {
    pub n: u64,
    /// `p_{2n}((0,x),(0,x))`.
    pub return_prob: f64,
    pub relative_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentReport {
    pub label: String,
    pub method: &'static str,
    /// Slope of `log(-log p_{2n})` against `log n`.
    pub fit: FitResult,
    pub points: Vec<ExponentPoint>,
    /// Some point has relative standard error above 10%.
    pub variance_flag: bool,
}

/// `d_f / (d_f + d_w)` for families with known exponents.
pub fn nominal_exponent(family: &Family) -> Option<f64> {
    match family {
        Family::Lattice { dim, .. } => Some(*dim as f64 / (*dim as f64 + 2.0)),
        Family::Gasket { .. } => {
            let d_f = 3f64.ln() / 2f64.ln();
            Some(d_f / (d_f + gasket_walk_dim()))
        }
        Family::Carpet { .. } => {
            let d_f = 8f64.ln() / 3f64.ln();
            Some(d_f / (d_f + CARPET_WALK_DIM))
        }
        Family::File { .. } => None,
    }
}

/// Estimate `p_{2n}` over the window and fit the return exponent.
pub fn exponent_experiment(spec: &GeneratorSpec, opts: &ExponentOptions) -> Result<ExponentReport> {
    let ns = dyadic(opts.n_lo.max(1), opts.n_hi);
    if ns.len() < 4 {
        return Err(LabError::ShortWindow { points: ns.len() });
    }
    let on_line = matches!(spec.family, Family::Lattice { dim: 1, .. }) && opts.estimator == Estimator::Collapsed;
    let mut points = Vec::with_capacity(ns.len());
    let method;
    if on_line {
        method = "spectral";
        for &n in &ns {
            let (p, _, _, _) = line_return_spectral(2 * n)?;
            points.push(ExponentPoint { n, return_prob: p, relative_stderr: None });
        }
    } else {
        let g = spec.build()?;
        let x = g.meta().interior.or(g.meta().origin).unwrap_or(0);
        let mode = match opts.estimator {
            Estimator::Collapsed => {
                guard_check(&g, x, 2 * opts.n_hi)?;
                CollapsedMode::Population { particles: opts.particles, replicates: opts.replicates, seed: opts.seed }
            }
            Estimator::ExactKernel => CollapsedMode::ExactKernel,
        };
        method = mode.label();
        for &n in &ns {
            let est = return_prob_collapsed(&g, x, 2 * n, &mode)?;
            points.push(ExponentPoint { n, return_prob: est.return_prob, relative_stderr: est.relative_stderr() });
        }
    }
    if let Some(bad) = points.iter().find(|p| !(p.return_prob > 0.0 && p.return_prob < 1.0)) {
        return Err(LabError::param(format!("return probability {} at n = {} cannot be fitted", bad.return_prob, bad.n)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| -p.return_prob.ln()).collect();
    let mut fit = loglog_fit(&xs, &ys)?;
    if let Some(t) = nominal_exponent(&spec.family) {
        fit = fit.with_target(t, opts.tolerance);
    }
    let variance_flag = points.iter().any(|p| p.relative_stderr.is_some_and(|s| s > VARIANCE_FLAG_LIMIT));
    if variance_flag {
        log::warn!("exponent fit on {}: some point has relative standard error above 10%", spec.label());
    }
    Ok(ExponentReport { label: spec.label(), method, fit, points, variance_flag })
}
