//! Independent fits of `d_f`, `d_w` and `d_s / 2`.

use crate::error::{LabError, Result};
use crate::fit::{loglog_fit, ols, FitResult};
use crate::generators::{gasket_walk_dim, make_gasket};
use crate::graph::{graph_stats_window, WeightedGraph};
use crate::spectral::{effective_resistance, spectral_dim_fit};
use crate::walk::{confinement_exact, guard_check, heat_kernel_with, HeatOptions};

/// Inputs for [`exponent_triad`].
#[derive(Debug, Clone, PartialEq)]
pub struct TriadOptions {
    pub volume_center: usize,
    pub volume_window: (usize, usize),
    pub confinement_center: usize,
    /// Ball radii `r`; the walk leaves `B(x, r)` at distance `r + 1`.
    pub confinement_radii: Vec<usize>,
    /// Walk dimension used only to place the survival fit windows.
    pub walk_dim_guess: f64,
    pub kernel_center: usize,
    /// Dyadic `n` window for `p_{2n}`.
    pub kernel_window: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfinementRate {
    pub radius: usize,
    /// `lambda` in `P(confined for n steps) ~ exp(-lambda n)`.
    pub rate: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triad {
    pub d_f: FitResult,
    /// `d_w` with the slope sign flipped to positive.
    pub d_w: FitResult,
    pub rates: Vec<ConfinementRate>,
    pub half_d_s: FitResult,
    /// `|d_s / 2 - d_f / d_w|`.
    pub consistency: f64,
}

/// Decay rate of exact confinement probabilities over `[5 s, 50 s]` with
/// `s = (r + 1)^{d_w}`.
pub fn confinement_rate(g: &WeightedGraph, x: usize, r: usize, walk_dim: f64) -> Result<ConfinementRate> {
    let s = ((r + 1) as f64).powf(walk_dim);
    let (lo, hi) = ((5.0 * s) as usize, (50.0 * s) as usize);
    let survival = confinement_exact(g, x, r, hi)?;
    let stride = ((hi - lo) / 40).max(1);
    let ns: Vec<f64> = (lo..=hi).step_by(stride).map(|n| n as f64).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| -survival[n as usize].ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(LabError::param(format!("confinement probability underflows for radius {r}")));
    }
    let (rate, _, r_squared) = ols(&ns, &ys)?;
    Ok(ConfinementRate { radius: r, rate, r_squared })
}

pub fn exponent_triad(g: &WeightedGraph, opts: &TriadOptions) -> Result<Triad> {
    let (r_min, r_max) = opts.volume_window;
    let d_f = graph_stats_window(g, &[opts.volume_center], r_min, r_max)?.d_f;
    let rates = opts
        .confinement_radii
        .iter()
        .map(|&r| confinement_rate(g, opts.confinement_center, r, opts.walk_dim_guess))
        .collect::<Result<Vec<_>>>()?;
    let exits: Vec<f64> = rates.iter().map(|c| (c.radius + 1) as f64).collect();
    let lambdas: Vec<f64> = rates.iter().map(|c| c.rate).collect();
    let mut d_w = loglog_fit(&exits, &lambdas)?;
    d_w.slope = -d_w.slope;
    let (lo, hi) = opts.kernel_window;
    guard_check(g, opts.kernel_center, 2 * hi as u64)?;
    let run = heat_kernel_with(g, opts.kernel_center, 2 * hi, &HeatOptions::default())?;
    let half_d_s = spectral_dim_fit(&run.even_diagonal(), lo, hi)?;
    let consistency = (half_d_s.slope - d_f.slope / d_w.slope).abs();
    Ok(Triad { d_f, d_w, rates, half_d_s, consistency })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasketTriad {
    pub level: u32,
    pub triad: Triad,
    /// Corner-to-corner resistance per level, against side length `2^L`.
    pub resistance: Vec<(u32, f64)>,
    /// Slope of `log R_L` against `log 2^L`.
    pub resistance_growth: FitResult,
    /// `d_f + resistance growth exponent`.
    pub d_w_resistance: f64,
}

/// The exponent triad of the level-`level` gasket (`level >= 6`).
///
/// Volumes and confinement are measured from the apex, where
/// `B(0, 2^k - 1)` is a level-`k` sub-gasket without its two far corners,
/// so the walk leaves it exactly at those corners.
pub fn gasket_triad(level: u32) -> Result<GasketTriad> {
    if level < 6 {
        return Err(LabError::param(format!("gasket triad needs level >= 6, got {level}")));
    }
    let g = make_gasket(level)?;
    let apex = g.meta().origin.unwrap_or(0);
    let interior = g.meta().interior.ok_or_else(|| LabError::param("gasket has no interior vertex"))?;
    let dw = gasket_walk_dim();
    let clearance = g.boundary_clearance(interior).unwrap_or(0) as f64;
    // largest dyadic n with 2n steps inside the guard
    let n_guard = ((clearance / 3.0).powf(dw) / 2.0).max(1.0);
    let kernel_hi = 1usize << (n_guard.log2().floor() as u32);
    let top = (level - 2).min(6);
    let opts = TriadOptions {
        volume_center: apex,
        volume_window: (4, 1 << (level - 1)),
        confinement_center: apex,
        confinement_radii: (3..=top).map(|k| (1usize << k) - 1).collect(),
        walk_dim_guess: dw,
        kernel_center: interior,
        kernel_window: (64, kernel_hi),
    };
    let triad = exponent_triad(&g, &opts)?;
    let mut resistance = Vec::new();
    for l in 2..=level {
        let h = make_gasket(l)?;
        let corners = &h.meta().boundary;
        let r = effective_resistance(&h, &[corners[0]], &[corners[1]])?;
        resistance.push((l, r.resistance));
    }
    let sides: Vec<f64> = resistance.iter().map(|&(l, _)| 2f64.powi(l as i32)).collect();
    let values: Vec<f64> = resistance.iter().map(|&(_, r)| r).collect();
    let resistance_growth = loglog_fit(&sides, &values)?;
    let d_w_resistance = triad.d_f.slope + resistance_growth.slope;
    Ok(GasketTriad { level, triad, resistance, resistance_growth, d_w_resistance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::make_lattice;

    #[test]
    fn line_triad() {
        let g = make_lattice(1, 2000, 1.0).unwrap();
        let x = 2000;
        let opts = TriadOptions {
            volume_center: x,
            volume_window: (8, 512),
            confinement_center: x,
            confinement_radii: vec![7, 15, 31, 63],
            walk_dim_guess: 2.0,
            kernel_center: x,
            kernel_window: (64, 4096),
        };
        let t = exponent_triad(&g, &opts).unwrap();
        assert!((t.d_f.slope - 1.0).abs() < 0.02, "{:?}", t.d_f);
        assert!((t.d_w.slope - 2.0).abs() < 0.05, "{:?}", t.d_w);
        assert!(t.consistency < 0.05);
        assert!(t.rates.iter().all(|c| c.r_squared > 0.99));
    }

    #[test]
    fn low_level_is_rejected() {
        assert!(gasket_triad(4).is_err());
    }
}
