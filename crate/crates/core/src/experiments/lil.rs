//! Band statistics for law-of-the-iterated-logarithm functionals.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;
use crate::lamplighter::{lamp_distance_bounds, lamplighter_ensemble, WreathState};
use crate::rng::mix64;
use crate::stats::quantile;
use crate::walk::{simulate_ensemble, WalkOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    RangeSup,
    RangeInf,
    LocTimeSup,
    LocTimeInf,
    LampDistSup,
    LampDistInf,
    TransientRatio,
}

pub const ALL_FUNCTIONALS: [Functional; 7] = [
    Functional::RangeSup,
    Functional::RangeInf,
    Functional::LocTimeSup,
    Functional::LocTimeInf,
    Functional::LampDistSup,
    Functional::LampDistInf,
    Functional::TransientRatio,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
    None,
}

impl Functional {
    pub fn tag(self) -> &'static str {
        match self {
            Functional::RangeSup => "range-sup",
            Functional::RangeInf => "range-inf",
            Functional::LocTimeSup => "loc-time-sup",
            Functional::LocTimeInf => "loc-time-inf",
            Functional::LampDistSup => "lamp-dist-sup",
            Functional::LampDistInf => "lamp-dist-inf",
            Functional::TransientRatio => "transient-ratio",
        }
    }

    /// Running extremum taken across checkpoints.
    pub fn extremum(self) -> Extremum {
        match self {
            Functional::RangeSup | Functional::LocTimeSup | Functional::LampDistSup => Extremum::Max,
            Functional::RangeInf | Functional::LocTimeInf | Functional::LampDistInf => Extremum::Min,
            Functional::TransientRatio => Extremum::None,
        }
    }

    fn uses_lamps(self) -> bool {
        matches!(self, Functional::LampDistSup | Functional::LampDistInf | Functional::TransientRatio)
    }

    /// Normalizer at time `n` for half spectral dimension `ds`.
    pub fn scale(self, n: u64, ds: f64) -> f64 {
        let nf = n as f64;
        let ll = nf.ln().ln();
        match self {
            Functional::RangeSup | Functional::LampDistSup => nf.powf(ds) * ll.powf(1.0 - ds),
            Functional::RangeInf | Functional::LampDistInf => nf.powf(ds) * ll.powf(-ds),
            Functional::LocTimeSup => nf.powf(1.0 - ds) * ll.powf(ds),
            Functional::LocTimeInf => nf.powf(1.0 - ds) * ll.powf(ds - 1.0),
            Functional::TransientRatio => nf,
        }
    }
}

impl std::str::FromStr for Functional {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ALL_FUNCTIONALS.into_iter().find(|f| f.tag() == s).ok_or_else(|| {
            let tags: Vec<&str> = ALL_FUNCTIONALS.iter().map(|f| f.tag()).collect();
            format!("unknown functional `{s}` (expected one of {})", tags.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub n: u64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub min: f64,
    pub max: f64,
}

impl Band {
    pub fn overlaps(&self, other: &Band) -> bool {
        self.q05 <= other.q95 && other.q05 <= self.q95
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LilStatistic {
    pub functional: Functional,
    pub half_spectral_dim: f64,
    pub checkpoints: Vec<u64>,
    /// `values[t][i]`: trajectory `t` at checkpoint `i`, after scaling and
    /// taking the running extremum.
    pub values: Vec<Vec<f64>>,
    pub bands: Vec<Band>,
}

impl LilStatistic {
    /// Scale raw per-checkpoint values, take running extrema and summarize.
    pub fn from_raw(functional: Functional, ds: f64, checkpoints: &[u64], raw: &[Vec<f64>]) -> Result<Self> {
        check_checkpoints(checkpoints)?;
        let values: Vec<Vec<f64>> = raw
            .iter()
            .map(|row| {
                let mut acc: Option<f64> = None;
                row.iter()
                    .zip(checkpoints)
                    .map(|(&v, &n)| {
                        let s = v / functional.scale(n, ds);
                        let next = match (functional.extremum(), acc) {
                            (Extremum::Max, Some(a)) => a.max(s),
                            (Extremum::Min, Some(a)) => a.min(s),
                            _ => s,
                        };
                        acc = Some(next);
                        next
                    })
                    .collect()
            })
            .collect();
        // a lamp distance is zero when the lighter is back at its start
        // with every lamp off, so only negative or undefined values are errors
        if values.iter().flatten().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(LabError::param(format!("{} produced a negative or undefined scaled value", functional.tag())));
        }
        let bands = (0..checkpoints.len())
            .map(|i| {
                let col: Vec<f64> = values.iter().map(|row| row[i]).collect();
                Band {
                    n: checkpoints[i],
                    q05: quantile(&col, 0.05),
                    q50: quantile(&col, 0.5),
                    q95: quantile(&col, 0.95),
                    min: col.iter().copied().fold(f64::INFINITY, f64::min),
                    max: col.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                }
            })
            .collect();
        Ok(LilStatistic { functional, half_spectral_dim: ds, checkpoints: checkpoints.to_vec(), values, bands })
    }

    pub fn band_at(&self, n: u64) -> Option<&Band> {
        self.bands.iter().find(|b| b.n == n)
    }
}

fn check_checkpoints(checkpoints: &[u64]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(LabError::param("at least one checkpoint is required"));
    }
    if checkpoints[0] < 16 {
        return Err(LabError::param("checkpoints must be at least 16 so that log log n > 1"));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::param("checkpoints must be strictly increasing"));
    }
    Ok(())
}

/// Band statistics of several functionals from one ensemble of walks and,
/// if a lamp functional is requested, one ensemble of lamplighter walks.
///
/// Lamp distances are replaced by the midpoint of the two-sided bound.
pub fn lil_bands(
    g: &WeightedGraph,
    x0: usize,
    ds: f64,
    functionals: &[Functional],
    ensemble: usize,
    checkpoints: &[u64],
    seed: u64,
) -> Result<Vec<LilStatistic>> {
    check_checkpoints(checkpoints)?;
    if ensemble == 0 {
        return Err(LabError::param("ensemble must be positive"));
    }
    if !(ds > 0.0) {
        return Err(LabError::param(format!("d_s/2 must be positive, got {ds}")));
    }
    let n = *checkpoints.last().unwrap();
    let walk_needed = functionals.iter().any(|f| !f.uses_lamps());
    let lamp_needed = functionals.iter().any(|f| f.uses_lamps());
    let (mut ranges, mut lstars) = (Vec::new(), Vec::new());
    if walk_needed {
        let opts = WalkOptions { checkpoints: checkpoints.to_vec(), local_times: true, displacement: false, override_guard: false };
        let runs = simulate_ensemble(g, x0, n, seed, ensemble, &opts)?;
        ranges = runs.iter().map(|t| t.checkpoints.iter().map(|c| c.range as f64).collect()).collect();
        lstars = runs.iter().map(|t| t.checkpoints.iter().map(|c| c.lstar).collect()).collect();
    }
    let mut mids: Vec<Vec<f64>> = Vec::new();
    if lamp_needed {
        let runs = lamplighter_ensemble(g, x0, n, mix64(seed ^ 0x6c61_6d70), ensemble, checkpoints, true, false)?;
        let origin = WreathState::origin(x0);
        mids = runs
            .par_iter()
            .map(|t| {
                t.states
                    .iter()
                    .map(|s| lamp_distance_bounds(g, &origin, s).map(|(lo, hi)| (lo + hi) as f64 / 2.0))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
    }
    functionals
        .iter()
        .map(|&f| {
            let raw = match f {
                Functional::RangeSup | Functional::RangeInf => &ranges,
                Functional::LocTimeSup | Functional::LocTimeInf => &lstars,
                _ => &mids,
            };
            LilStatistic::from_raw(f, ds, checkpoints, raw)
        })
        .collect()
}
