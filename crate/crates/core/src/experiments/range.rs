//! Range growth `E[R_n] ~ pi n / log n` on `Z^2`.

use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::stats::mean_stderr;
use crate::topology::LatticeBox;
use crate::walk::{simulate_ensemble, WalkOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeRatio {
    pub n: u64,
    pub mean_range: f64,
    pub stderr: f64,
    /// `E[R_n] log n / (pi n)`.
    pub ratio: f64,
    /// Ratio at two standard errors either side.
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeScaling {
    pub radius: usize,
    pub ensemble: usize,
    pub rows: Vec<RangeRatio>,
}

impl RangeScaling {
    /// The ratio at the largest `n` is strictly closer to 1 than at the smallest.
    pub fn trend_toward_one(&self) -> bool {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if self.rows.len() > 1 => (b.ratio - 1.0).abs() < (a.ratio - 1.0).abs(),
            _ => false,
        }
    }
}

/// `mean_range log n / (pi n)`.
pub fn range_ratio(n: u64, mean_range: f64) -> f64 {
    mean_range * (n as f64).ln() / (PI * n as f64)
}

/// Ensemble range on the box of `Z^2` of the given radius.
pub fn z2_range_scaling(radius: usize, n_list: &[u64], ensemble: usize, seed: u64) -> Result<RangeScaling> {
    if ensemble < 2 {
        return Err(LabError::param("range scaling needs at least two trajectories"));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.first().is_none_or(|&n| n < 2) {
        return Err(LabError::param("range scaling needs n >= 2"));
    }
    let n_max = *ns.last().unwrap();
    let lattice = LatticeBox::new(2, radius)?;
    let opts = WalkOptions { checkpoints: ns.clone(), local_times: false, displacement: false, override_guard: false };
    let runs = simulate_ensemble(&lattice, lattice.center(), n_max, seed, ensemble, &opts)?;
    let rows = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let values: Vec<f64> = runs.iter().map(|t| t.checkpoints[i].range as f64).collect();
            let (mean, stderr) = mean_stderr(&values);
            RangeRatio {
                n,
                mean_range: mean,
                stderr,
                ratio: range_ratio(n, mean),
                interval: (range_ratio(n, mean - 2.0 * stderr), range_ratio(n, mean + 2.0 * stderr)),
            }
        })
        .collect();
    Ok(RangeScaling { radius, ensemble, rows })
}
