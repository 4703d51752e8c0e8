//! Audits of the lamp-distance sandwich along lamplighter trajectories.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;
use crate::lamplighter::{lamp_distance_bounds, lamp_sum, lamplighter_ensemble, wreath_distances_from, WreathState, EXACT_MAX_VERTICES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditRow {
    pub graph_id: usize,
    /// Trajectory index times checkpoint count plus checkpoint index.
    pub pair_id: usize,
    pub n: u64,
    pub range: u64,
    pub lamp_sum: usize,
    pub lower: usize,
    pub exact: Option<usize>,
    pub upper: usize,
    /// `(2M + 1) R_n` with `M` the maximum degree.
    pub bound: u64,
}

impl AuditRow {
    /// `lower <= exact <= upper` (vacuous without an exact value).
    pub fn sandwich_holds(&self) -> bool {
        self.lower <= self.upper && self.exact.is_none_or(|d| self.lower <= d && d <= self.upper)
    }

    /// `exact <= (2M + 1) R_n` (vacuous without an exact value).
    pub fn range_bound_holds(&self) -> bool {
        self.exact.is_none_or(|d| d as u64 <= self.bound)
    }

    /// `lamp_sum < R_n / 4`.
    pub fn quarter_shortfall(&self) -> bool {
        4 * self.lamp_sum < self.range as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SandwichAudit {
    pub rows: Vec<AuditRow>,
}

impl SandwichAudit {
    pub fn sandwich_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.sandwich_holds()).count()
    }

    pub fn bound_violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.range_bound_holds()).count()
    }

    pub fn exact_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.exact.is_some()).count()
    }

    /// Fraction of rows at time `n` with `lamp_sum < R_n / 4`.
    pub fn quarter_fraction(&self, n: u64) -> Option<f64> {
        let at: Vec<&AuditRow> = self.rows.iter().filter(|r| r.n == n).collect();
        if at.is_empty() {
            return None;
        }
        Some(at.iter().filter(|r| r.quarter_shortfall()).count() as f64 / at.len() as f64)
    }
}

/// Run `ensemble` lamplighter walks from `(0, x0)` and audit every checkpoint.
///
/// Exact distances are attached when `exact` is set; this needs at most
/// [`EXACT_MAX_VERTICES`] vertices.
#[allow(clippy::too_many_arguments)]
pub fn sandwich_audit(
    g: &WeightedGraph,
    graph_id: usize,
    x0: usize,
    checkpoints: &[u64],
    ensemble: usize,
    seed: u64,
    exact: bool,
    override_guard: bool,
) -> Result<SandwichAudit> {
    if checkpoints.is_empty() {
        return Err(LabError::param("at least one checkpoint is required"));
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let n = *cps.last().unwrap();
    let table = if exact {
        if g.vertex_count() > EXACT_MAX_VERTICES {
            return Err(LabError::TooLarge(format!(
                "exact audit needs at most {EXACT_MAX_VERTICES} vertices, got {}",
                g.vertex_count()
            )));
        }
        Some(wreath_distances_from(g, &WreathState::origin(x0))?)
    } else {
        None
    };
    let runs = lamplighter_ensemble(g, x0, n, seed, ensemble, &cps, true, override_guard)?;
    let origin = WreathState::origin(x0);
    let two_m_plus_one = 2 * g.max_degree() as u64 + 1;
    let per: Vec<Vec<AuditRow>> = runs
        .par_iter()
        .enumerate()
        .map(|(t, run)| {
            run.rows
                .iter()
                .zip(&run.states)
                .enumerate()
                .map(|(i, (row, state))| {
                    let (lower, upper) = lamp_distance_bounds(g, &origin, state)?;
                    let exact = match &table {
                        Some(d) => Some(d.get(state)?),
                        None => None,
                    };
                    Ok(AuditRow {
                        graph_id,
                        pair_id: t * cps.len() + i,
                        n: row.n,
                        range: row.range,
                        lamp_sum: lamp_sum(state),
                        lower,
                        exact,
                        upper,
                        bound: two_m_plus_one * row.range,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SandwichAudit { rows: per.into_iter().flatten().collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    #[test]
    fn cycle_audit_is_clean() {
        let edges: Vec<(usize, usize, f64)> = (0..6).map(|i| (i, (i + 1) % 6, 1.0)).collect();
        let g = build_graph(&edges, 6).unwrap();
        let audit = sandwich_audit(&g, 0, 0, &[1, 2, 5, 10, 40], 50, 7, true, true).unwrap();
        assert_eq!(audit.rows.len(), 250);
        assert_eq!(audit.exact_rows(), 250);
        assert_eq!(audit.sandwich_violations(), 0);
        assert_eq!(audit.bound_violations(), 0);
        assert!(audit.rows.iter().all(|r| r.lamp_sum == r.lower));
    }
}
