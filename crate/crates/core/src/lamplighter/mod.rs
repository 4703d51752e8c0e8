//! The wreath product `Z_2 wr G` and its switch-walk-switch walk.
//!
//! A state `(f, x)` is a finite set of lit lamps and the lighter's position.
//! One step flips the lamp at `x` with probability 1/2, moves to `y` with
//! probability `p(x, y)`, then flips the lamp at `y` with probability 1/2.

mod collapsed;
mod cover;
mod distance;

pub use collapsed::{
    line_return_dp, line_return_spectral, return_prob_collapsed, CollapsedEstimate, CollapsedMode,
    MAX_WIDTH_CUTOFF,
};
pub use cover::{
    cover_path_surgery, cover_path_tree, cover_path_tree_to, dfs_cover_walk, surgery_from, CoverPath,
    CoverViolation, SurgeryOutcome,
};
pub use distance::{
    lamp_distance_bounds, steiner_superset, wreath_distance_exact, wreath_distances_from, WreathDistances,
    EXACT_MAX_VERTICES,
};

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::graph::WeightedGraph;
use crate::rng::{rng_from_seed, stream_seed, unit_from_bits};
use crate::topology::WalkGraph;
use crate::walk::{check_start, guard_check, VisitSet};

/// A vertex of `Z_2 wr G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathState {
    /// Lit lamps, sorted and without duplicates.
    lamps: Vec<usize>,
    position: usize,
}

impl WreathState {
    pub fn new(lamps: impl IntoIterator<Item = usize>, position: usize) -> Self {
        let mut lamps: Vec<usize> = lamps.into_iter().collect();
        lamps.sort_unstable();
        lamps.dedup();
        WreathState { lamps, position }
    }

    /// All lamps off, lighter at `x`.
    pub fn origin(x: usize) -> Self {
        WreathState { lamps: Vec::new(), position: x }
    }

    pub fn lamps(&self) -> &[usize] {
        &self.lamps
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn is_lit(&self, v: usize) -> bool {
        self.lamps.binary_search(&v).is_ok()
    }

    pub fn toggle(&mut self, v: usize) {
        match self.lamps.binary_search(&v) {
            Ok(i) => {
                self.lamps.remove(i);
            }
            Err(i) => self.lamps.insert(i, v),
        }
    }

    pub fn move_to(&mut self, y: usize) {
        self.position = y;
    }

    /// Lamps lit in exactly one of the two states, sorted.
    pub fn lamp_difference(&self, other: &WreathState) -> Vec<usize> {
        let (a, b) = (&self.lamps, &other.lamps);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                out.push(b[j]);
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        out
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.position >= n {
            return Err(LabError::InvalidVertex { vertex: self.position, n });
        }
        if let Some(&v) = self.lamps.last() {
            if v >= n {
                return Err(LabError::InvalidVertex { vertex: v, n });
            }
        }
        Ok(())
    }
}

/// Number of lit lamps.
pub fn lamp_sum(s: &WreathState) -> usize {
    s.lamps.len()
}

/// One switch-walk-switch step. A single 64-bit draw supplies the move
/// (top 53 bits) and both coin flips (lowest two bits).
pub fn lamplighter_step<R: RngCore + ?Sized>(g: &WeightedGraph, s: &WreathState, rng: &mut R) -> WreathState {
    let bits = rng.next_u64();
    let mut next = s.clone();
    if bits & 1 == 1 {
        next.toggle(s.position);
    }
    let y = g.walk_step(s.position, unit_from_bits(bits));
    next.position = y;
    if bits & 2 == 2 {
        next.toggle(y);
    }
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LampRow {
    pub n: u64,
    pub position: usize,
    pub lamp_sum: u64,
    /// `R_n` of the lighter's path.
    pub range: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LampTrajectory {
    pub start: usize,
    pub seed: u64,
    pub rows: Vec<LampRow>,
    /// Full states at the checkpoints, when requested.
    pub states: Vec<WreathState>,
}

/// Run the lamplighter walk from `(0, x0)`, recording checkpoint rows.
///
/// Uses the same draw layout as [`lamplighter_step`], so for a
/// [`WeightedGraph`] the path equals repeated calls to that function.
pub fn simulate_lamplighter<G: WalkGraph + ?Sized>(
    g: &G,
    x0: usize,
    n: u64,
    seed: u64,
    checkpoints: &[u64],
    keep_states: bool,
    override_guard: bool,
) -> Result<LampTrajectory> {
    check_start(g, x0)?;
    if !override_guard {
        guard_check(g, x0, n)?;
    }
    Ok(run_lamplighter(g, x0, n, seed, checkpoints, keep_states))
}

/// `count` lamplighter trajectories; trajectory `k` uses `stream_seed(master, k)`.
pub fn lamplighter_ensemble<G: WalkGraph + ?Sized>(
    g: &G,
    x0: usize,
    n: u64,
    master: u64,
    count: usize,
    checkpoints: &[u64],
    keep_states: bool,
    override_guard: bool,
) -> Result<Vec<LampTrajectory>> {
    check_start(g, x0)?;
    if !override_guard {
        guard_check(g, x0, n)?;
    }
    Ok((0..count as u64)
        .into_par_iter()
        .map(|k| run_lamplighter(g, x0, n, stream_seed(master, k), checkpoints, keep_states))
        .collect())
}

fn run_lamplighter<G: WalkGraph + ?Sized>(
    g: &G,
    x0: usize,
    n: u64,
    seed: u64,
    checkpoints: &[u64],
    keep_states: bool,
) -> LampTrajectory {
    let mut rng = rng_from_seed(seed);
    let mut lamps = VisitSet::new(g.vertex_count());
    let mut visited = VisitSet::new(g.vertex_count());
    let mut order = vec![x0];
    visited.insert(x0);
    let (mut x, mut range, mut lit) = (x0, 1u64, 0u64);
    let mut rows = Vec::new();
    let mut states = Vec::new();
    let mut cps = checkpoints.iter().copied().filter(|&c| c <= n).peekable();
    let mut record = |k: u64, x: usize, range: u64, lit: u64, lamps: &VisitSet, order: &[usize]| {
        rows.push(LampRow { n: k, position: x, lamp_sum: lit, range });
        if keep_states {
            states.push(WreathState::new(order.iter().copied().filter(|&v| lamps.contains(v)), x));
        }
    };
    for k in 0..=n {
        while cps.peek() == Some(&k) {
            cps.next();
            record(k, x, range, lit, &lamps, &order);
        }
        if k == n {
            break;
        }
        let bits = rng.next_u64();
        if bits & 1 == 1 {
            lit = if lamps.toggle(x) { lit + 1 } else { lit - 1 };
        }
        x = g.step(x, unit_from_bits(bits));
        if visited.insert(x) {
            range += 1;
            order.push(x);
        }
        if bits & 2 == 2 {
            lit = if lamps.toggle(x) { lit + 1 } else { lit - 1 };
        }
    }
    LampTrajectory { start: x0, seed, rows, states }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::make_lattice;
    use crate::rng::rng_from_seed;

    #[test]
    fn state_set_semantics() {
        let s = WreathState::new([3, 1, 3], 0);
        assert_eq!(s.lamps(), &[1, 3]);
        assert_eq!(lamp_sum(&s), 2);
        assert_eq!(lamp_sum(&WreathState::origin(4)), 0);
        let t = WreathState::new([1, 5], 2);
        assert_eq!(s.lamp_difference(&t), vec![3, 5]);
        let mut u = s.clone();
        u.toggle(1);
        u.toggle(7);
        assert_eq!(u.lamps(), &[3, 7]);
        assert!(WreathState::new([9], 0).validate(5).is_err());
    }

    #[test]
    fn step_matches_simulation() {
        let g = make_lattice(1, 50, 1.0).unwrap();
        let x0 = 50;
        let mut rng = rng_from_seed(77);
        let mut s = WreathState::origin(x0);
        for _ in 0..200 {
            s = lamplighter_step(&g, &s, &mut rng);
        }
        let t = simulate_lamplighter(&g, x0, 200, 77, &[200], true, true).unwrap();
        assert_eq!(t.states[0], s);
        assert_eq!(t.rows[0].lamp_sum as usize, lamp_sum(&s));
        assert_eq!(t.rows[0].position, s.position());
    }

    #[test]
    fn lamps_stay_in_range() {
        let g = make_lattice(1, 60, 1.0).unwrap();
        let t = simulate_lamplighter(&g, 60, 400, 3, &[100, 400], true, true).unwrap();
        for (row, st) in t.rows.iter().zip(&t.states) {
            assert!(row.lamp_sum <= row.range);
            let lo = st.lamps().first().copied().unwrap_or(60);
            let hi = st.lamps().last().copied().unwrap_or(60);
            assert!((hi - lo) as u64 + 1 <= row.range);
        }
    }
}
