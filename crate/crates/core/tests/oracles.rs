//! Derived values checked against independent closed forms and exact
//! computations.

mod common;

use common::*;
use lamplab::experiments::{confinement_rate, exponent_triad, range_ratio, TriadOptions};
use lamplab::generators::{gasket_walk_dim, make_carpet, make_gasket, make_lattice};
use lamplab::graph::graph_stats_window;
use lamplab::lamplighter::{lamplighter_ensemble, lamplighter_step, return_prob_collapsed, CollapsedMode, WreathState};
use lamplab::spectral::{effective_resistance, green_and_return, return_tail, rho_growth, GreenOptions};
use lamplab::walk::{heat_kernel_exact, heat_kernel_with, simulate_ensemble, HeatOptions, WalkOptions};
use rand::RngCore;

#[test]
fn line_kernel_matches_binomial() {
    let g = make_lattice(1, 2100, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    let run = heat_kernel_with(&g, x, 4000, &HeatOptions::default()).unwrap();
    for (n, &p) in run.even_diagonal().iter().enumerate() {
        let b = line_return_binomial(n);
        assert!((p - b).abs() <= 1e-12 * b, "n = {n}: {p} vs {b}");
    }
}

#[test]
fn line_collapsed_spectral_matches_enumeration() {
    let g = path_graph(41);
    for n in 1..=14u64 {
        let exact = to_f64(collapsed_rational(&g, 20, n as usize));
        let est = return_prob_collapsed(&g, 20, n, &CollapsedMode::Spectral).unwrap();
        assert!((est.return_prob - exact).abs() <= 1e-13, "n = {n}");
    }
}

#[test]
fn line_rho_is_half_the_exit_distance() {
    let g = make_lattice(1, 200, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    for row in rho_growth(&g, x, &[1, 2, 7, 50, 150]).unwrap() {
        assert!((row.rho - (row.n + 1) as f64 / 2.0).abs() <= 1e-8);
    }
}

#[test]
fn gasket_corner_resistance_grows_by_five_thirds() {
    for level in 1..=6 {
        let g = make_gasket(level).unwrap();
        let c = &g.meta().boundary;
        let r = effective_resistance(&g, &[c[0]], &[c[1]]).unwrap().resistance;
        let expected = 2.0 / 3.0 * (5.0f64 / 3.0).powi(level as i32);
        assert!((r - expected).abs() <= 1e-8 * expected, "level {level}: {r} vs {expected}");
    }
}

#[test]
fn family_counts_and_degrees() {
    for level in 1..=6u32 {
        let g = make_gasket(level).unwrap();
        assert_eq!(g.vertex_count(), 3 * (3usize.pow(level) + 1) / 2);
        let boundary = g.boundary_mask();
        for v in 0..g.vertex_count() {
            assert_eq!(g.degree(v), if boundary[v] { 2 } else { 4 });
        }
    }
    for level in 1..=3u32 {
        assert_eq!(make_carpet(level).unwrap().vertex_count(), 8usize.pow(level));
    }
}

#[test]
fn square_lattice_volume_and_holding() {
    let g = make_lattice(2, 200, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    // |B(x, r)| = 2r^2 + 2r + 1 bends the log-log line at small r
    let stats = graph_stats_window(&g, &[x], 16, 128).unwrap();
    assert!((stats.d_f.slope - 2.0).abs() <= 0.05, "{}", stats.d_f.slope);
    let p = g.transition(x, g.neighbor_ids(x)[0] as usize);
    assert_eq!(p, 0.25);
}

#[test]
fn square_lattice_triad_is_consistent() {
    let g = make_lattice(2, 200, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    let opts = TriadOptions {
        volume_center: x,
        volume_window: (16, 128),
        confinement_center: x,
        confinement_radii: vec![3, 7, 15, 31],
        walk_dim_guess: 2.0,
        kernel_center: x,
        kernel_window: (64, 2048),
    };
    let t = exponent_triad(&g, &opts).unwrap();
    assert!((t.d_w.slope - 2.0).abs() <= 0.1, "{:?}", t.d_w);
    assert!((t.half_d_s.slope - 1.0).abs() <= 0.03, "{:?}", t.half_d_s);
    assert!(t.consistency <= 0.05, "{}", t.consistency);
}

fn scaled_rates(g: &lamplab::WeightedGraph, x: usize, dw: f64) -> Vec<f64> {
    [4usize, 8, 16]
        .iter()
        .map(|&r| {
            let c = confinement_rate(g, x, r, dw).unwrap();
            assert!(c.r_squared >= 0.99, "r = {r}: R^2 {}", c.r_squared);
            c.rate * (r as f64).powf(dw)
        })
        .collect()
}

#[test]
fn confinement_decays_on_the_walk_time_scale() {
    let line = make_lattice(1, 100, 1.0).unwrap();
    let gasket = make_gasket(7).unwrap();
    for scaled in [scaled_rates(&line, line.meta().interior.unwrap(), 2.0), scaled_rates(&gasket, 0, gasket_walk_dim())] {
        let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
        let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
        assert!(hi / lo < 3.0, "{scaled:?}");
    }
}

#[test]
fn escape_probability_falls_with_distance() {
    let g = make_lattice(2, 200, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    let runs = simulate_ensemble(&g, x, 400, 3, 4000, &WalkOptions { local_times: false, ..Default::default() }).unwrap();
    let probs: Vec<f64> = [1u32, 2, 4, 8, 16, 32]
        .iter()
        .map(|&r| runs.iter().filter(|t| t.max_displacement >= 3 * r).count() as f64 / runs.len() as f64)
        .collect();
    assert!(probs.windows(2).all(|w| w[1] <= w[0]), "{probs:?}");
    assert!(probs[0] > probs[probs.len() - 1]);
}

#[test]
fn empirical_positions_match_exact_kernel() {
    let mut r = rng(21);
    let g = random_connected(&mut r, 30, 0.1, true);
    let n = 12;
    let exact = heat_kernel_exact(&g, 0, n).unwrap();
    let opts = WalkOptions { local_times: false, displacement: false, override_guard: true, ..Default::default() };
    let runs = simulate_ensemble(&g, 0, n as u64, 4, 1_000_000, &opts).unwrap();
    let mut counts = vec![0u64; g.vertex_count()];
    for t in &runs {
        counts[t.final_vertex] += 1;
    }
    let total = runs.len() as f64;
    for (y, &c) in counts.iter().enumerate() {
        let p = exact.vectors[n].get(y);
        let se = (p * (1.0 - p) / total).sqrt();
        assert!((c as f64 / total - p).abs() <= 4.0 * se + 1e-12, "vertex {y}: {} vs {p}", c as f64 / total);
    }
}

#[test]
fn one_lamplighter_step_has_quarter_weights() {
    let mut r = rng(22);
    let g = random_connected(&mut r, 6, 0.4, true);
    let s = WreathState::new([1, 4], 1);
    let samples = 1_000_000;
    let mut counts = std::collections::HashMap::new();
    let mut draws = rng(23);
    for _ in 0..samples {
        *counts.entry(lamplighter_step(&g, &s, &mut draws)).or_insert(0u64) += 1;
    }
    let mut expected = std::collections::HashMap::new();
    for &y in g.neighbor_ids(1) {
        let y = y as usize;
        let p = g.transition(1, y) / 4.0;
        for a in [false, true] {
            for b in [false, true] {
                let mut t = s.clone();
                if a {
                    t.toggle(1);
                }
                t.move_to(y);
                if b {
                    t.toggle(y);
                }
                *expected.entry(t).or_insert(0.0) += p;
            }
        }
    }
    assert_eq!(counts.len(), expected.len());
    for (state, p) in &expected {
        let freq = *counts.get(state).unwrap_or(&0) as f64 / samples as f64;
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((freq - p).abs() <= 4.0 * se, "{state:?}: {freq} vs {p}");
    }
}

#[test]
fn cubic_return_probability() {
    let g = make_lattice(3, 40, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    let s = green_and_return(&g, x, &GreenOptions::default()).unwrap();
    assert!((s.first_return - 0.3405).abs() <= 0.005, "{}", s.first_return);
    assert!(s.identity_gap() <= 1e-3);
}

#[test]
fn cubic_return_tail_decays_like_inverse_root() {
    let g = make_lattice(3, 40, 1.0).unwrap();
    let x = g.meta().interior.unwrap();
    let tail = return_tail(&g, x, &[16, 32, 64], 6000).unwrap();
    let factor = 2f64.powf(1.0 - 1.5);
    for w in tail.windows(2) {
        let ratio = w[1].1 / w[0].1;
        assert!(ratio >= 0.7 * factor && ratio <= 1.3 * factor, "{} -> {}: {ratio}", w[0].0, w[1].0);
    }
}

#[test]
fn range_ratio_formula() {
    let n = 1_000_000u64;
    let mean = std::f64::consts::PI * n as f64 / (n as f64).ln();
    assert!((range_ratio(n, mean) - 1.0).abs() < 1e-12);
}

#[test]
fn ensembles_do_not_depend_on_worker_count() {
    let g = make_gasket(5).unwrap();
    let x = g.meta().interior.unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let walks = simulate_ensemble(&g, x, 64, 99, 300, &WalkOptions { checkpoints: vec![16, 32, 64], ..Default::default() }).unwrap();
            let lamps = lamplighter_ensemble(&g, x, 64, 99, 300, &[16, 64], true, false).unwrap();
            (walks, lamps)
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn draws_are_reproducible() {
    let (mut a, mut b) = (lamplab::rng::stream_rng(5, 7), lamplab::rng::stream_rng(5, 7));
    let mut c = lamplab::rng::stream_rng(5, 8);
    let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
    assert_eq!(x, y);
    assert_ne!(x, z);
}
