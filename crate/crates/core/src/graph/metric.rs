use std::collections::VecDeque;

use crate::error::{LabError, Result};
use crate::fit::{dyadic, loglog_fit, FitResult};

use super::WeightedGraph;

/// Unweighted hop distances from `x` to every vertex.
pub fn bfs_distances(g: &WeightedGraph, x: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::with_capacity(64);
    dist[x] = 0;
    queue.push_back(x);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v] + 1;
        for &w in g.neighbor_ids(v) {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = dv;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Hop count of a shortest path between `x` and `y`.
pub fn graph_distance(g: &WeightedGraph, x: usize, y: usize) -> Result<usize> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    if x == y {
        return Ok(0);
    }
    let mut dist = vec![u32::MAX; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[x] = 0;
    queue.push_back(x);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbor_ids(v) {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                if w == y {
                    return Ok(dist[w] as usize);
                }
                queue.push_back(w);
            }
        }
    }
    unreachable!("graphs are validated connected")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub vertices: Vec<usize>,
    pub volume: f64,
}

/// `B(x, r)` and its measure `V(x, r)`.
pub fn ball_volume(g: &WeightedGraph, x: usize, r: usize) -> Result<Ball> {
    g.check_vertex(x)?;
    let dist = bfs_distances(g, x);
    let vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| dist[v] as usize <= r).collect();
    let volume = vertices.iter().map(|&v| g.measure(v)).sum();
    Ok(Ball { vertices, volume })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeSample {
    pub center: usize,
    pub radius: usize,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub max_degree: usize,
    pub p0: f64,
    pub volumes: Vec<VolumeSample>,
    pub d_f: FitResult,
    /// `min V(x,r) / r^d_f` over the fitted samples.
    pub c1: f64,
    /// `max V(x,r) / r^d_f` over the fitted samples.
    pub c2: f64,
    /// Set when `r_max` exceeded some center's eccentricity.
    pub clipped: bool,
}

/// Volume-growth statistics over the dyadic radii `2, 4, .., r_max`.
pub fn graph_stats(g: &WeightedGraph, centers: &[usize], r_max: usize) -> Result<GraphStats> {
    graph_stats_window(g, centers, 2, r_max)
}

/// As [`graph_stats`] but fitting only dyadic radii in `[r_min, r_max]`.
pub fn graph_stats_window(
    g: &WeightedGraph,
    centers: &[usize],
    r_min: usize,
    r_max: usize,
) -> Result<GraphStats> {
    if centers.is_empty() {
        return Err(LabError::param("graph_stats needs at least one sample center"));
    }
    if r_max < 2 || r_min < 1 || r_min > r_max {
        return Err(LabError::param(format!("invalid radius window [{r_min}, {r_max}]")));
    }
    let mut volumes = Vec::new();
    let mut clipped = false;
    for &c in centers {
        g.check_vertex(c)?;
        let dist = bfs_distances(g, c);
        let ecc = dist.iter().copied().max().unwrap_or(0) as usize;
        let top = if r_max > ecc {
            clipped = true;
            ecc
        } else {
            r_max
        };
        // cumulative measure by distance layer
        let mut layer = vec![0.0; ecc + 1];
        for v in 0..g.vertex_count() {
            layer[dist[v] as usize] += g.measure(v);
        }
        let mut acc = 0.0;
        let mut cum = Vec::with_capacity(ecc + 1);
        for m in layer {
            acc += m;
            cum.push(acc);
        }
        volumes.push(VolumeSample { center: c, radius: 0, volume: cum[0] });
        for r in dyadic(r_min.max(1) as u64, top as u64) {
            volumes.push(VolumeSample { center: c, radius: r as usize, volume: cum[r as usize] });
        }
    }
    let fit_samples: Vec<&VolumeSample> = volumes.iter().filter(|s| s.radius >= r_min.max(1)).collect();
    let xs: Vec<f64> = fit_samples.iter().map(|s| s.radius as f64).collect();
    let ys: Vec<f64> = fit_samples.iter().map(|s| s.volume).collect();
    let d_f = loglog_fit(&xs, &ys)?;
    let ratios = fit_samples.iter().map(|s| s.volume / (s.radius as f64).powf(d_f.slope));
    let (c1, c2) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    if clipped {
        log::warn!("graph_stats: r_max {r_max} clipped to a center's eccentricity");
    }
    Ok(GraphStats { max_degree: g.max_degree(), p0: g.p0(), volumes, d_f, c1, c2, clipped })
}
