//! Subcommand handlers: read the merged configuration, run, build a table.

use std::path::PathBuf;

use lamplab::experiments::{
    exponent_experiment, fmt_f64, lil_bands, sandwich_audit, Config, CsvTable, Estimator, ExponentOptions, Functional,
    ALL_FUNCTIONALS,
};
use lamplab::generators::{Family, GeneratorSpec};
use lamplab::graph::save_graph;
use lamplab::lamplighter::{lamp_distance_bounds, lamplighter_ensemble, WreathState, EXACT_MAX_VERTICES};
use lamplab::spectral::{rho_growth, Convention};
use lamplab::walk::{checkpoint_schedule, heat_kernel_with, simulate_ensemble, HeatOptions, WalkOptions};
use lamplab::{LabError, Result, WeightedGraph};

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::InvalidParameter(msg.into())
}

/// Generator spec from `family` and its parameters. A missing lattice
/// radius defaults to `default_radius`.
fn generator_spec(cfg: &Config, default_radius: Option<usize>) -> Result<GeneratorSpec> {
    if let Some(path) = cfg.get("graph") {
        return Ok(GeneratorSpec::new(Family::File { path: PathBuf::from(path) }));
    }
    let family = cfg.get("family").ok_or_else(|| invalid("either `graph` or `family` is required"))?;
    let family = match family {
        "lattice" => {
            let dim = cfg.parsed_or("dim", 1usize)?;
            let radius = match (cfg.parsed::<usize>("radius")?, default_radius) {
                (Some(r), _) | (None, Some(r)) => r,
                (None, None) => return Err(invalid("missing required key `radius`")),
            };
            Family::Lattice { dim, radius }
        }
        "gasket" => Family::Gasket { level: cfg.required("level")? },
        "carpet" => Family::Carpet { level: cfg.required("level")? },
        other => return Err(invalid(format!("unknown family `{other}` (expected lattice, gasket or carpet)"))),
    };
    let mut spec = GeneratorSpec::new(family);
    spec.weight = cfg.parsed_or("weight", 1.0)?;
    Ok(spec)
}

/// Lattice radius that keeps an `n`-step walk inside the boundary guard.
fn guard_sized_radius(n: u64) -> usize {
    (3.0 * (n as f64).sqrt()).ceil() as usize + 1
}

fn load(cfg: &Config, steps: Option<u64>) -> Result<WeightedGraph> {
    generator_spec(cfg, steps.map(guard_sized_radius))?.build()
}

fn start_vertex(cfg: &Config, g: &WeightedGraph) -> Result<usize> {
    match cfg.parsed::<usize>("start")? {
        Some(x) => Ok(x),
        None => Ok(g.meta().interior.or(g.meta().origin).unwrap_or(0)),
    }
}

fn checkpoints(cfg: &Config, n: u64) -> Result<Vec<u64>> {
    let mut cps = cfg.list::<u64>("checkpoints")?.unwrap_or_default();
    cps.push(n);
    cps.retain(|&c| c <= n);
    cps.sort_unstable();
    cps.dedup();
    Ok(cps)
}

pub fn dispatch(command: &str, cfg: &Config) -> Result<Option<CsvTable>> {
    match command {
        "generate" => generate(cfg),
        "walk" => walk(cfg).map(Some),
        "heatkernel" => heatkernel(cfg).map(Some),
        "lamplighter" => lamplighter(cfg).map(Some),
        "resistance" => resistance(cfg).map(Some),
        "lil" => lil(cfg).map(Some),
        "sandwich-audit" => audit(cfg).map(Some),
        "exponent" => exponent(cfg).map(Some),
        other => Err(invalid(format!("unknown command `{other}`"))),
    }
}

fn generate(cfg: &Config) -> Result<Option<CsvTable>> {
    let out = cfg.get("out").ok_or_else(|| invalid("generate needs --out"))?;
    let g = load(cfg, None)?;
    save_graph(&g, out)?;
    log::info!("wrote {} vertices and {} edges to {out}", g.vertex_count(), g.edge_count());
    Ok(None)
}

fn walk(cfg: &Config) -> Result<CsvTable> {
    let steps: u64 = cfg.required("steps")?;
    let g = load(cfg, Some(steps))?;
    let x0 = start_vertex(cfg, &g)?;
    let ensemble = cfg.parsed_or("ensemble", 1usize)?;
    let seed = cfg.parsed_or("seed", 0u64)?;
    let opts = WalkOptions { checkpoints: checkpoints(cfg, steps)?, ..Default::default() };
    let runs = simulate_ensemble(&g, x0, steps, seed, ensemble, &opts)?;
    let mut t = CsvTable::new(&["n", "R_n", "Lstar_n", "maxdisp", "final_vertex", "seed"]);
    for run in &runs {
        for c in &run.checkpoints {
            t.push(vec![
                c.n.to_string(),
                c.range.to_string(),
                fmt_f64(c.lstar),
                c.max_displacement.to_string(),
                c.vertex.to_string(),
                run.seed.to_string(),
            ]);
        }
    }
    Ok(t)
}

fn heatkernel(cfg: &Config) -> Result<CsvTable> {
    let nmax: usize = cfg.required("nmax")?;
    let g = load(cfg, Some(nmax as u64))?;
    let x = start_vertex(cfg, &g)?;
    let run = heat_kernel_with(&g, x, nmax, &HeatOptions::default())?;
    let mut t = CsvTable::new(&["n", "p_n", "mass"]);
    for (n, (p, m)) in run.diagonal.iter().zip(&run.mass).enumerate() {
        t.push(vec![n.to_string(), fmt_f64(*p), fmt_f64(*m)]);
    }
    Ok(t)
}

fn lamplighter(cfg: &Config) -> Result<CsvTable> {
    let steps: u64 = cfg.required("steps")?;
    let g = load(cfg, Some(steps))?;
    let x0 = start_vertex(cfg, &g)?;
    let ensemble = cfg.parsed_or("ensemble", 1usize)?;
    let seed = cfg.parsed_or("seed", 0u64)?;
    let cps = checkpoints(cfg, steps)?;
    let runs = lamplighter_ensemble(&g, x0, steps, seed, ensemble, &cps, true, false)?;
    let origin = WreathState::origin(x0);
    let mut t = CsvTable::new(&["n", "position", "lamp_sum", "R_n", "lower", "upper", "seed"]);
    for run in &runs {
        for (row, state) in run.rows.iter().zip(&run.states) {
            let (lo, hi) = lamp_distance_bounds(&g, &origin, state)?;
            t.push(vec![
                row.n.to_string(),
                row.position.to_string(),
                row.lamp_sum.to_string(),
                row.range.to_string(),
                lo.to_string(),
                hi.to_string(),
                run.seed.to_string(),
            ]);
        }
    }
    Ok(t)
}

fn resistance(cfg: &Config) -> Result<CsvTable> {
    let ns: Vec<usize> = cfg.list("n_list")?.ok_or_else(|| invalid("missing required key `n_list`"))?;
    let convention = match cfg.get("convention").unwrap_or("single") {
        "single" => Convention::Single,
        "double" => Convention::Double,
        other => return Err(invalid(format!("unknown convention `{other}` (expected single or double)"))),
    };
    let top = ns.iter().copied().max().unwrap_or(1);
    let g = generator_spec(cfg, Some(top + 2))?.build()?;
    let x = start_vertex(cfg, &g)?;
    let rows = rho_growth(&g, x, &ns)?;
    let mut t = CsvTable::new(&["n", "rho", "convention", "residual"]);
    for r in rows {
        if r.clipped {
            log::warn!("ball of radius {} covers the graph; rho is undefined", r.n);
        }
        let rho = r.rho * Convention::Single.factor() / convention.factor();
        t.push(vec![r.n.to_string(), fmt_f64(rho), convention.label().into(), fmt_f64(r.residual)]);
    }
    Ok(t)
}

fn lil(cfg: &Config) -> Result<CsvTable> {
    let nmax: u64 = cfg.required("nmax")?;
    let ds: f64 = cfg.required("ds")?;
    let functionals: Vec<Functional> = match cfg.get("functional") {
        None | Some("all") => ALL_FUNCTIONALS[..4].to_vec(),
        Some(_) => cfg.list("functional")?.unwrap_or_default(),
    };
    let g = load(cfg, Some(nmax))?;
    let x0 = start_vertex(cfg, &g)?;
    let ensemble = cfg.parsed_or("ensemble", 100usize)?;
    let seed = cfg.parsed_or("seed", 0u64)?;
    let cps = match cfg.list::<u64>("checkpoints")? {
        Some(c) => c,
        None => {
            let top = 63 - nmax.leading_zeros();
            checkpoint_schedule(4, top.max(4), &[nmax]).into_iter().filter(|&c| c <= nmax).collect()
        }
    };
    let stats = lil_bands(&g, x0, ds, &functionals, ensemble, &cps, seed)?;
    let mut t = CsvTable::new(&["functional", "n", "q05", "q50", "q95", "min", "max"]);
    for s in &stats {
        for b in &s.bands {
            t.push(vec![
                s.functional.tag().into(),
                b.n.to_string(),
                fmt_f64(b.q05),
                fmt_f64(b.q50),
                fmt_f64(b.q95),
                fmt_f64(b.min),
                fmt_f64(b.max),
            ]);
        }
    }
    Ok(t)
}

fn audit(cfg: &Config) -> Result<CsvTable> {
    let ns: Vec<u64> = cfg.list("n_list")?.ok_or_else(|| invalid("missing required key `n_list`"))?;
    let top = ns.iter().copied().max().unwrap_or(0);
    let g = load(cfg, Some(top))?;
    let x0 = start_vertex(cfg, &g)?;
    let ensemble = cfg.parsed_or("ensemble", 100usize)?;
    let seed = cfg.parsed_or("seed", 0u64)?;
    let exact = match cfg.get("exact").unwrap_or("auto") {
        "auto" => g.vertex_count() <= EXACT_MAX_VERTICES,
        "true" => true,
        "false" => false,
        other => return Err(invalid(format!("invalid value for `exact`: `{other}` (expected true, false or auto)"))),
    };
    let audit = sandwich_audit(&g, 0, x0, &ns, ensemble, seed, exact, false)?;
    let mut t = CsvTable::new(&["graph_id", "pair_id", "n", "lamp_sum", "R_n", "lower", "exact", "upper", "(2M+1)Rn"]);
    for r in &audit.rows {
        t.push(vec![
            r.graph_id.to_string(),
            r.pair_id.to_string(),
            r.n.to_string(),
            r.lamp_sum.to_string(),
            r.range.to_string(),
            r.lower.to_string(),
            r.exact.map(|d| d.to_string()).unwrap_or_default(),
            r.upper.to_string(),
            r.bound.to_string(),
        ]);
    }
    let (s, b) = (audit.sandwich_violations(), audit.bound_violations());
    if s + b > 0 {
        log::error!("sandwich audit found {s} bound violations and {b} range-bound violations");
    }
    Ok(t)
}

fn exponent(cfg: &Config) -> Result<CsvTable> {
    let defaults = ExponentOptions::default();
    let opts = ExponentOptions {
        n_lo: cfg.parsed_or("nmin", defaults.n_lo)?,
        n_hi: cfg.required("nmax")?,
        estimator: cfg.parsed_or("estimator", Estimator::Collapsed)?,
        particles: cfg.parsed_or("particles", defaults.particles)?,
        replicates: cfg.parsed_or("replicates", defaults.replicates)?,
        seed: cfg.parsed_or("seed", 0u64)?,
        tolerance: defaults.tolerance,
    };
    let spec = generator_spec(cfg, Some(guard_sized_radius(2 * opts.n_hi)))?;
    let r = exponent_experiment(&spec, &opts)?;
    let mut t = CsvTable::new(&[
        "graph",
        "estimator",
        "method",
        "slope",
        "intercept",
        "r_squared",
        "n_lo",
        "n_hi",
        "points",
        "target",
        "tolerance",
        "passed",
        "variance_flag",
    ]);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    t.push(vec![
        r.label.clone(),
        opts.estimator.label().into(),
        r.method.into(),
        fmt_f64(r.fit.slope),
        fmt_f64(r.fit.intercept),
        fmt_f64(r.fit.r_squared),
        fmt_f64(r.fit.window.0),
        fmt_f64(r.fit.window.1),
        r.fit.points.to_string(),
        opt(r.fit.target),
        opt(r.fit.tolerance),
        r.fit.passed().map(|p| p.to_string()).unwrap_or_default(),
        r.variance_flag.to_string(),
    ]);
    Ok(t)
}
