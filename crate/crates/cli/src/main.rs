//! `lamplab`: generate graphs, run walks and experiments, emit CSV.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lamplab::experiments::{manifest_line, Config};
use lamplab::LabError;

#[derive(Parser, Debug)]
#[command(name = "lamplab", version, about = "Random walks on lamplighter graphs over lattices and fractals")]
struct Cli {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (64-bit).
    #[arg(long, global = true, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, allow_hyphen_values = true)]
    workers: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Where the graph comes from: an edge-list file or a generator family.
#[derive(Args, Debug, Default)]
struct GraphArgs {
    /// Edge-list file written by `generate`.
    #[arg(long)]
    graph: Option<String>,
    /// lattice, gasket or carpet.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dim: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    level: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph and write it as an edge list.
    Generate {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Simple random walks: range, local time and displacement.
    Walk {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        steps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        ensemble: Option<String>,
        /// Comma-separated checkpoint times.
        #[arg(long, allow_hyphen_values = true)]
        checkpoints: Option<String>,
    },
    /// Exact on-diagonal heat kernel p_n(x, x).
    Heatkernel {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        nmax: Option<String>,
    },
    /// Lamplighter walks with lamp counts and distance bounds.
    Lamplighter {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        steps: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        ensemble: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        checkpoints: Option<String>,
    },
    /// Resistance growth rho(x, n).
    Resistance {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long = "n-list", allow_hyphen_values = true)]
        n_list: Option<String>,
        /// single or double.
        #[arg(long)]
        convention: Option<String>,
    },
    /// Band statistics of scaled range, local-time and lamp-distance functionals.
    Lil {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        /// Half the spectral dimension.
        #[arg(long, allow_hyphen_values = true)]
        ds: Option<String>,
        /// Comma-separated functional tags, or `all`.
        #[arg(long)]
        functional: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        ensemble: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        nmax: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        checkpoints: Option<String>,
    },
    /// Audit lamp-distance bounds along lamplighter trajectories.
    SandwichAudit {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long = "n-list", allow_hyphen_values = true)]
        n_list: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        ensemble: Option<String>,
        /// true, false or auto.
        #[arg(long)]
        exact: Option<String>,
    },
    /// Fit the lamplighter return exponent.
    Exponent {
        #[command(flatten)]
        graph: GraphArgs,
        /// collapsed or exact-kernel.
        #[arg(long)]
        estimator: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        nmin: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        nmax: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        particles: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        replicates: Option<String>,
    },
}

fn graph(g: &GraphArgs) -> Vec<(&'static str, &Option<String>)> {
    vec![
        ("graph", &g.graph),
        ("family", &g.family),
        ("dim", &g.dim),
        ("radius", &g.radius),
        ("level", &g.level),
        ("weight", &g.weight),
    ]
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Walk { .. } => "walk",
            Command::Heatkernel { .. } => "heatkernel",
            Command::Lamplighter { .. } => "lamplighter",
            Command::Resistance { .. } => "resistance",
            Command::Lil { .. } => "lil",
            Command::SandwichAudit { .. } => "sandwich-audit",
            Command::Exponent { .. } => "exponent",
        }
    }

    /// Flag values as `(config key, value)` pairs.
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        match self {
            Command::Generate { graph: g } => graph(g),
            Command::Walk { graph: g, start, steps, ensemble, checkpoints }
            | Command::Lamplighter { graph: g, start, steps, ensemble, checkpoints } => {
                let mut f = graph(g);
                f.extend([("start", start), ("steps", steps), ("ensemble", ensemble), ("checkpoints", checkpoints)]);
                f
            }
            Command::Heatkernel { graph: g, start, nmax } => {
                let mut f = graph(g);
                f.extend([("start", start), ("nmax", nmax)]);
                f
            }
            Command::Resistance { graph: g, start, n_list, convention } => {
                let mut f = graph(g);
                f.extend([("start", start), ("n_list", n_list), ("convention", convention)]);
                f
            }
            Command::Lil { graph: g, start, ds, functional, ensemble, nmax, checkpoints } => {
                let mut f = graph(g);
                f.extend([
                    ("start", start),
                    ("ds", ds),
                    ("functional", functional),
                    ("ensemble", ensemble),
                    ("nmax", nmax),
                    ("checkpoints", checkpoints),
                ]);
                f
            }
            Command::SandwichAudit { graph: g, start, n_list, ensemble, exact } => {
                let mut f = graph(g);
                f.extend([("start", start), ("n_list", n_list), ("ensemble", ensemble), ("exact", exact)]);
                f
            }
            Command::Exponent { graph: g, estimator, nmin, nmax, particles, replicates } => {
                let mut f = graph(g);
                f.extend([
                    ("estimator", estimator),
                    ("nmin", nmin),
                    ("nmax", nmax),
                    ("particles", particles),
                    ("replicates", replicates),
                ]);
                f
            }
        }
    }
}

fn build_config(cli: &Cli) -> Result<Config, LabError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::new(),
    };
    if let Some(c) = cfg.get("command") {
        if c != cli.command.name() {
            return Err(LabError::InvalidParameter(format!("configuration is for `{c}`, not `{}`", cli.command.name())));
        }
    }
    cfg.set("command", cli.command.name())?;
    for (key, value) in cli.command.flags() {
        if let Some(v) = value {
            cfg.set(key, v.as_str())?;
        }
    }
    if let Some(v) = &cli.seed {
        cfg.set("seed", v.as_str())?;
    }
    if let Some(v) = &cli.workers {
        cfg.set("workers", v.as_str())?;
    }
    if let Some(p) = &cli.out {
        cfg.set("out", p.display().to_string())?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), LabError> {
    let cfg = build_config(&cli)?;
    let workers: usize = cfg.parsed_or("workers", 0)?;
    if cfg.contains("workers") && workers == 0 {
        return Err(LabError::InvalidParameter("workers must be at least 1".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        pool = pool.num_threads(workers);
    }
    let pool = pool.build().map_err(|e| LabError::InvalidParameter(format!("thread pool: {e}")))?;
    let out: Option<PathBuf> = cfg.get("out").map(PathBuf::from);
    let name = cli.command.name();
    let table = pool.install(|| commands::dispatch(name, &cfg))?;
    let Some(table) = table else {
        return Ok(());
    };
    let manifest = manifest_line(name, &cfg);
    match out {
        Some(path) => {
            let file = std::fs::File::create(&path).map_err(|source| LabError::Io { path: path.clone(), source })?;
            table.write_to(std::io::BufWriter::new(file), &manifest)
        }
        None => table.write_to(std::io::stdout().lock(), &manifest),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("LAMPLAB_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() { ExitCode::from(1) } else { ExitCode::from(2) }
        }
    }
}
