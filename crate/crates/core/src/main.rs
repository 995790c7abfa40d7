use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cvxlab::experiments::{
    exp_background, exp_counterexample, exp_curvature_gap, exp_loomis_whitney, exp_planar_monotone,
    exp_reverse_lw, exp_slicing, exp_volume_gap, run_all, CurvatureGapParams, ExperimentReport,
    RunConfig,
};

#[derive(Parser)]
#[command(
    name = "cvxlab",
    version,
    about = "Seeded convex-geometry experiments with JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Dimension; repeat or comma-separate where a list is accepted.
    #[arg(long = "dim", value_delimiter = ',')]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo samples, or sphere grid size where one is used.
    #[arg(long)]
    samples: Option<usize>,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    Background(Common),
    LoomisWhitney(Common),
    ReverseLw(Common),
    CurvatureGap {
        #[command(flatten)]
        common: Common,
        /// Ball sizes for the discretization study.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        sweep_seeds: usize,
    },
    Counterexample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.5e-4)]
        vol_tol: f64,
    },
    VolumeGap(Common),
    PlanarMonotone(Common),
    Slicing(Common),
    /// Run every experiment in a config file.
    RunAll {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn dims_or(c: &Common, default: &[usize]) -> Vec<usize> {
    if c.dims.is_empty() {
        default.to_vec()
    } else {
        c.dims.clone()
    }
}

/// One report per dimension for experiments that take a single `n`.
fn per_dim(
    c: &Common,
    default: usize,
    f: impl Fn(usize) -> ExperimentReport,
) -> Vec<ExperimentReport> {
    dims_or(c, &[default]).into_iter().map(f).collect()
}

fn emit(reports: &[ExperimentReport], out: Option<&PathBuf>) -> Result<(), String> {
    let text = if let [rep] = reports {
        rep.to_json().map_err(|e| e.to_string())?
    } else {
        serde_json::to_string_pretty(reports).map_err(|e| e.to_string())?
    };
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (reports, out) = match &cli.command {
        Command::Background(c) => (
            vec![exp_background(&dims_or(c, &[3, 4, 5]), c.trials, c.seed)],
            c.out.clone(),
        ),
        Command::LoomisWhitney(c) => (
            per_dim(c, 3, |n| exp_loomis_whitney(n, c.trials, c.seed)),
            c.out.clone(),
        ),
        Command::ReverseLw(c) => (
            per_dim(c, 3, |n| exp_reverse_lw(n, c.trials, c.seed)),
            c.out.clone(),
        ),
        Command::CurvatureGap {
            common: c,
            sweep,
            sweep_seeds,
        } => {
            let reps = per_dim(c, 3, |n| {
                exp_curvature_gap(&CurvatureGapParams {
                    n,
                    m_ball: c.samples.unwrap_or(200),
                    seed: c.seed,
                    sweep: sweep.clone(),
                    sweep_seeds: *sweep_seeds,
                })
            });
            (reps, c.out.clone())
        }
        Command::Counterexample { common: c, vol_tol } => (
            vec![exp_counterexample(
                &dims_or(c, &[4, 5, 6, 7, 8, 9]),
                c.samples.unwrap_or(1_000_000),
                c.seed,
                *vol_tol,
            )],
            c.out.clone(),
        ),
        Command::VolumeGap(c) => (
            per_dim(c, 3, |n| {
                exp_volume_gap(n, c.trials, c.seed, c.samples.unwrap_or(100))
            }),
            c.out.clone(),
        ),
        Command::PlanarMonotone(c) => (vec![exp_planar_monotone(c.trials, c.seed)], c.out.clone()),
        Command::Slicing(c) => (
            per_dim(c, 4, |n| exp_slicing(n, c.trials, c.seed)),
            c.out.clone(),
        ),
        Command::RunAll { config, out } => {
            let cfg = match RunConfig::read(config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("cvxlab: {e}");
                    return ExitCode::from(2);
                }
            };
            match run_all(&cfg, out) {
                Ok(reports) => (reports, None),
                Err(e) => {
                    eprintln!("cvxlab: {e}");
                    return ExitCode::from(2);
                }
            }
        }
    };

    if !matches!(cli.command, Command::RunAll { .. }) {
        if let Err(e) = emit(&reports, out.as_ref()) {
            eprintln!("cvxlab: {e}");
            return ExitCode::from(2);
        }
    }
    let mut ok = true;
    for rep in &reports {
        if let Some(err) = &rep.error {
            eprintln!("{}: error: {err}", rep.name);
        }
        for (name, c) in rep.checks.iter().filter(|(_, c)| !c.pass) {
            eprintln!(
                "{} {:?}: FAIL {name} value={} threshold={}",
                rep.name, rep.dims, c.value, c.threshold
            );
        }
        ok &= rep.passed();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
