use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use signorini::adapt::{adapt, AdaptParams, OutputWriter};
use signorini::problem::lookup;

#[derive(Parser)]
#[command(
    version,
    about = "Adaptive P2 finite elements for 2D Signorini contact"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptive SOLVE-ESTIMATE-MARK-REFINE loop.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Built-in problem (`ex71`, `ex72`) or path to a JSON problem file.
    #[arg(long)]
    problem: String,
    /// Number of levels including the initial mesh.
    #[arg(long, default_value_t = 12)]
    levels: usize,
    /// Maximum-marking fraction.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Estimator calibration constant.
    #[arg(long, default_value_t = 0.45)]
    c0: f64,
    /// Active-set parameter (default 2μ + ζ).
    #[arg(long)]
    pdas_c: Option<f64>,
    /// Cells per side of the initial mesh.
    #[arg(long, default_value_t = 4)]
    n0: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Write the active-set iteration history of every level.
    #[arg(long)]
    trace: bool,
    /// Refine uniformly instead of adaptively.
    #[arg(long)]
    uniform: bool,
    /// Dump K and F of every level in MatrixMarket format.
    #[arg(long)]
    dump_matrices: bool,
}

#[derive(Serialize)]
struct Config<'a> {
    problem: &'a str,
    material: signorini::MaterialLaw,
    params: &'a AdaptParams,
    trace: bool,
    dump_matrices: bool,
}

fn solve(args: SolveArgs) -> Result<()> {
    let problem =
        lookup(&args.problem).with_context(|| format!("cannot load problem '{}'", args.problem))?;
    if problem.exact.is_some() {
        let defect = problem.self_check(100)?;
        info!("manufactured data self-check passed (defect {defect:e})");
    }
    let params = AdaptParams {
        levels: args.levels,
        theta: args.theta,
        c0: args.c0,
        pdas_c: args.pdas_c,
        n0: args.n0,
        uniform: args.uniform,
        ..AdaptParams::default()
    };
    params.validate()?;
    let config = Config {
        problem: &problem.name,
        material: problem.material,
        params: &params,
        trace: args.trace,
        dump_matrices: args.dump_matrices,
    };
    let mut out = OutputWriter::create(&args.out, &config, args.trace)
        .with_context(|| format!("cannot write to {}", args.out.display()))?;

    let result = adapt(&problem, &params, |level| {
        out.write_level(level)?;
        if args.dump_matrices {
            let dir = args.out.join(format!("matrices_{}", level.record.level));
            level.system.dump_matrix_market(&dir)?;
        }
        let r = level.record;
        println!(
            "level {:>3}  ndof {:>8}  eta_h {:.4e}  err {}  active {}",
            r.level,
            r.ndof,
            r.eta_h,
            r.err_inf.map_or("-".to_string(), |e| format!("{e:.4e}")),
            r.active_nodes
        );
        Ok(())
    });
    match result {
        Ok(trace) => {
            info!(
                "{} levels written to {}",
                trace.levels.len(),
                args.out.display()
            );
            Ok(())
        }
        Err(failure) => {
            warn!(
                "{} completed levels kept in {}",
                failure.trace.levels.len(),
                args.out.display()
            );
            Err(failure.into())
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Solve(args) => solve(args),
    }
}
