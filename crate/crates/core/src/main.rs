//! Command-line front end: thin argument parsing over the library
//! runner. See the examples directory for programmatic use.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use vprk::config::{problem_names, RunConfig};
use vprk::projections::ProjectionKind;
use vprk::runner;
use vprk::Result;

#[derive(Parser)]
#[command(
    name = "vprk",
    about = "Variational partitioned Runge-Kutta integrators with Dirac-constraint projections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// Configuration file (flat key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. --set sim.h=0.05 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configured trajectory and write CSV/summary artifacts.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Cartesian-product sweep over configuration axes.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Sweep axis, e.g. --axis sim.h=0.2,0.1,0.05 (repeatable).
        #[arg(long, value_name = "KEY=V1,V2,...")]
        axis: Vec<String>,
        /// Worker threads for independent runs.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Advect the standard loop/surface and evaluate Poincare invariants.
    Poincare {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Measure convergence orders over a list of step sizes.
    Convergence {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Step sizes, largest first.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05, 0.025])]
        h_list: Vec<f64>,
        /// Common end time of all runs.
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
    },
    /// List registered problems, tableaux and projections.
    List {
        /// One of: problems, tableaux, projections, all.
        #[arg(default_value = "all")]
        what: String,
    },
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::parse(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            vprk::Error::Config(format!("--set expects KEY=VALUE, got `{kv}`"))
        })?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() {
    if let Err(e) = dispatch() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn dispatch() -> Result<()> {
    match Cli::parse().command {
        Command::Run { cfg } => {
            let config = load_config(&cfg)?;
            let artifacts = runner::run(&config, cfg.out.as_deref())?;
            let s = &artifacts.summary;
            println!(
                "{} {}: {} steps, |phi| final {:.3e} max {:.3e}, dH final {:.3e}",
                s.problem,
                s.method,
                s.completed_steps,
                s.final_constraint_residual,
                s.max_constraint_residual,
                s.final_energy_error
            );
            if let Some(n) = s.diverged_at {
                println!(
                    "integration diverged at step {n}: {}",
                    s.divergence_detail.as_deref().unwrap_or("(no detail)")
                );
            }
            if let Some(p) = &artifacts.summary_path {
                println!("artifacts: {}", p.parent().unwrap().display());
            }
        }
        Command::Sweep {
            cfg,
            axis,
            workers,
        } => {
            let config = load_config(&cfg)?;
            let mut axes = Vec::new();
            for a in &axis {
                let (k, vs) = a.split_once('=').ok_or_else(|| {
                    vprk::Error::Config(format!("--axis expects KEY=V1,V2,..., got `{a}`"))
                })?;
                axes.push((
                    k.to_string(),
                    vs.split(',').map(|s| s.trim().to_string()).collect(),
                ));
            }
            let out = runner::sweep(&config, &axes, cfg.out.as_deref(), workers)?;
            for e in &out.entries {
                let ov = e
                    .overrides
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                match &e.outcome {
                    Ok(s) => {
                        let status = match s.diverged_at {
                            Some(n) => format!("diverged at step {n}"),
                            None => "ok".into(),
                        };
                        println!("[{}] {} -> {} ({} steps)", e.index, ov, status, s.completed_steps);
                    }
                    Err(msg) => println!("[{}] {} -> error: {}", e.index, ov, msg),
                }
            }
            if let Some(p) = &out.table_path {
                println!("table: {}", p.display());
            }
        }
        Command::Poincare { cfg } => {
            let config = load_config(&cfg)?;
            let out = runner::poincare(&config, cfg.out.as_deref())?;
            if let Some(i1) = &out.i1 {
                println!(
                    "I1[{}] t=0: {:.9e}, max relative variation {:.3e}",
                    config.diagnostics.form.as_str(),
                    i1.values[0],
                    i1.max_relative_error()
                );
            }
            if let Some(i2) = &out.i2 {
                println!(
                    "I2[{}] t=0: {:.9e}, max relative variation {:.3e}",
                    config.diagnostics.form.as_str(),
                    i2.values[0],
                    i2.max_relative_error()
                );
            }
        }
        Command::Convergence {
            cfg,
            h_list,
            t_end,
        } => {
            let config = load_config(&cfg)?;
            let fit = runner::convergence(&config, &h_list, t_end, cfg.out.as_deref())?;
            for p in &fit.points {
                println!(
                    "h = {:<8} solution {:.3e}  energy {:.3e}  momentum {}",
                    p.h,
                    p.solution_error,
                    p.energy_error,
                    p.momentum_error
                        .map(|m| format!("{m:.3e}"))
                        .unwrap_or_else(|| "-".into())
                );
            }
            for h in &fit.excluded {
                println!("h = {h}: run failed, excluded");
            }
            println!(
                "slopes: solution {}  energy {}  momentum {}",
                fit.solution_slope.map(|s| format!("{s:.2}")).unwrap_or_else(|| "-".into()),
                fit.energy_slope.map(|s| format!("{s:.2}")).unwrap_or_else(|| "-".into()),
                fit.momentum_slope.map(|s| format!("{s:.2}")).unwrap_or_else(|| "-".into()),
            );
        }
        Command::List { what } => {
            let what = what.to_ascii_lowercase();
            if what == "problems" || what == "all" {
                println!("problems:");
                for p in problem_names() {
                    println!("  {p}");
                }
            }
            if what == "tableaux" || what == "all" {
                println!("tableaux:");
                for t in vprk::tableaux::registry_names() {
                    println!("  {t}");
                }
            }
            if what == "projections" || what == "all" {
                println!("projections:");
                for p in ProjectionKind::all() {
                    println!("  {}", p.as_str());
                }
            }
        }
    }
    Ok(())
}
