//! `rc-etsim`: figure recipes, parameter sweeps and noisy dynamics for the
//! donor–acceptor–sink model.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical-invariant
//! violation. `RC_ETSIM_THREADS` caps the worker count.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::sweep::Axis;
use commands::Context;
use config::RunConfig;
use error::CliError;
use output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Analytic,
    Noise,
    Rates,
    Dynamics,
    Sweep,
    Figure,
}

#[derive(Debug, Parser)]
#[command(name = "rc-etsim", version, about = "Electron transfer in a donor-acceptor-sink model")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run configuration; the shipped default is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named figure recipe (fig2..fig8).
    #[arg(long)]
    recipe: Option<String>,
    /// Output directory, overriding `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Also estimate the noise correlation from N sampled trajectories.
    #[arg(long, value_name = "N")]
    empirical: Option<usize>,
    /// Sweep axis NAME:START:STOP:N over epsilon, v, gamma or d_sigma; give once or twice.
    #[arg(long, value_name = "NAME:START:STOP:N")]
    axis: Vec<Axis>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("RC_ETSIM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("RC_ETSIM_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    configure_threads()?;
    let config = RunConfig::load(cli.config.as_deref())?;
    if cli.empirical.is_some() && cli.command != Command::Noise {
        return Err(CliError::Config("--empirical applies to the `noise` command only".into()));
    }
    if !cli.axis.is_empty() && cli.command != Command::Sweep {
        return Err(CliError::Config("--axis applies to the `sweep` command only".into()));
    }
    let out_dir = cli.out.clone().unwrap_or_else(|| config.output.path.clone());
    let mut ctx = Context {
        seed: cli.seed.unwrap_or(config.run.seed),
        config,
        out: Output::create(&out_dir)?,
    };
    let recipe = cli.recipe.as_deref();
    match cli.command {
        Command::Analytic => commands::analytic::run(&mut ctx, recipe)?,
        Command::Noise => commands::noise::run(&mut ctx, recipe, cli.empirical)?,
        Command::Rates => commands::rates::run(&mut ctx, recipe)?,
        Command::Dynamics => commands::dynamics::run(&mut ctx, recipe)?,
        Command::Sweep => {
            if let Some(r) = recipe {
                return Err(CliError::Config(format!("`sweep` has no recipes, got `{r}`")));
            }
            commands::sweep::run(&mut ctx, &cli.axis)?
        }
        Command::Figure => commands::figure(&mut ctx, recipe)?,
    }
    Ok(ctx.out.written)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rc-etsim: {e}");
            e.exit_code()
        }
    }
}
