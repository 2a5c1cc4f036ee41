mod commands;
mod config;
mod error;
mod output;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::{CliError, CliResult};
use output::{render, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "catbreed", version, about = "Breed squeezed cat states into GKP grid states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Flat TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for sampled outcomes.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One breeding run with its effective squeezing.
    Breed(Common),
    /// Monte Carlo over sampled homodyne outcomes.
    Sample {
        #[command(flatten)]
        common: Common,
        /// Also write the per-sample table here.
        #[arg(long)]
        samples_out: Option<PathBuf>,
    },
    /// Runs over the product of the sweep axes.
    Sweep(Common),
    /// Effective squeezing and outcome density over (p1, p2) for three cats.
    Map3(Common),
    /// Wigner function of the input cat or the output state on a grid.
    Wigner(Common),
    /// Cross-checks breeding against the number-basis simulator.
    OracleCheck(Common),
}

fn resolve(common: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&common.overrides, common.seed)?;
    cfg.resolve()
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display())))
        }
        None => Ok(std::io::stdout().lock().write_all(bytes)?),
    }
}

fn emit(table: &Table, name: &str, cfg: &RunConfig, common: &Common) -> CliResult<()> {
    write_to(common.out.as_deref(), &render(table, name, cfg, common.format)?)
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Breed(c) => {
            let cfg = resolve(c)?;
            emit(&commands::breed_cmd(&cfg)?, "breed", &cfg, c)
        }
        Command::Sample { common: c, samples_out } => {
            let cfg = resolve(c)?;
            let (summary, samples) = commands::sample_cmd(&cfg, c.workers)?;
            emit(&summary, "sample", &cfg, c)?;
            match samples_out {
                Some(p) => write_to(Some(p), &render(&samples, "sample", &cfg, c.format)?),
                None => Ok(()),
            }
        }
        Command::Sweep(c) => {
            let cfg = resolve(c)?;
            emit(&commands::sweep_cmd(&cfg, c.workers)?, "sweep", &cfg, c)
        }
        Command::Map3(c) => {
            let cfg = resolve(c)?;
            emit(&commands::map3_cmd(&cfg, c.workers)?, "map3", &cfg, c)
        }
        Command::Wigner(c) => {
            let cfg = resolve(c)?;
            emit(&commands::wigner_cmd(&cfg, c.workers)?, "wigner", &cfg, c)
        }
        Command::OracleCheck(c) => {
            let cfg = resolve(c)?;
            let (table, failed) = commands::oracle_check_cmd(&cfg, c.workers)?;
            emit(&table, "oracle-check", &cfg, c)?;
            if failed > 0 {
                return Err(CliError::Runtime(format!("oracle check: {failed} of {} cases failed", table.rows.len())));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("catbreed: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
