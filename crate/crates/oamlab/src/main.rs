use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use oamlab::config::{parse_config, Command, ConfigError, RunConfig, FIGURES};
use oamlab::{run_pipeline, RunError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Mask,
    Diffract,
    Mpi,
    Field,
    Topology,
    Tomo,
    Reproduce,
}

/// Simulation and analysis pipelines for mixed-OAM electron states.
#[derive(Debug, Parser)]
#[command(name = "oamlab", version)]
struct Cli {
    command: Cmd,
    /// Figure name for `reproduce` (fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, figA1, figA2).
    figure: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to OAMLAB_THREADS.
    #[arg(long, env = "OAMLAB_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn command_of(c: Cmd) -> Command {
    match c {
        Cmd::Mask => Command::Mask,
        Cmd::Diffract => Command::Diffract,
        Cmd::Mpi => Command::Mpi,
        Cmd::Field => Command::Field,
        Cmd::Topology => Command::Topology,
        Cmd::Tomo => Command::Tomo,
        Cmd::Reproduce => Command::Reproduce,
    }
}

fn load(cli: &Cli) -> Result<RunConfig, RunError> {
    let command = command_of(cli.command);
    let mut cfg = match (&cli.config, command) {
        (Some(path), _) => parse_config(path)?,
        (None, Command::Reproduce) => RunConfig::new(Command::Reproduce),
        (None, c) => return Err(ConfigError::single(format!("the {} command needs --config", c.name())).into()),
    };
    if cfg.command != command {
        return Err(ConfigError::single(format!(
            "config is for \"{}\" but the command line asks for \"{}\"",
            cfg.command.name(),
            command.name()
        ))
        .into());
    }
    if let Some(f) = &cli.figure {
        if command != Command::Reproduce {
            return Err(ConfigError::single(format!("unexpected argument \"{f}\"")).into());
        }
        cfg.figure = Some(f.clone());
    }
    if command == Command::Reproduce {
        match cfg.figure.as_deref() {
            Some(f) if FIGURES.contains(&f) => {}
            Some(f) => return Err(ConfigError::single(format!("unknown figure \"{f}\" (one of {})", FIGURES.join(", "))).into()),
            None => return Err(ConfigError::single("reproduce needs a figure name").into()),
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let cfg = load(cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::single("--threads must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError::single(format!("cannot start {n} threads: {e}")))?;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.figure.as_deref().unwrap_or(cfg.command.name())));
    log::info!("command={} out={}", cfg.command.name(), out.display());
    let report = run_pipeline(&cfg, &out)?;
    log::info!("files={}", report.files.len() + 1);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
