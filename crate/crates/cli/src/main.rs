use alqc_cli::commands;
use alqc_cli::config::RunConfig;
use alqc_cli::{output, CliError, Output};
use alqc_core::budget::GateKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Error budgets for qubits stored in addressable optical lattices.
#[derive(Debug, Parser)]
#[command(name = "alqc", version)]
struct Cli {
    /// TOML run configuration. Built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for stochastic parts (optimizer starts). Overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one config key, e.g. --set lattice.a_um=10 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GateArg {
    Raman,
    Microwave,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cross sections and polarizability against lattice wavelength, plus the magic wavelength.
    Sweep,
    /// Per-mechanism error table for one gate type.
    Budget {
        #[arg(long, value_enum)]
        gate: GateArg,
        /// Fill the simulation column by running the propagator (microwave only).
        #[arg(long)]
        simulate: bool,
    },
    /// Minimise the Raman gate error over the configured box.
    Optimize,
    /// Raman gate error on a grid of lattice spacings and beam waists.
    Surface,
    /// Propagate the microwave gate on a spatial grid.
    Simulate,
    /// Lattice power and storage-error report for a large array.
    Scaling,
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    log::info!("running {:?}", cli.command);
    match cli.command {
        Command::Sweep => commands::cmd_sweep(&cfg),
        Command::Budget { gate, simulate } => {
            let kind = match gate {
                GateArg::Raman => GateKind::Raman,
                GateArg::Microwave => GateKind::Microwave,
            };
            commands::cmd_budget(&cfg, kind, simulate)
        }
        Command::Optimize => commands::cmd_optimize(&cfg),
        Command::Surface => commands::cmd_surface(&cfg),
        Command::Simulate => commands::cmd_simulate(&cfg),
        Command::Scaling => commands::cmd_scaling(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        output::write_all(&cli.out, &out.files)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            print!("{}", out.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("alqc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
