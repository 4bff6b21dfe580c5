use clap::{Parser, Subcommand};
use infomenu_cli::config::{Overrides, RunConfig};
use infomenu_cli::{
    cmd_assumptions, cmd_flat, cmd_oracle, cmd_solve, cmd_sweep, cmd_verify, CliError, CmdOutcome,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Solve, price, and verify menus of statistical experiments.
#[derive(Parser)]
#[command(name = "infomenu", version, about)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "infomenu.toml")]
    config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Belief grid size (overrides solver.grid and verify.grid).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Verification tolerance (overrides verify.ic_tol, oracle.ic_tol,
    /// oracle.gain_tol).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Oracle local-search seed (overrides oracle.seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solve even when the regularity checks fail.
    #[arg(long, global = true)]
    override_assumptions: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal menu and its artifacts.
    Solve,
    /// Check a menu CSV for global incentive compatibility and rationality.
    Verify {
        /// Menu CSV to verify (defaults to <out>/menu.csv).
        menu: Option<PathBuf>,
    },
    /// Brute-force a finite instance and run the structure spot checks.
    Oracle,
    /// Solve the rotation family and check the comparative statics.
    Sweep,
    /// Flat-price benchmark for full revelation.
    Flat,
    /// Run the regularity checks and diagnostics on their own.
    Assumptions,
}

fn run(cli: &Cli) -> Result<CmdOutcome, CliError> {
    let overrides = Overrides {
        out: cli.out.clone(),
        grid: cli.grid,
        tol: cli.tol,
        seed: cli.seed,
        override_assumptions: cli.override_assumptions,
    };
    let cfg = RunConfig::load(&cli.config, &overrides)?;
    match &cli.command {
        Command::Solve => cmd_solve(&cfg),
        Command::Verify { menu } => {
            let path = menu
                .clone()
                .unwrap_or_else(|| cfg.output.dir.join("menu.csv"));
            cmd_verify(&cfg, &path)
        }
        Command::Oracle => cmd_oracle(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::Flat => cmd_flat(&cfg),
        Command::Assumptions => cmd_assumptions(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed (see reports)");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
