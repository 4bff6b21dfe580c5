//! Library surface of the `infomenu` command-line tool.
//!
//! Each subcommand is an ordinary function over a parsed [`config::RunConfig`],
//! so the whole pipeline is exercisable from tests without spawning binaries.
//! All artifacts are flat files (CSV / JSON / SVG) written atomically; reruns
//! of the same config are byte-identical. Wall-clock timings go to a separate
//! `run.log`, which is the one deliberately non-reproducible output.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;
pub mod svg;

pub use commands::{
    cmd_assumptions, cmd_flat, cmd_oracle, cmd_solve, cmd_sweep, cmd_verify, CmdOutcome,
};
pub use config::RunConfig;
pub use error::CliError;
