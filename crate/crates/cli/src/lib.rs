//! Command-line surface of `tailsum`.
//!
//! Exit codes: 0 success, 2 I/O, 3 parse, 4 invalid parameters,
//! 5 runtime or numeric failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod input;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{execute, resolve, Rendered};
pub use error::{CliError, CliResult};

/// RFC 3339 time of the run. `SOURCE_DATE_EPOCH`, when set, pins it so
/// repeated runs can be compared byte for byte.
pub fn timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    pinned
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn output_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Estimate(a) => a.out.output.as_deref(),
        Command::Tables(a) => a.out.output.as_deref(),
        Command::Covariance(a) => a.out.output.as_deref(),
        Command::Mc(a) => a.out.output.as_deref(),
        Command::Oracle(a) => a.out.output.as_deref(),
        Command::Sample(a) => a.output.as_deref(),
        Command::Replay(a) => a.output.as_deref(),
    }
}

/// Executes a parsed command, writing its output; replay re-reads a manifest.
pub fn run(cmd: Command) -> CliResult<()> {
    let (to_run, dest) = match cmd {
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.manifest)
                .map_err(|e| CliError::Io(format!("{}: {e}", a.manifest.display())))?;
            let m = output::extract_manifest(&text)?;
            (commands::from_manifest(&m)?, a.output)
        }
        other => {
            let dest = output_path(&other).map(Path::to_path_buf);
            (other, dest)
        }
    };
    let to_run = resolve(to_run);
    let rendered = execute(&to_run, &timestamp())?;
    for note in &rendered.notes {
        eprintln!("{note}");
    }
    write_output(dest.as_deref(), &rendered.text)
}

/// Parses `args` and runs, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 4,
            };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tailsum: {e}");
            e.exit_code()
        }
    }
}
