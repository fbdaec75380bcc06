//! Command-line entry point, callable in-process.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::{resolve, run_command, write_table, Command, Entries};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Microring squeezing and interferometer sensitivity tables.
#[derive(Parser, Debug)]
#[command(name = "ringsqueeze", version)]
struct Cli {
    /// rates | squeezing | jsi | meanfield | sensitivity | pole | improvement
    command: String,
    /// Configuration file (`section.key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set pump.sigma_n=0.95`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Runs the tool with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_CONFIG
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let cmd: Command = match cli.command.parse() {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
                return EXIT_IO;
            }
        },
        None => String::new(),
    };
    let table = Entries::parse(&text)
        .and_then(|mut entries| {
            for o in &cli.overrides {
                entries.set_override(o)?;
            }
            resolve(&entries)
        })
        .and_then(|cfg| run_command(cmd, &cfg));
    let table = match table {
        Ok(t) => t,
        Err(e) => {
            let _ = match &cli.config {
                Some(p) if e.line.is_some() => writeln!(stderr, "error: {}: {e}", p.display()),
                _ => writeln!(stderr, "error: {e}"),
            };
            return EXIT_CONFIG;
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = write_table(&table, path) {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_IO;
            }
        }
        None => {
            if stdout.write_all(table.to_csv().as_bytes()).is_err() {
                return EXIT_IO;
            }
        }
    }
    EXIT_OK
}
