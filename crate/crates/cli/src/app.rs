//! Argument parsing and command dispatch.

use crate::config::{parse_values, ExperimentConfig, Format};
use crate::error::{CliError, CliResult};
use crate::output::{emit, extension};
use crate::presets::{preset, presets, run_figure};
use crate::run::{simulate, sweep};
use crate::verify::{self, Scope};
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cqec", version, about = "Continuous quantum error correction simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment from a config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when neither this nor the config names one.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Regenerate the curves of a figure preset, one file per curve.
    Figure {
        id: Option<String>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Print the preset table and exit.
        #[arg(long)]
        list: bool,
    },
    /// Run a config over several values of one rate or kernel parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, requires = "values")]
        axis: Option<String>,
        /// "v1,v2,..." or "start:stop:points".
        #[arg(long, requires = "axis")]
        values: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run the oracle cross-checks and print a report.
    Verify {
        #[arg(long, value_enum, default_value_t = Scope::All)]
        scope: Scope,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

pub fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Simulate { config, out, format } => {
            let cfg = ExperimentConfig::load(&config)?;
            let table = simulate(&cfg)?;
            let format = format.unwrap_or(cfg.format);
            emit(&table.render(format), out.as_deref().or(cfg.output.as_deref()))
        }
        Command::Figure { id, out, format, list } => {
            if list {
                let mut s = String::new();
                for p in presets() {
                    s += &format!("{}\t{}\t{} curves\t{}\n", p.id, p.family, p.curves.len(), p.description);
                }
                return emit(&s, None);
            }
            let id = id.ok_or_else(|| CliError::Usage("figure needs an id (see --list)".into()))?;
            let p = preset(&id)?;
            for (stem, table) in run_figure(&p)? {
                emit(&table.render(format), Some(&out.join(format!("{stem}.{}", extension(format)))))?;
            }
            Ok(())
        }
        Command::Sweep { config, axis, values, out, format } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (axis, values) = match (axis, values, &cfg.sweep) {
                (Some(a), Some(v), _) => (a, parse_values(&v)?),
                (None, None, Some(s)) => (s.axis.clone(), s.values.clone()),
                _ => return Err(CliError::Usage("sweep needs --axis and --values or a [sweep] section".into())),
            };
            let table = sweep(&cfg, &axis, &values)?;
            let format = format.unwrap_or(cfg.format);
            emit(&table.render(format), out.as_deref().or(cfg.output.as_deref()))
        }
        Command::Verify { scope, out, format } => {
            let report = verify::run(scope)?;
            emit(&report.render(format), out.as_deref())?;
            report.into_result().map(|_| ())
        }
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("cqec: {e}");
            e.exit_code()
        }
    }
}
