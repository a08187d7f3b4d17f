//! The `arad` command-line tool: compute quantities for supplied matrices,
//! check the relation catalog on an instance, fuzz the catalog over
//! generated instances, and export numerical-range boundaries.
//!
//! Exit codes: 0 pass, 1 verified-relation failure, 2 input error,
//! 3 domain error (unbounded radius or non-member operand).

pub mod args;
mod commands;
pub mod error;
pub mod format;
pub mod report;
pub mod shrink;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use arad::catalog::{EvalOptions, NormReading};
use arad::kernel::CMat;
use arad::{Instance, InstanceFile, ThetaSweepConfig};
use clap::Parser;

use args::{Cli, Command, GlobalOpts, NormReadingArg, ReadingOpts};
use error::{CliError, CliResult};

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    VerifiedFailure,
    /// Explicitly requested relations lacked operators.
    MissingOperators,
    /// Explicitly requested relations had non-member operands.
    NonMember,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::VerifiedFailure => 1,
            Status::MissingOperators => 2,
            Status::NonMember => 3,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::Compute { file, quantity, op } => {
            commands::compute::run(g, file, *quantity, op.as_deref(), out)
        }
        Command::Check {
            file,
            relations,
            reading,
            z1,
            z2,
        } => commands::check::run(
            g,
            file,
            relations,
            reading,
            z1.as_deref(),
            z2.as_deref(),
            out,
        ),
        Command::Fuzz {
            profile,
            count,
            relations,
            corpus,
            max_shrink,
            reading,
            inject_fault,
        } => commands::fuzz::run(
            g,
            &commands::fuzz::FuzzArgs {
                profile,
                count: *count,
                relations,
                corpus,
                max_shrink: *max_shrink,
                reading,
                fault: *inject_fault,
            },
            out,
        ),
        Command::Range {
            file,
            op,
            points,
            format,
        } => commands::range::run(g, file, op.as_deref(), *points, *format, out),
    }
}

pub(crate) fn sweep_config(g: &GlobalOpts) -> CliResult<ThetaSweepConfig> {
    let cfg = ThetaSweepConfig::with_grid(g.grid);
    cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(cfg)
}

pub(crate) fn eval_options(g: &GlobalOpts, reading: &ReadingOpts) -> CliResult<EvalOptions> {
    Ok(EvalOptions {
        sweep: sweep_config(g)?,
        norm_reading: match reading.norm_reading {
            NormReadingArg::ASeminorm => NormReading::ASeminorm,
            NormReadingArg::Plain => NormReading::Plain,
        },
        r29_literal_p: reading.r29_literal,
        ..EvalOptions::default()
    })
}

/// Reads and validates an instance file, applying `--tol`.
pub(crate) fn load_instance(path: &Path, g: &GlobalOpts) -> CliResult<Instance> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut file = InstanceFile::from_json(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(tol) = g.tol {
        file.tol = Some(tol);
    }
    Instance::from_file(&file).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The operator named by `--op`, else `T`, else the only operator.
pub(crate) fn pick_operator<'a>(
    inst: &'a Instance,
    op: Option<&str>,
) -> CliResult<(String, &'a CMat)> {
    let names: Vec<&String> = inst.operators.keys().collect();
    let name = match op {
        Some(name) => name.to_string(),
        None if inst.op("T").is_some() => "T".to_string(),
        None if names.len() == 1 => names[0].clone(),
        None => {
            return Err(CliError::Input(format!(
                "choose an operator with --op; the file has {}",
                if names.is_empty() {
                    "none".to_string()
                } else {
                    names
                        .iter()
                        .map(|s| s.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                }
            )))
        }
    };
    let t = inst
        .op(&name)
        .ok_or_else(|| CliError::Input(format!("operator {name} is not in the file")))?;
    Ok((name, t))
}

/// Writes `text` to `--out` when given.
pub(crate) fn write_out(g: &GlobalOpts, text: &str) -> CliResult<()> {
    match &g.out {
        Some(path) => format::write_atomic(path, text.as_bytes()),
        None => Ok(()),
    }
}

pub(crate) fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}
