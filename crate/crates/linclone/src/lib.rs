//! Command-line front end for `linclone-core`: single-shot reports,
//! figure-data sweeps, ensemble averages, gain optimization, parallel Monte
//! Carlo and the verification suite.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod mc;
pub mod report;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::Output;
use crate::error::{CliError, CliResult};
use crate::report::Timing;

pub use crate::error::CliError as Error;

/// Runs the subcommand of `cli` on the configured thread pool.
pub fn execute(cli: &Cli) -> CliResult<Output> {
    let start = Instant::now();
    let job = || match &cli.command {
        Command::Clone(a) => commands::clone(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Average(a) => commands::average(a),
        Command::OptimizeGain(a) => commands::optimize_gain(a),
        Command::Mc(a) => commands::mc(a),
        Command::Verify(a) => commands::verify(a),
    };
    let mut out = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(job)?,
        None => job()?,
    };
    if let Output::Report(r) = &mut out {
        if cli.timing {
            r.timing = Some(Timing {
                wall_seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(out)
}

fn destination(cli: &Cli, out: &Output) -> Option<PathBuf> {
    if let Some(p) = &cli.output {
        return Some(p.clone());
    }
    match out {
        Output::Table { file_name, .. } => cli.out_dir.as_ref().map(|d| d.join(file_name)),
        Output::Report(_) => None,
    }
}

fn emit(cli: &Cli, out: &Output, stdout: &mut dyn Write) -> CliResult<()> {
    let text = match out {
        Output::Report(r) => r.to_json(),
        Output::Table { csv, .. } => csv.clone(),
    };
    match destination(cli, out) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            fs::write(&path, text).map_err(|e| CliError::io(&path, e))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn failed_checks(out: &Output) -> Option<CliError> {
    let Output::Report(r) = out else { return None };
    let checks = r.checks.as_ref()?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    (failed > 0).then_some(CliError::Verification {
        failed,
        total: checks.len(),
    })
}

/// Full program: parses `args`, runs, writes, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = config::expand(args).and_then(|args| {
        Cli::try_parse_from(args).map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                let _ = write!(stdout, "{e}");
                CliError::Usage(String::new())
            }
            _ => CliError::Usage(e.to_string()),
        })
    });
    let cli = match result {
        Ok(cli) => cli,
        Err(CliError::Usage(msg)) if msg.is_empty() => return 0,
        Err(e) => return report_error(&e, stderr),
    };
    let outcome = execute(&cli).and_then(|out| {
        emit(&cli, &out, stdout)?;
        failed_checks(&out).map_or(Ok(()), Err)
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => report_error(&e, stderr),
    }
}

fn report_error(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let msg = e.to_string();
    let _ = if msg.starts_with("error:") {
        write!(stderr, "{msg}")
    } else {
        writeln!(stderr, "error: {msg}")
    };
    e.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::{Check, RunReport};

    #[test]
    fn failed_checks_map_to_exit_five() {
        let mut r = RunReport::new("verify");
        r.checks = Some(vec![Check::new("a", 0.1, 1.0), Check::new("b", 2.0, 1.0), Check::new("c", f64::NAN, 1.0)]);
        let err = failed_checks(&Output::Report(Box::new(r))).unwrap();
        assert_eq!(err.exit_code(), 5);
        assert!(matches!(err, CliError::Verification { failed: 2, total: 3 }));
        assert!(failed_checks(&Output::Report(Box::new(RunReport::new("clone")))).is_none());
    }
}
