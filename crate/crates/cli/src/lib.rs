//! Command-line front end for [`capvar`].
//!
//! Four subcommands: `generate` writes a built-in shape to OBJ or STL,
//! `solve` runs the full pipeline on one mesh and reports the capacitance
//! with every bound, `converge` repeats the solve over a refinement sequence
//! and extrapolates, and `verify-principle` checks the max-quotient
//! principle on a symmetric matrix read from JSON.
//!
//! Reports are JSON (`capreport/1`, `capconverge/1`, `principlereport/1`,
//! `capmesh/1`) with an aligned-text rendering for terminals. Failures
//! print a `caperror/1` object to stderr and exit with one of the codes in
//! [`error::exit`]; nothing is written to stdout or `--out` in that case.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

use args::{Cli, Command};
use error::{exit, CliError};

/// A finished command: its report in both renderings, and where it goes.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub json_to_stdout: bool,
    pub out: Option<PathBuf>,
    /// Set when the report is complete but the command still fails
    /// (`verify-principle` on an inconsistent observation).
    pub failure: Option<CliError>,
}

fn output<T: Serialize>(report: &T, text: String, json: bool, out: Option<PathBuf>) -> Result<Output, CliError> {
    Ok(Output {
        json: serde_json::to_value(report).map_err(|e| CliError::Internal(e.to_string()))?,
        text,
        json_to_stdout: json,
        out,
        failure: None,
    })
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Generate(a) => {
            let r = commands::cmd_generate(a)?;
            let text = format!("wrote {} triangles to {} ({})", r.mesh.panels, r.path, r.format);
            output(&r, text, a.json, None)
        }
        Command::Solve(a) => {
            let r = commands::cmd_solve(a)?;
            output(&r, r.render_text(), a.json, a.out.clone())
        }
        Command::Converge(a) => {
            let r = commands::cmd_converge(a)?;
            output(&r, r.render_text(), a.json, a.out.clone())
        }
        Command::VerifyPrinciple(a) => {
            let r = commands::cmd_verify_principle(a)?;
            let mut o = output(&r, r.render_text(), a.json, a.out.clone())?;
            if !r.report.consistent {
                o.failure = Some(CliError::Inconsistent {
                    classification: format!("{:?}", r.report.classification).to_lowercase(),
                });
            }
            Ok(o)
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("a JSON value always serialises");
    s.push('\n');
    s
}

fn report_error(e: &CliError) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}

/// Runs `cli`, prints the result and returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            return report_error(&CliError::Internal(format!("cannot start the thread pool: {e}")));
        }
    }
    let o = match run(cli) {
        Ok(o) => o,
        Err(e) => return report_error(&e),
    };
    let json = to_json_text(&o.json);
    if let Some(path) = &o.out {
        if let Err(e) = commands::write_file(path, json.as_bytes()) {
            return report_error(&e);
        }
    }
    let mut stdout = std::io::stdout().lock();
    let printed = if o.json_to_stdout {
        stdout.write_all(json.as_bytes())
    } else {
        writeln!(stdout, "{}", o.text)
    };
    match printed.and_then(|_| stdout.flush()) {
        // the reader went away, e.g. `| head`
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(e) => return report_error(&CliError::io("<stdout>")(e)),
        Ok(()) => {}
    }
    match &o.failure {
        Some(e) => report_error(e),
        None => exit::SUCCESS,
    }
}
