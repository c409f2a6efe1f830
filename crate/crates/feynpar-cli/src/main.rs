//! `feynpar`: command-line front end.
//!
//! Every command writes one JSON document (or CSV with `--format csv`) to
//! standard output and diagnostics to standard error. Exit codes: 0 success,
//! 2 validation or parse error, 3 numeric tolerance failure, 4 precondition
//! violation.

mod args;
mod exact;
mod numeric;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format, HopfOp};
use report::{envelope, field_table, render, CmdResult, Failure, Inputs, Outcome, RunInfo, EXIT_OK, EXIT_VALIDATION};

fn run_command(cli: &Cli, inputs: &mut Inputs, run: &mut RunInfo) -> CmdResult<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Poly(a) => exact::poly(a, inputs),
        Command::Check(a) => exact::check(a, g, inputs),
        Command::Hopf { op } => match op {
            HopfOp::Coproduct(a) => exact::coproduct(a, inputs),
            HopfOp::Antipode(a) => exact::antipode(a, inputs),
            HopfOp::Birkhoff(a) => exact::birkhoff_cmd(a, inputs),
        },
        Command::Renorm(a) => exact::renorm(a, inputs),
        Command::Connection(a) => exact::connection(a, inputs),
        Command::Slice(a) => exact::slice(a, g, inputs),
        Command::Milnor(a) => exact::milnor(a, g, inputs),
        Command::FeynmanSubspace(a) => exact::feynman_subspace(a, g, inputs),
        Command::CountPoints(a) => exact::count_points(a, inputs),
        Command::Corpus(a) => exact::corpus(a),
        Command::Dimreg(a) => numeric::dimreg(a, g, inputs, run),
        Command::Integrate(a) => numeric::integrate(a, g, inputs, run),
        Command::IdentityCheck(a) => numeric::identity_check(a, g, inputs, run),
        Command::GlMellin(a) => numeric::gl_mellin(a, g, inputs, run),
        Command::Leray(a) => numeric::leray(a, g, inputs, run),
        Command::ZetaLog(a) => numeric::zeta_log(a, g, inputs, run),
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    if let Some(t) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    let mut inputs = Inputs::default();
    let mut run = RunInfo { seed: g.seed, tolerance: None, max_evals: None, threads: g.threads, order: None };
    let outcome = match run_command(&cli, &mut inputs, &mut run) {
        Ok(o) => o,
        Err(f) => Outcome { result: serde_json::Value::Null, table: None, failure: Some(f) },
    };
    let doc = envelope(cli.command.name(), inputs, &run, &outcome);
    let json_text = render(&doc);

    let mut code = outcome.failure.as_ref().map_or(EXIT_OK, |f| f.code);
    if let Some(f) = &outcome.failure {
        eprintln!("error [{}]: {}", f.kind, f.message);
    }

    if let Some(path) = &g.emit_plot_data {
        match &outcome.table {
            Some(t) => {
                if let Err(f) = write_file(path, &t.to_csv()) {
                    eprintln!("error: {}", f.message);
                    code = code.max(f.code);
                }
            }
            None => eprintln!("warning: `{}` has no plot data", cli.command.name()),
        }
    }
    if let Some(path) = &g.write_golden {
        if let Err(f) = write_file(path, &json_text) {
            eprintln!("error: {}", f.message);
            code = code.max(f.code);
        }
    }
    if let Some(path) = &g.golden {
        match fs::read_to_string(path) {
            Ok(expected) if expected == json_text => {}
            Ok(_) => {
                eprintln!("golden mismatch against {}", path.display());
                if code == EXIT_OK {
                    code = EXIT_VALIDATION;
                }
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                if code == EXIT_OK {
                    code = EXIT_VALIDATION;
                }
            }
        }
    }

    match g.format {
        Format::Json => print!("{json_text}"),
        Format::Csv => {
            let table = outcome.table.clone().unwrap_or_else(|| field_table(&outcome.result));
            print!("{}", table.to_csv());
        }
    }
    ExitCode::from(code as u8)
}
