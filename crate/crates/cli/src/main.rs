use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pqd_core::check::{check_program, CheckOptions, Program};
use pqd_core::circuit::{export_counts, export_text, gate_count};
use pqd_core::eval::{run_main, EvalError, DEFAULT_FUEL};
use pqd_core::front::{parse_program, parse_program_internal, pretty_term, pretty_type};

#[derive(Parser, Debug)]
#[command(
    name = "pqd",
    version,
    about = "Check, run and export dependently typed Proto-Quipper programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse, elaborate and type-check; print the type of each declaration.
    Check(Opts),
    /// Check, then evaluate `main` and print its value.
    Run(Opts),
    /// Check and evaluate; `main` must be a boxed circuit, which is exported.
    Circuit(Opts),
    /// Like `circuit` but exports gate counts.
    Count(Opts),
}

#[derive(clap::Args, Debug)]
struct Opts {
    file: PathBuf,
    /// Write the artifact here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Evaluation step budget.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Require fully annotated input: no lift/force insertion, internal syntax allowed.
    #[arg(long)]
    no_elab: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
}

enum Failure {
    User(String),
    Internal(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new()
        .stack_size(64 * 1024 * 1024)
        .spawn(move || dispatch(cli.command));
    let outcome = match worker {
        Ok(h) => h
            .join()
            .unwrap_or_else(|_| Err(Failure::Internal("internal error: checker panicked".into()))),
        Err(e) => Err(Failure::Internal(format!("internal error: {e}"))),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn load(opts: &Opts) -> Result<(String, Program), Failure> {
    let file = opts.file.display().to_string();
    let src = fs::read_to_string(&opts.file).map_err(|e| Failure::User(format!("{file}: {e}")))?;
    let decls = if opts.no_elab {
        parse_program_internal(&src)
    } else {
        parse_program(&src)
    }
    .map_err(|e| Failure::User(e.render(&file)))?;
    let prog = check_program(
        &decls,
        CheckOptions {
            elaborate: !opts.no_elab,
        },
    )
    .map_err(|e| Failure::User(e.render(&file)))?;
    Ok((file, prog))
}

fn eval_failure(file: &str, e: EvalError) -> Failure {
    match e {
        EvalError::NoMain | EvalError::ResourceExhausted(_) => {
            Failure::User(format!("{file}: EvalError: {e}"))
        }
        _ => Failure::Internal(format!("{file}: internal error: {e}")),
    }
}

fn emit(opts: &Opts, text: &str) -> Result<(), Failure> {
    match &opts.output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::User(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Internal(format!("internal error: {e}")))
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Check(opts) => {
            let (_, prog) = load(&opts)?;
            let text: String = prog
                .decls
                .iter()
                .map(|d| format!("{} : {}\n", d.name, pretty_type(&d.ty)))
                .collect();
            emit(&opts, &text)
        }
        Command::Run(opts) => {
            let (file, prog) = load(&opts)?;
            let res = run_main(prog.globals(), opts.fuel).map_err(|e| eval_failure(&file, e))?;
            let ty = prog
                .get("main")
                .map(|d| pretty_type(&d.ty))
                .unwrap_or_default();
            emit(
                &opts,
                &format!("{} : {}\n", pretty_term(&res.config.term), ty),
            )
        }
        Command::Circuit(opts) => export(&opts, false),
        Command::Count(opts) => export(&opts, true),
    }
}

fn export(opts: &Opts, counting: bool) -> Result<(), Failure> {
    let (file, prog) = load(opts)?;
    let res = run_main(prog.globals(), opts.fuel).map_err(|e| eval_failure(&file, e))?;
    let boxed = res.boxed.ok_or_else(|| {
        Failure::User(format!(
            "{file}: `main` evaluated to `{}`, which is not a boxed circuit",
            pretty_term(&res.config.term)
        ))
    })?;
    let Format::Text = opts.format;
    let text = if counting {
        export_counts(&gate_count(&boxed.circuit))
    } else {
        export_text(&boxed)
    };
    emit(opts, &text)
}
