use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fibaut::automata::export_dot;
use fibaut::reproduce::{self, Event};
use fibaut::seqs;
use fibaut::session::{ReplAction, Session, Settings};
use fibaut::Error;

#[derive(Parser)]
#[command(name = "fibaut", version, about = "First-order queries over Fibonacci-synchronized sequences")]
struct Cli {
    /// Directory caching builtin automata as .aut files
    #[arg(long, global = true, default_value = "./store")]
    store: PathBuf,
    /// Training bounds for synthesis, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    schedule: Option<Vec<usize>>,
    /// Write NAME as Graphviz to FILE after the command
    #[arg(long = "export-dot", global = true, value_name = "NAME=FILE")]
    export_dot: Vec<String>,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Rebuild builtins instead of loading them from the store
    #[arg(long, global = true)]
    rebuild: bool,
    /// Report builtin construction on stderr
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a script of def/eval/reg/combine commands
    Run { file: PathBuf },
    /// Interactive query loop
    Repl,
    /// Run every query script and acceptance check
    ReproducePaper,
    /// Print n and value as TSV for a named oracle
    OracleTable { name: String, n: usize },
    /// Write an automaton as Graphviz
    ExportDot { name: String, file: PathBuf },
}

const FALSE: u8 = 1;
const USAGE: u8 = 2;

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(USAGE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Cmd::OracleTable { name, n } = &cli.command {
        return oracle_table(name, *n);
    }
    let mut settings = Settings { rebuild: cli.rebuild, verbose: cli.verbose, ..Settings::default() };
    if let Some(s) = &cli.schedule {
        if s.is_empty() || s.iter().any(|&n| n < 2) {
            return fail("--schedule needs training bounds of at least 2");
        }
        settings.schedule = s.clone();
    }
    let mut session = match Session::with_store(&cli.store, settings) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let code = match &cli.command {
        Cmd::Run { file } => run(&mut session, file),
        Cmd::Repl => repl(&mut session),
        Cmd::ReproducePaper => reproduce_paper(&mut session, cli.seed),
        Cmd::ExportDot { name, file } => match write_dot(&mut session, name, file) {
            Ok(()) => 0,
            Err(e) => return fail(e),
        },
        Cmd::OracleTable { .. } => unreachable!(),
    };
    for spec in &cli.export_dot {
        let Some((name, file)) = spec.split_once('=') else {
            return fail(format!("--export-dot expects NAME=FILE, got `{spec}`"));
        };
        if let Err(e) = write_dot(&mut session, name, &PathBuf::from(file)) {
            return fail(e);
        }
    }
    ExitCode::from(code)
}

fn write_dot(session: &mut Session, name: &str, file: &PathBuf) -> Result<(), Error> {
    let a = session.get(name)?;
    std::fs::write(file, export_dot(&a))?;
    Ok(())
}

fn run(session: &mut Session, file: &PathBuf) -> u8 {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            return USAGE;
        }
    };
    match session.run_script_with(&src, |o| println!("{o}")) {
        Ok(report) if report.all_true() => 0,
        Ok(_) => FALSE,
        Err(e) => {
            eprintln!("error: {}: {e}", file.display());
            USAGE
        }
    }
}

fn repl(session: &mut Session) -> u8 {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let prompt = || {
        if interactive {
            eprint!("> ");
            let _ = io::stderr().flush();
        }
    };
    prompt();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        match session.repl_line(&line) {
            Ok(ReplAction::Quit) => break,
            Ok(ReplAction::Continue(out)) => {
                if !out.is_empty() {
                    println!("{out}");
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
        prompt();
    }
    0
}

fn reproduce_paper(session: &mut Session, seed: u64) -> u8 {
    let rep = reproduce::run(session, seed, &mut |ev| match ev {
        Event::Outcome(script, o) => println!("{script:<13} {o}"),
        Event::ScriptError(script, e) => println!("{script:<13} ERROR {e}"),
        Event::Check(c) => println!("{c}"),
    });
    println!();
    println!("{:<10} {:>9} {:>5} {:>10}", "automaton", "published", "live", "with sink");
    for s in &rep.state_counts {
        println!("{:<10} {:>9} {:>5} {:>10}", s.name, s.published, s.live, s.total);
    }
    let failed: Vec<String> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.criterion.to_string()).collect();
    if failed.is_empty() {
        println!("all {} checks passed", rep.checks.len());
        0
    } else {
        println!("failed checks: {}", failed.join(", "));
        FALSE
    }
}

fn oracle_table(name: &str, n: usize) -> ExitCode {
    match seqs::table(name, n) {
        Some(values) => {
            let mut out = io::BufWriter::new(io::stdout().lock());
            for (i, v) in values.iter().enumerate() {
                if writeln!(out, "{i}\t{v}").is_err() {
                    break;
                }
            }
            ExitCode::SUCCESS
        }
        None => {
            let names: Vec<&str> = seqs::NAMES.iter().map(|(n, _)| *n).collect();
            fail(format!("unknown oracle `{name}`; known: {}", names.join(", ")))
        }
    }
}
