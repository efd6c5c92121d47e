//! `tensorword` command-line harness.
//!
//! Exit codes: 0 all checks pass, 1 violation found, 2 usage or
//! configuration error, 3 numerical failure.

mod args;
mod campaigns;
mod commands;
mod report;

use std::fmt;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, GmfCommand, InducedCommand, VerifyCommand, WordsCommand};
use report::Report;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<tensorword::Error> for Failure {
    fn from(e: tensorword::Error) -> Self {
        use tensorword::Error as E;
        match e {
            E::NumericalFailure(_) | E::DegenerateRank { .. } => Self::Numerical(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<u8, Failure> {
    print!("{}", report.human_summary());
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(report).expect("report serializes");
        fs::write(path, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(report.verdict.exit_code())
}

fn dispatch(command: &Command) -> Result<u8, Failure> {
    match command {
        Command::Verify(v) => {
            let (report, out) = match v {
                VerifyCommand::Thm2(a) => (campaigns::thm2(a)?, &a.campaign.out),
                VerifyCommand::Thm1Bounds(a) => (campaigns::thm1_bounds(a)?, &a.campaign.out),
                VerifyCommand::Thm3(a) => (campaigns::thm3(a)?, &a.campaign.out),
                VerifyCommand::Corollaries(a) => (campaigns::corollaries(a)?, &a.campaign.out),
                VerifyCommand::Bridging(a) => (campaigns::bridging(a)?, &a.campaign.out),
            };
            emit(&report, out.as_deref())
        }
        Command::Words(WordsCommand::Count(a)) => commands::words_count(a),
        Command::Words(WordsCommand::List(a)) => commands::words_list(a),
        Command::Gmf(GmfCommand::Eval(a)) => commands::gmf_eval(a),
        Command::Induced(InducedCommand::Eval(a)) => commands::induced_eval(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        pool = pool.num_threads(w as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result = panic::catch_unwind(AssertUnwindSafe(|| pool.install(|| dispatch(&cli.command))));
    match result {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(f)) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
