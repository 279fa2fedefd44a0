use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod repl;

use commands::{Outcome, Status};

#[derive(Parser)]
#[command(
    name = "nomlog",
    version,
    about = "Nominal terms, unification and logic programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Leftmost-outermost β-reduction.
    Beta,
    /// β-reduction followed by η-reduction.
    BetaEta,
    /// Normalization by evaluation.
    Nbe,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and sort-check a program.
    Check { file: PathBuf },
    /// Decide α-equality of two terms.
    Eq { t: String, u: String },
    /// Decide whether a name is fresh for a term.
    Fresh { name: String, t: String },
    /// Unify two terms.
    Unify { t: String, u: String },
    /// Run a query against a program.
    Query {
        file: PathBuf,
        goal: String,
        #[arg(long, default_value_t = 50)]
        depth: usize,
        /// Retry failed clause heads under renamings of clause-local names.
        #[arg(long)]
        equivariant: bool,
        #[arg(long, default_value_t = 1)]
        max_answers: usize,
    },
    /// Normalize a λ-term.
    Norm {
        term: String,
        #[arg(long, value_enum, default_value_t = Strategy::Beta)]
        strategy: Strategy,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Enumerate the bounded least model of a program.
    Model {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        universe: usize,
        #[arg(long, default_value_t = 2)]
        term_depth: usize,
        /// Print the atoms as well as their count.
        #[arg(long)]
        atoms: bool,
    },
    /// Evaluate a closed formula in the bounded least model.
    Eval {
        file: PathBuf,
        formula: String,
        #[arg(long, default_value_t = 3)]
        universe: usize,
        #[arg(long, default_value_t = 2)]
        term_depth: usize,
    },
    /// Interactive session.
    Repl {
        /// Program to load at startup.
        file: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { file } => commands::check(&file),
        Command::Eq { t, u } => commands::eq(&t, &u),
        Command::Fresh { name, t } => commands::fresh(&name, &t),
        Command::Unify { t, u } => commands::unify(&t, &u),
        Command::Query {
            file,
            goal,
            depth,
            equivariant,
            max_answers,
        } => commands::query(&file, &goal, depth, equivariant, max_answers),
        Command::Norm {
            term,
            strategy,
            fuel,
        } => commands::norm(&term, strategy, fuel),
        Command::Model {
            file,
            universe,
            term_depth,
            atoms,
        } => commands::model(&file, universe, term_depth, atoms),
        Command::Eval {
            file,
            formula,
            universe,
            term_depth,
        } => commands::eval(&file, &formula, universe, term_depth),
        Command::Repl { file } => return run_repl(file),
    };
    report(&outcome)
}

fn report(outcome: &Outcome) -> ExitCode {
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if !outcome.text.is_empty() {
        if outcome.status == Status::Usage {
            eprintln!("error: {}", outcome.text);
        } else {
            println!("{}", outcome.text);
        }
    }
    ExitCode::from(outcome.status as u8)
}

fn run_repl(file: Option<PathBuf>) -> ExitCode {
    let mut session = repl::Repl::new();
    if let Some(f) = file {
        let out = session.handle_line(&format!(":load {}", f.display()));
        if out.status != Status::Ok {
            return report(&out);
        }
    }
    let interactive = io::stdin().is_terminal();
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("?- ");
            let _ = io::stdout().flush();
        }
        let Some(Ok(line)) = lines.next() else { break };
        if session.finished() {
            break;
        }
        // A failed line is reported but does not end the session.
        report(&session.handle_line(&line));
        if session.finished() {
            break;
        }
    }
    ExitCode::SUCCESS
}
