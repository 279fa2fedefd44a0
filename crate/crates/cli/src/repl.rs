use std::path::Path;

use nomlog::engine::{Program, SolveOptions};
use nomlog::syntax::{load_into, open_program};

use crate::commands::{self, Outcome, Status};
use crate::Strategy;

const HELP: &str = "\
goal, ..., goal        run a query (a leading ?- is optional)
:add STATEMENT         add a declaration or clause
:load FILE             replace the session program
:eq T = U              alpha-equality
:fresh A # T           freshness
:unify T = U           unification
:norm T                normalize a λ-term
:model [atoms]         size (and atoms) of the bounded least model
:eval FORMULA          evaluate in the bounded least model
:set KEY VALUE         depth, answers, equivariant (on/off), fuel,
                       strategy (beta/beta-eta/nbe), universe, term-depth
:help, :quit";

/// One interactive session: one program and one name counter.
pub struct Repl {
    prog: Program,
    opts: SolveOptions,
    strategy: Strategy,
    fuel: usize,
    universe: usize,
    term_depth: usize,
    done: bool,
}

impl Default for Repl {
    fn default() -> Self {
        Repl::new()
    }
}

impl Repl {
    pub fn new() -> Repl {
        Repl {
            prog: open_program(),
            opts: SolveOptions {
                max_answers: Some(1),
                ..SolveOptions::default()
            },
            strategy: Strategy::Beta,
            fuel: 1000,
            universe: 3,
            term_depth: 2,
            done: false,
        }
    }

    pub fn finished(&self) -> bool {
        self.done
    }

    pub fn handle_line(&mut self, line: &str) -> Outcome {
        let line = line.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            return Outcome::new(Status::Ok, "");
        }
        let Some(cmd) = line.strip_prefix(':') else {
            let goal = line.strip_prefix("?-").unwrap_or(line);
            return commands::query_in(&mut self.prog, goal, self.opts.clone());
        };
        let (word, rest) = cmd.split_once(char::is_whitespace).unwrap_or((cmd, ""));
        let rest = rest.trim();
        match word {
            "quit" | "q" => {
                self.done = true;
                Outcome::new(Status::Ok, "")
            }
            "help" | "h" => Outcome::new(Status::Ok, HELP),
            "add" => match load_into(&mut self.prog, rest) {
                Ok(w) => Outcome {
                    status: Status::Ok,
                    text: "ok".into(),
                    warnings: w,
                },
                Err(e) => Outcome::new(Status::Usage, e.to_string()),
            },
            "load" => match commands::read_program(Path::new(rest)) {
                Ok((prog, w)) => {
                    let n = prog.clauses.len();
                    self.prog = prog;
                    Outcome {
                        status: Status::Ok,
                        text: format!("loaded {n} clauses"),
                        warnings: w,
                    }
                }
                Err(o) => o,
            },
            "eq" | "unify" => match rest.split_once(" = ") {
                Some((t, u)) if word == "eq" => commands::eq_in(&mut self.prog, t, u),
                Some((t, u)) => commands::unify_in(&mut self.prog, t, u),
                None => Outcome::new(Status::Usage, format!("usage: :{word} T = U")),
            },
            "fresh" => match rest.split_once('#') {
                Some((a, t)) => commands::fresh_in(&mut self.prog, a.trim(), t.trim()),
                None => Outcome::new(Status::Usage, "usage: :fresh A # T"),
            },
            "norm" => commands::norm_in(&mut self.prog, rest, self.strategy, self.fuel),
            "model" => {
                commands::model_of(&self.prog, self.universe, self.term_depth, rest == "atoms")
            }
            "eval" => commands::eval_in(&mut self.prog, rest, self.universe, self.term_depth),
            "set" => self.set(rest),
            _ => Outcome::new(Status::Usage, format!("unknown command :{word}; try :help")),
        }
    }

    fn set(&mut self, args: &str) -> Outcome {
        let (key, value) = args.split_once(char::is_whitespace).unwrap_or((args, ""));
        let value = value.trim();
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| format!("{key} expects a number"))
        };
        let result = match key {
            "depth" => number().map(|n| self.opts.depth_limit = n),
            "answers" => number().map(|n| self.opts.max_answers = Some(n)),
            "fuel" => number().map(|n| self.fuel = n),
            "universe" => number().map(|n| self.universe = n),
            "term-depth" => number().map(|n| self.term_depth = n),
            "equivariant" => match value {
                "on" => {
                    self.opts.equivariant = true;
                    Ok(())
                }
                "off" => {
                    self.opts.equivariant = false;
                    Ok(())
                }
                _ => Err("equivariant expects on or off".to_string()),
            },
            "strategy" => match value {
                "beta" => Ok(Strategy::Beta),
                "beta-eta" => Ok(Strategy::BetaEta),
                "nbe" => Ok(Strategy::Nbe),
                _ => Err("strategy expects beta, beta-eta or nbe".to_string()),
            }
            .map(|s| self.strategy = s),
            _ => Err(format!("unknown setting {key}")),
        };
        match result {
            Ok(()) => Outcome::new(Status::Ok, "ok"),
            Err(e) => Outcome::new(Status::Usage, e),
        }
    }
}
