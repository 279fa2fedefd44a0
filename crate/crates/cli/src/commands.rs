use std::path::Path;

use nomlog::engine::{eval_formula, least_model_enum, Bound, Program, SolveOptions, Solver, Truth};
use nomlog::lambda::{beta_normalize, nbe_normalize, normalize};
use nomlog::syntax::{
    load_into, open_program, parse_formula, parse_goals, parse_term_at, parse_term_in,
    parse_term_pair, sugar,
};
use nomlog::{
    alpha_eq_ground, alpha_eq_open, fresh_ground, fresh_open, unify as unify_terms,
    FreshnessContext, Sort, Term, Var,
};

use crate::Strategy;

/// Exit statuses shared by every command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// The question was answered negatively.
    Fail = 1,
    /// Bad input: unreadable file, syntax or sort error.
    Usage = 2,
    /// A depth, fuel or model bound decided the outcome.
    Exhausted = 3,
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub text: String,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(status: Status, text: impl Into<String>) -> Outcome {
        Outcome {
            status,
            text: text.into(),
            warnings: Vec::new(),
        }
    }

    fn verdict(b: bool) -> Outcome {
        if b {
            Outcome::new(Status::Ok, "true")
        } else {
            Outcome::new(Status::Fail, "false")
        }
    }

    fn warn(mut self, w: Vec<String>) -> Outcome {
        self.warnings.extend(w);
        self
    }
}

fn usage(msg: impl Into<String>) -> Outcome {
    Outcome::new(Status::Usage, msg)
}

pub fn read_program(file: &Path) -> Result<(Program, Vec<String>), Outcome> {
    let src = std::fs::read_to_string(file)
        .map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
    let mut prog = Program::default();
    let warnings =
        load_into(&mut prog, &src).map_err(|e| usage(format!("{}:{e}", file.display())))?;
    Ok((prog, warnings))
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(o) => return o,
        }
    };
}

pub fn check(file: &Path) -> Outcome {
    let (prog, w) = attempt!(read_program(file));
    let preds = prog.signature.preds().count();
    Outcome::new(
        Status::Ok,
        format!("ok: {} clauses, {preds} predicates", prog.clauses.len()),
    )
    .warn(w)
}

/// Reads two terms of one sort into `prog`, declaring unknown names and
/// symbols as they are met.
fn pair_in(prog: &mut Program, t: &str, u: &str) -> Result<(Term, Term), Outcome> {
    parse_term_pair(prog, t, u, true)
        .map(|(t, u, _, _)| (t, u))
        .map_err(|e| usage(e.to_string()))
}

pub fn eq(t: &str, u: &str) -> Outcome {
    eq_in(&mut open_program(), t, u)
}

pub fn eq_in(prog: &mut Program, t: &str, u: &str) -> Outcome {
    let (t, u) = attempt!(pair_in(prog, t, u));
    let equal = if t.is_ground() && u.is_ground() {
        alpha_eq_ground(&t, &u).unwrap_or(false)
    } else {
        alpha_eq_open(&FreshnessContext::new(), &t, &u)
    };
    Outcome::verdict(equal)
}

pub fn fresh(name: &str, t: &str) -> Outcome {
    fresh_in(&mut open_program(), name, t)
}

pub fn fresh_in(prog: &mut Program, name: &str, t: &str) -> Outcome {
    let parse = |prog: &mut Program, src: &str| {
        parse_term_in(prog, src, true).map_err(|e| usage(e.to_string()))
    };
    let (a, _, _) = attempt!(parse(prog, name));
    let (t, _, _) = attempt!(parse(prog, t));
    let Term::Name(a) = &a else {
        return usage(format!("{a} is not a name"));
    };
    if t.is_ground() {
        return Outcome::verdict(fresh_ground(a, &t).unwrap_or(false));
    }
    match fresh_open(&FreshnessContext::new(), a, &t) {
        Err(_) => Outcome::verdict(false),
        Ok(residual) if residual.is_empty() => Outcome::verdict(true),
        // Holds exactly under these constraints.
        Ok(residual) => Outcome::new(Status::Ok, constraint_lines(&residual).join("\n")),
    }
}

fn constraint_lines(ctx: &FreshnessContext) -> Vec<String> {
    ctx.iter().map(|(a, x)| format!("{a} # {x}")).collect()
}

pub fn unify(t: &str, u: &str) -> Outcome {
    unify_in(&mut open_program(), t, u)
}

pub fn unify_in(prog: &mut Program, t: &str, u: &str) -> Outcome {
    let (t, u) = attempt!(pair_in(prog, t, u));
    match unify_terms(&t, &u) {
        Err(e) => Outcome::new(Status::Fail, format!("fail: {e}")),
        Ok(sol) => {
            let mut vars: Vec<Var> = Vec::new();
            for x in t.vars().into_iter().chain(u.vars()) {
                if !vars.contains(&x) {
                    vars.push(x);
                }
            }
            let mut lines: Vec<String> = vars
                .iter()
                .map(|x| format!("{x} = {}", sol.subst.apply(&Term::var(x.clone()))))
                .collect();
            lines.extend(constraint_lines(&sol.fresh));
            if lines.is_empty() {
                lines.push("yes".into());
            }
            Outcome::new(Status::Ok, lines.join("\n"))
        }
    }
}

pub fn query(
    file: &Path,
    goal: &str,
    depth: usize,
    equivariant: bool,
    max_answers: usize,
) -> Outcome {
    let (mut prog, mut w) = attempt!(read_program(file));
    let opts = SolveOptions {
        depth_limit: depth,
        equivariant,
        max_answers: Some(max_answers),
    };
    let out = query_in(&mut prog, goal, opts);
    w.extend(out.warnings);
    Outcome { warnings: w, ..out }
}

pub fn query_in(prog: &mut Program, goal: &str, opts: SolveOptions) -> Outcome {
    let (goals, w) = match parse_goals(prog, goal) {
        Ok(r) => r,
        Err(e) => return usage(e.to_string()),
    };
    let mut solver = Solver::new(prog, opts);
    let mut answers = solver.solve(&goals);
    let shown: Vec<String> = answers.by_ref().map(|a| a.to_string()).collect();
    let exhausted = answers.depth_exhausted();
    drop(answers);
    // Later queries in the same session keep drawing fresh names from here.
    prog.supply = solver.supply_mut().clone();
    let out = if !shown.is_empty() {
        Outcome::new(Status::Ok, shown.join("\n;\n"))
    } else if exhausted {
        Outcome::new(Status::Exhausted, "no (depth limit reached)")
    } else {
        Outcome::new(Status::Fail, "no")
    };
    out.warn(w)
}

pub fn norm(term: &str, strategy: Strategy, fuel: usize) -> Outcome {
    norm_in(&mut open_program(), term, strategy, fuel)
}

pub fn norm_in(prog: &mut Program, term: &str, strategy: Strategy, fuel: usize) -> Outcome {
    let t = match parse_term_at(prog, term, &Sort::data("exp"), true) {
        Ok(t) => t,
        Err(e) => return usage(e.to_string()),
    };
    if !t.is_ground() {
        return usage(format!("{t} has free variables"));
    }
    let supply = &mut prog.supply;
    let result = match strategy {
        Strategy::Beta => beta_normalize(supply, &t, fuel),
        Strategy::BetaEta => normalize(supply, &t, fuel),
        Strategy::Nbe => nbe_normalize(supply, &t, fuel).ok(),
    };
    match result {
        Some(nf) => Outcome::new(Status::Ok, sugar(&nf)),
        None => Outcome::new(Status::Exhausted, "no normal form within fuel"),
    }
}

fn bound(universe: usize, term_depth: usize) -> Bound {
    Bound {
        max_term_depth: term_depth,
        name_universe_size: universe,
    }
}

pub fn model(file: &Path, universe: usize, term_depth: usize, atoms: bool) -> Outcome {
    let (prog, w) = attempt!(read_program(file));
    model_of(&prog, universe, term_depth, atoms).warn(w)
}

pub fn model_of(prog: &Program, universe: usize, term_depth: usize, atoms: bool) -> Outcome {
    let m = least_model_enum(prog, bound(universe, term_depth));
    let mut lines = vec![format!("{} atoms", m.len())];
    if atoms {
        let mut shown: Vec<String> = m.atoms().iter().map(|a| format!("{a}.")).collect();
        shown.sort();
        lines.extend(shown);
    }
    Outcome::new(Status::Ok, lines.join("\n"))
}

pub fn eval(file: &Path, formula: &str, universe: usize, term_depth: usize) -> Outcome {
    let (mut prog, w) = attempt!(read_program(file));
    eval_in(&mut prog, formula, universe, term_depth).warn(w)
}

pub fn eval_in(prog: &mut Program, formula: &str, universe: usize, term_depth: usize) -> Outcome {
    let phi = match parse_formula(prog, formula) {
        Ok(phi) => phi,
        Err(e) => return usage(e.to_string()),
    };
    let m = least_model_enum(prog, bound(universe, term_depth));
    match eval_formula(&m, &phi) {
        Err(e) => usage(e.to_string()),
        Ok(t) => {
            let status = match t {
                Truth::True => Status::Ok,
                Truth::False => Status::Fail,
                Truth::Unknown(_) => Status::Exhausted,
            };
            Outcome::new(status, t.to_string())
        }
    }
}
