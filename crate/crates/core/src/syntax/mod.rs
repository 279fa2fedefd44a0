//! Concrete syntax for terms, programs, goals and formulas.

mod elab;
mod lexer;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

pub use elab::OPEN_SORT;
pub use lexer::Pos;
pub use print::sugar;

use crate::engine::{Formula, Goal, Program};
use crate::lambda::lambda_signature;
use crate::name::NameType;
use crate::sort::Sort;
use crate::term::Term;

use elab::Elab;
use parser::{Parser, RawSort, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

/// An empty program over the λ-calculus signature, used for terms typed at
/// the command line without a program.
pub fn open_program() -> Program {
    Program::new(lambda_signature())
}

/// Reads a whole program.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut prog = Program::default();
    load_into(&mut prog, src)?;
    Ok(prog)
}

/// Adds the declarations and clauses of `src` to `prog`. Returns warnings.
pub fn load_into(prog: &mut Program, src: &str) -> Result<Vec<String>, ParseError> {
    let mut p = Parser::new(src)?;
    let mut warnings = Vec::new();
    while !p.at_eof() {
        match p.statement()? {
            Stmt::NameTypes(ids) => {
                for (x, _) in ids {
                    prog.signature.declare_name_type(&x);
                }
            }
            Stmt::DataTypes(ids) => {
                for (x, _) in ids {
                    prog.signature.declare_data_type(&x);
                }
            }
            Stmt::Names(ids, ty, pos) => {
                if prog.signature.has_data_type(&ty) {
                    return Err(ParseError::new(
                        pos,
                        format!("{ty} is a data type, not a name-type"),
                    ));
                }
                let nt = prog.signature.declare_name_type(&ty);
                for (x, pos) in ids {
                    if prog.names.contains_key(&x) {
                        return Err(ParseError::new(
                            pos,
                            format!("name {x} is already declared"),
                        ));
                    }
                    let n = prog.supply.declare(&nt, &x);
                    prog.names.insert(x, n);
                }
            }
            Stmt::Consts(ids, ty, tpos) => {
                for (x, pos) in ids {
                    prog.signature.declare_const(&x, &ty).map_err(|e| {
                        ParseError::new(
                            if prog.signature.has_data_type(&ty) {
                                pos
                            } else {
                                tpos
                            },
                            e.to_string(),
                        )
                    })?;
                }
            }
            Stmt::Func(f, pos, args, result, rpos) => {
                let sorts = resolve_sorts(prog, &args)?;
                if !prog.signature.has_data_type(&result) {
                    return Err(ParseError::new(rpos, format!("unknown data type {result}")));
                }
                prog.signature
                    .declare_func(&f, sorts, &result)
                    .map_err(|e| ParseError::new(pos, e.to_string()))?;
            }
            Stmt::Pred(name, pos, args) => {
                let sorts = resolve_sorts(prog, &args)?;
                prog.signature
                    .declare_pred(&name, sorts)
                    .map_err(|e| ParseError::new(pos, e.to_string()))?;
            }
            Stmt::Clause(head, body) => {
                let pos = head.pos();
                let mut e = Elab::new(prog, false);
                let c = e.clause(&head, &body)?;
                warnings.append(&mut e.warnings);
                prog.add_clause(c)
                    .map_err(|e| ParseError::new(pos, e.to_string()))?;
            }
        }
    }
    warnings.dedup();
    Ok(warnings)
}

fn resolve_sorts(prog: &mut Program, raw: &[RawSort]) -> Result<Vec<Sort>, ParseError> {
    let mut e = Elab::new(prog, false);
    raw.iter().map(|s| e.sort(s)).collect()
}

/// A term over the λ-calculus signature; unknown symbols are accepted.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut prog = open_program();
    parse_term_in(&mut prog, src, true).map(|(t, _, _)| t)
}

/// A term against `prog`'s signature and names. With `open`, unknown
/// function symbols and names are declared as they are met.
pub fn parse_term_in(
    prog: &mut Program,
    src: &str,
    open: bool,
) -> Result<(Term, Sort, Vec<String>), ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.term()?;
    p.expect_eof()?;
    let mut e = Elab::new(prog, open);
    let (t, s) = e.term(&raw, None)?;
    let mut w = e.warnings;
    w.dedup();
    Ok((t, s, w))
}

/// Two terms read against each other, so that a variable's sort may be
/// fixed by the other side.
pub fn parse_term_pair(
    prog: &mut Program,
    t: &str,
    u: &str,
    open: bool,
) -> Result<(Term, Term, Sort, Vec<String>), ParseError> {
    let raw = |src: &str| -> Result<_, ParseError> {
        let mut p = Parser::new(src)?;
        let r = p.term()?;
        p.expect_eof()?;
        Ok(r)
    };
    let (rt, ru) = (raw(t)?, raw(u)?);
    let mut e = Elab::new(prog, open);
    let (t, u, s) = e.term_pair(&rt, &ru)?;
    let mut w = e.warnings;
    w.dedup();
    Ok((t, u, s, w))
}

/// A term that must have sort `sort`.
pub fn parse_term_at(
    prog: &mut Program,
    src: &str,
    sort: &Sort,
    open: bool,
) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.term()?;
    p.expect_eof()?;
    Elab::new(prog, open).term(&raw, Some(sort)).map(|(t, _)| t)
}

/// A comma-separated conjunction of goals. Names in the query are global;
/// unknown ones are declared and reported as warnings.
pub fn parse_goals(prog: &mut Program, src: &str) -> Result<(Vec<Goal>, Vec<String>), ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.goals()?;
    p.eat_dot();
    p.expect_eof()?;
    let mut e = Elab::new(prog, false);
    let goals = e.goals(&raw)?;
    let mut w = e.warnings;
    w.dedup();
    Ok((goals, w))
}

pub fn parse_formula(prog: &mut Program, src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.formula()?;
    p.eat_dot();
    p.expect_eof()?;
    Elab::new(prog, false).formula(&raw)
}

/// Parses a sort such as `exp` or `<var>exp`.
pub fn parse_sort(prog: &mut Program, src: &str) -> Result<Sort, ParseError> {
    let mut p = Parser::new(src)?;
    let raw = p.sort_public()?;
    p.expect_eof()?;
    Elab::new(prog, false).sort(&raw)
}

/// The default name-type of terms read without a program.
pub fn default_name_type() -> NameType {
    NameType::new("var")
}
