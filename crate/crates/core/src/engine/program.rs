use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::SortError;
use crate::name::{Name, NameSupply};
use crate::sort::{check_args, well_sorted, Signature, SortContext};
use crate::term::{Symbol, Term, Var};

/// `p(t1, ..., tn)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    /// The atom as a term, so that atoms unify like applications.
    pub fn as_term(&self) -> Term {
        Term::app_sym(self.pred.clone(), self.args.clone())
    }

    pub fn map_args(&self, f: impl FnMut(&Term) -> Term) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(f).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for t in &self.args {
            for v in t.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.args.iter().flat_map(Term::names).collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return f.write_str(&self.pred);
        }
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A body goal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    Atom(Atom),
    Eq(Term, Term),
    Fresh(Name, Term),
}

impl Goal {
    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Goal {
        match self {
            Goal::Atom(a) => Goal::Atom(a.map_args(f)),
            Goal::Eq(t, u) => Goal::Eq(f(t), f(u)),
            Goal::Fresh(a, t) => match f(&Term::Name(a.clone())) {
                Term::Name(b) => Goal::Fresh(b, f(t)),
                _ => unreachable!("names map to names"),
            },
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Goal::Atom(a) => a.args.iter().collect(),
            Goal::Eq(t, u) => vec![t, u],
            Goal::Fresh(_, t) => vec![t],
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        for t in self.terms() {
            for v in t.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn names(&self) -> BTreeSet<Name> {
        let mut out: BTreeSet<Name> = self.terms().into_iter().flat_map(Term::names).collect();
        if let Goal::Fresh(a, _) = self {
            out.insert(a.clone());
        }
        out
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Atom(a) => write!(f, "{a}"),
            Goal::Eq(t, u) => write!(f, "{t} = {u}"),
            Goal::Fresh(a, t) => write!(f, "{a} # {t}"),
        }
    }
}

/// `Иa⃗.∀x⃗. body ⊃ head`. Every name in the clause is one of `new_names`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    pub new_names: Vec<Name>,
    pub vars: Vec<Var>,
    pub head: Atom,
    pub body: Vec<Goal>,
}

impl HornClause {
    /// Builds a clause, collecting its names and variables.
    pub fn new(head: Atom, body: Vec<Goal>) -> HornClause {
        let mut new_names: BTreeSet<Name> = head.names();
        let mut vars = head.vars();
        for g in &body {
            new_names.extend(g.names());
            for v in g.vars() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        HornClause {
            new_names: new_names.into_iter().collect(),
            vars,
            head,
            body,
        }
    }

    pub fn rename(&self, names: &BTreeMap<Name, Name>, vars: &BTreeMap<Var, Var>) -> HornClause {
        let f = |t: &Term| t.rename_names(names).rename_vars(vars);
        HornClause {
            new_names: self
                .new_names
                .iter()
                .map(|a| names.get(a).cloned().unwrap_or_else(|| a.clone()))
                .collect(),
            vars: self
                .vars
                .iter()
                .map(|v| vars.get(v).cloned().unwrap_or_else(|| v.clone()))
                .collect(),
            head: self.head.map_args(f),
            body: self.body.iter().map(|g| g.map_terms(f)).collect(),
        }
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, g) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{g}")?;
        }
        f.write_str(".")
    }
}

/// Renames every variable apart and replaces the И-names with names that
/// `supply` has never produced and that avoid `avoid`.
pub fn freshen_clause<'a, I>(c: &HornClause, supply: &mut NameSupply, avoid: I) -> HornClause
where
    I: IntoIterator<Item = &'a Term>,
    I::IntoIter: Clone,
{
    let avoid = avoid.into_iter();
    let names: BTreeMap<Name, Name> = c
        .new_names
        .iter()
        .map(|a| (a.clone(), supply.fresh_name(a.ty(), avoid.clone())))
        .collect();
    let vars: BTreeMap<Var, Var> = c
        .vars
        .iter()
        .map(|v| (v.clone(), v.with_index(supply.fresh_var_index())))
        .collect();
    c.rename(&names, &vars)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("undeclared predicate {0}")]
    UnknownPredicate(String),
    #[error("in clause `{clause}`: {error}")]
    Sort { clause: String, error: SortError },
}

/// A signature together with an ordered list of clauses.
#[derive(Clone, Debug, Default)]
pub struct Program {
    pub signature: Signature,
    pub clauses: Vec<HornClause>,
    /// Names declared with `name a, b : ty.`, by label.
    pub names: BTreeMap<String, Name>,
    /// The supply used while reading the program; queries keep drawing from it.
    pub supply: NameSupply,
}

impl Program {
    pub fn new(signature: Signature) -> Program {
        Program {
            signature,
            ..Program::default()
        }
    }

    /// Checks the clause against the signature and appends it.
    pub fn add_clause(&mut self, c: HornClause) -> Result<(), ProgramError> {
        self.check_clause(&c)?;
        for a in &c.new_names {
            self.supply.reserve_above(a.id());
        }
        self.clauses.push(c);
        Ok(())
    }

    pub fn check_clause(&self, c: &HornClause) -> Result<(), ProgramError> {
        let mut ctx = SortContext::new();
        for v in &c.vars {
            ctx.bind_var(v.clone());
        }
        for a in &c.new_names {
            ctx.declare_fresh_name(a.clone());
        }
        let wrap = |error| ProgramError::Sort {
            clause: c.to_string(),
            error,
        };
        self.check_atom(&ctx, &c.head).map_err(|e| match e {
            ProgramError::Sort { error, .. } => wrap(error),
            other => other,
        })?;
        for g in &c.body {
            self.check_goal(&ctx, g).map_err(|e| match e {
                ProgramError::Sort { error, .. } => wrap(error),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn check_atom(&self, ctx: &SortContext, a: &Atom) -> Result<(), ProgramError> {
        let sorts = self
            .signature
            .pred(&a.pred)
            .ok_or_else(|| ProgramError::UnknownPredicate(a.pred.to_string()))?;
        check_args(ctx, &self.signature, &a.pred, sorts, &a.args).map_err(|error| {
            ProgramError::Sort {
                clause: a.to_string(),
                error,
            }
        })
    }

    pub fn check_goal(&self, ctx: &SortContext, g: &Goal) -> Result<(), ProgramError> {
        let err = |error| ProgramError::Sort {
            clause: g.to_string(),
            error,
        };
        match g {
            Goal::Atom(a) => self.check_atom(ctx, a),
            Goal::Eq(t, u) => {
                let st = well_sorted(ctx, &self.signature, t).map_err(err)?;
                let su = well_sorted(ctx, &self.signature, u).map_err(err)?;
                if st != su {
                    return Err(err(SortError::Mismatch {
                        expected: st,
                        found: su,
                        term: u.to_string(),
                    }));
                }
                Ok(())
            }
            Goal::Fresh(a, t) => {
                well_sorted(ctx, &self.signature, &Term::Name(a.clone())).map_err(err)?;
                well_sorted(ctx, &self.signature, t).map_err(err)?;
                Ok(())
            }
        }
    }

    /// Largest name id used by the program, if any.
    pub fn max_name_id(&self) -> Option<u32> {
        let declared = self.names.values().map(Name::id);
        let used = self
            .clauses
            .iter()
            .flat_map(|c| c.new_names.iter().map(Name::id));
        declared.chain(used).max()
    }

    pub fn clauses_for<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a HornClause> + 'a {
        self.clauses.iter().filter(move |c| &*c.head.pred == pred)
    }
}
