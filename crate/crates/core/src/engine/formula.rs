use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::constraint::Substitution;
use crate::name::{Name, NameSupply};
use crate::sort::Sort;
use crate::term::{alpha_eq_ground, fresh_ground, support, Term, Var};

use super::model::{GroundTerms, LeastModel};
use super::program::Atom;

/// First-order formulas with the И-quantifier. Quantifiers bind variables;
/// name-sorted variables stand for names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Eq(Term, Term),
    Fresh(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    New(Var, Box<Formula>),
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn forall(x: Var, body: Formula) -> Formula {
        Formula::Forall(x, Box::new(body))
    }

    pub fn exists(x: Var, body: Formula) -> Formula {
        Formula::Exists(x, Box::new(body))
    }

    pub fn new_q(x: Var, body: Formula) -> Formula {
        Formula::New(x, Box::new(body))
    }

    /// Variables not bound by a quantifier.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let terms = |ts: &[&Term], out: &mut Vec<Var>| {
            for t in ts {
                for v in t.vars() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => terms(&a.args.iter().collect::<Vec<_>>(), out),
            Formula::Eq(t, u) | Formula::Fresh(t, u) => terms(&[t, u], out),
            Formula::Not(p) => p.collect_free(bound, out),
            Formula::And(p, q)
            | Formula::Or(p, q)
            | Formula::Implies(p, q)
            | Formula::Iff(p, q) => {
                p.collect_free(bound, out);
                q.collect_free(bound, out);
            }
            Formula::Forall(x, p) | Formula::Exists(x, p) | Formula::New(x, p) => {
                bound.push(x.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every name mentioned anywhere in the formula.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit_terms(&mut |t| out.extend(t.names()));
        out
    }

    fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => a.args.iter().for_each(&mut *f),
            Formula::Eq(t, u) | Formula::Fresh(t, u) => {
                f(t);
                f(u);
            }
            Formula::Not(p)
            | Formula::Forall(_, p)
            | Formula::Exists(_, p)
            | Formula::New(_, p) => p.visit_terms(f),
            Formula::And(p, q)
            | Formula::Or(p, q)
            | Formula::Implies(p, q)
            | Formula::Iff(p, q) => {
                p.visit_terms(f);
                q.visit_terms(f);
            }
        }
    }

    /// Replaces free occurrences of `x` by the ground term `t`.
    pub fn instantiate(&self, x: &Var, t: &Term) -> Formula {
        let s = Substitution::singleton(x.clone(), t.clone());
        self.subst(&s, x)
    }

    fn subst(&self, s: &Substitution, x: &Var) -> Formula {
        let go = |p: &Formula| Box::new(p.subst(s, x));
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.map_args(|t| s.apply(t))),
            Formula::Eq(t, u) => Formula::Eq(s.apply(t), s.apply(u)),
            Formula::Fresh(t, u) => Formula::Fresh(s.apply(t), s.apply(u)),
            Formula::Not(p) => Formula::Not(go(p)),
            Formula::And(p, q) => Formula::And(go(p), go(q)),
            Formula::Or(p, q) => Formula::Or(go(p), go(q)),
            Formula::Implies(p, q) => Formula::Implies(go(p), go(q)),
            Formula::Iff(p, q) => Formula::Iff(go(p), go(q)),
            Formula::Forall(y, _) | Formula::Exists(y, _) | Formula::New(y, _) if y == x => {
                self.clone()
            }
            Formula::Forall(y, p) => Formula::Forall(y.clone(), go(p)),
            Formula::Exists(y, p) => Formula::Exists(y.clone(), go(p)),
            Formula::New(y, p) => Formula::New(y.clone(), go(p)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Eq(t, u) => write!(f, "{t} = {u}"),
            Formula::Fresh(t, u) => write!(f, "{t} # {u}"),
            Formula::Not(p) => write!(f, "~{}", Paren(p)),
            Formula::And(p, q) => write!(f, "{} /\\ {}", Paren(p), Paren(q)),
            Formula::Or(p, q) => write!(f, "{} \\/ {}", Paren(p), Paren(q)),
            Formula::Implies(p, q) => write!(f, "{} -> {}", Paren(p), Paren(q)),
            Formula::Iff(p, q) => write!(f, "{} <-> {}", Paren(p), Paren(q)),
            Formula::Forall(x, p) => write!(f, "forall {x}:{}. {p}", x.sort()),
            Formula::Exists(x, p) => write!(f, "exists {x}:{}. {p}", x.sort()),
            Formula::New(x, p) => write!(f, "new {x}:{}. {p}", x.sort()),
        }
    }
}

struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_) => {
                write!(f, "{}", self.0)
            }
            other => write!(f, "({other})"),
        }
    }
}

/// Which bound made a verdict undecidable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    TermDepth,
    NameUniverse,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::TermDepth => "term-depth",
            BoundKind::NameUniverse => "name-universe",
        })
    }
}

/// Kleene three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown(BoundKind),
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            u => u,
        }
    }
}

impl Truth {
    fn of(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn is_known(self) -> bool {
        !matches!(self, Truth::Unknown(_))
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, x) | (x, Truth::True) => x,
            (u, _) => u,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        !(!self).and(!other)
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truth::True => f.write_str("true"),
            Truth::False => f.write_str("false"),
            Truth::Unknown(k) => write!(f, "unknown({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula is not closed: free variable {0}")]
    Open(String),
    #[error("left side of `{0}` is not a name")]
    NotAName(String),
    #[error("И binds {0}, which is not name-sorted")]
    NewOverData(String),
}

/// Evaluates a closed formula in a bounded term model.
///
/// Quantifiers over names are exact: by equivariance every name outside
/// the formula behaves like one fresh representative. Quantifiers over data
/// range over the bounded terms, so they can only be refuted (∀) or
/// witnessed (∃); otherwise the verdict is unknown.
pub fn eval_formula(m: &LeastModel, phi: &Formula) -> Result<Truth, FormulaError> {
    if let Some(x) = phi.free_vars().first() {
        return Err(FormulaError::Open(x.to_string()));
    }
    let mut supply = NameSupply::new();
    for a in m.universe_names().chain(phi.names().iter()) {
        supply.reserve_above(a.id());
    }
    let universe: std::collections::BTreeMap<_, _> = m
        .signature
        .name_types()
        .map(|ty| (ty.clone(), m.universe(ty).to_vec()))
        .collect();
    let mut ev = Evaluator {
        m,
        supply,
        terms: GroundTerms::new(&m.signature, &universe),
    };
    ev.eval(phi)
}

struct Evaluator<'a> {
    m: &'a LeastModel,
    supply: NameSupply,
    terms: GroundTerms<'a>,
}

impl Evaluator<'_> {
    fn eval(&mut self, phi: &Formula) -> Result<Truth, FormulaError> {
        Ok(match phi {
            Formula::True => Truth::True,
            Formula::False => Truth::False,
            Formula::Atom(a) => self.atom(a),
            Formula::Eq(t, u) => self
                .bounded(&[t, u])
                .unwrap_or_else(|| Truth::of(alpha_eq_ground(t, u).unwrap_or(false))),
            Formula::Fresh(t, u) => match t {
                Term::Name(a) => Truth::of(fresh_ground(a, u).unwrap_or(false)),
                _ => return Err(FormulaError::NotAName(phi.to_string())),
            },
            Formula::Not(p) => !self.eval(p)?,
            Formula::And(p, q) => {
                let l = self.eval(p)?;
                if l == Truth::False {
                    return Ok(l);
                }
                l.and(self.eval(q)?)
            }
            Formula::Or(p, q) => {
                let l = self.eval(p)?;
                if l == Truth::True {
                    return Ok(l);
                }
                l.or(self.eval(q)?)
            }
            Formula::Implies(p, q) => (!self.eval(p)?).or(self.eval(q)?),
            Formula::Iff(p, q) => {
                let (l, r) = (self.eval(p)?, self.eval(q)?);
                match (l, r) {
                    (Truth::Unknown(k), _) | (_, Truth::Unknown(k)) => Truth::Unknown(k),
                    _ => Truth::of(l == r),
                }
            }
            Formula::Forall(x, p) => self.quantify(phi, x, p, true)?,
            Formula::Exists(x, p) => self.quantify(phi, x, p, false)?,
            Formula::New(x, p) => {
                let Sort::Name(ty) = x.sort() else {
                    return Err(FormulaError::NewOverData(x.to_string()));
                };
                let a = self.supply.fresh(ty);
                self.eval(&p.instantiate(x, &Term::Name(a)))?
            }
        })
    }

    /// Unknown when some argument is deeper than the model's bound.
    fn bounded(&self, ts: &[&Term]) -> Option<Truth> {
        ts.iter()
            .any(|t| t.depth() > self.m.bound.max_term_depth)
            .then_some(Truth::Unknown(BoundKind::TermDepth))
    }

    /// Membership after moving names outside the universe into it by swaps.
    fn atom(&mut self, a: &Atom) -> Truth {
        let args: Vec<&Term> = a.args.iter().collect();
        if let Some(u) = self.bounded(&args) {
            return u;
        }
        let mut supp = BTreeSet::new();
        for t in &a.args {
            supp.extend(support(t).unwrap_or_default());
        }
        let mut atom = a.clone();
        for n in supp.iter().filter(|n| !self.m.universe(n.ty()).contains(n)) {
            let target = self.m.universe(n.ty()).iter().find(|u| {
                !supp.contains(*u)
                    && !atom
                        .args
                        .iter()
                        .any(|t| !fresh_ground(u, t).unwrap_or(false))
            });
            let Some(u) = target else {
                return Truth::Unknown(BoundKind::NameUniverse);
            };
            let u = u.clone();
            atom = atom.map_args(|t| t.swap_unchecked(n, &u));
        }
        Truth::of(self.m.contains(&atom))
    }

    fn quantify(
        &mut self,
        phi: &Formula,
        x: &Var,
        body: &Formula,
        universal: bool,
    ) -> Result<Truth, FormulaError> {
        let (instances, exact) = match x.sort() {
            Sort::Name(ty) => {
                let mut names: Vec<Name> =
                    phi.names().into_iter().filter(|a| a.ty() == ty).collect();
                names.push(self.supply.fresh(ty));
                (names.into_iter().map(Term::Name).collect::<Vec<_>>(), true)
            }
            sort => {
                let pool = self.terms.of(sort, self.m.bound.max_term_depth);
                (pool.to_vec(), false)
            }
        };
        let decisive = if universal { Truth::False } else { Truth::True };
        let mut acc = if universal { Truth::True } else { Truth::False };
        for t in &instances {
            let v = self.eval(&body.instantiate(x, t))?;
            if v == decisive {
                return Ok(decisive);
            }
            acc = if universal { acc.and(v) } else { acc.or(v) };
        }
        if !exact && acc.is_known() {
            return Ok(Truth::Unknown(BoundKind::TermDepth));
        }
        Ok(acc)
    }
}
