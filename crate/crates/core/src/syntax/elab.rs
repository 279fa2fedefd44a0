use std::collections::HashMap;

use crate::engine::{Atom, Formula, Goal, HornClause, Program};
use crate::name::{Name, NameType};
use crate::sort::Sort;
use crate::term::{swap_term, Term, Var};

use super::lexer::Pos;
use super::parser::{Quant, Raw, RawFormula, RawGoal, RawSort};
use super::ParseError;

/// Result sort given to unknown function symbols in open mode.
pub const OPEN_SORT: &str = "term";

enum Fail {
    Error(ParseError),
    /// Some variable's sort is not known yet.
    Pending,
}

impl From<ParseError> for Fail {
    fn from(e: ParseError) -> Self {
        Fail::Error(e)
    }
}

type R<T> = Result<T, Fail>;

fn err<T>(pos: Pos, msg: impl Into<String>) -> R<T> {
    Err(Fail::Error(ParseError::new(pos, msg)))
}

/// Sort-directed elaboration of raw syntax against a program's signature.
///
/// In open mode unknown function symbols are declared on the fly with
/// result sort `term`, and unknown names get the default name-type.
pub struct Elab<'p> {
    pub prog: &'p mut Program,
    pub open: bool,
    pub warnings: Vec<String>,
    vars: HashMap<String, Sort>,
    bound: Vec<(String, Var)>,
    lenient: bool,
    changed: bool,
    anon: usize,
}

impl<'p> Elab<'p> {
    pub fn new(prog: &'p mut Program, open: bool) -> Elab<'p> {
        Elab {
            prog,
            open,
            warnings: Vec::new(),
            vars: HashMap::new(),
            bound: Vec::new(),
            lenient: false,
            changed: false,
            anon: 0,
        }
    }

    /// Runs `f` until variable sorts stop changing, then once more strictly.
    fn fixpoint<T>(&mut self, mut f: impl FnMut(&mut Self) -> R<T>) -> Result<T, ParseError> {
        self.vars.clear();
        for _ in 0..64 {
            self.lenient = true;
            self.changed = false;
            self.anon = 0;
            match f(self) {
                Err(Fail::Error(e)) => return Err(e),
                _ if !self.changed => break,
                _ => {}
            }
        }
        self.lenient = false;
        self.anon = 0;
        match f(self) {
            Ok(v) => Ok(v),
            Err(Fail::Error(e)) => Err(e),
            Err(Fail::Pending) => unreachable!("strict pass never defers"),
        }
    }

    pub fn term(&mut self, raw: &Raw, expected: Option<&Sort>) -> Result<(Term, Sort), ParseError> {
        let expected = expected.cloned();
        self.fixpoint(|e| e.elab(raw, expected.as_ref()))
    }

    /// Two terms of one sort; variable sorts may flow either way.
    pub fn term_pair(&mut self, t: &Raw, u: &Raw) -> Result<(Term, Term, Sort), ParseError> {
        self.fixpoint(|e| match e.elab(t, None) {
            Ok((t, s)) => Ok((t, e.elab(u, Some(&s))?.0, s)),
            Err(Fail::Pending) => {
                let (u, s) = e.elab(u, None)?;
                Ok((e.elab(t, Some(&s))?.0, u, s))
            }
            Err(err) => Err(err),
        })
    }

    pub fn clause(&mut self, head: &RawGoal, body: &[RawGoal]) -> Result<HornClause, ParseError> {
        let RawGoal::Atom(..) = head else {
            return Err(ParseError::new(
                head.pos(),
                "clause head must be an atomic formula",
            ));
        };
        self.fixpoint(|e| {
            let Goal::Atom(h) = e.goal(head)? else {
                unreachable!()
            };
            let mut goals = Vec::new();
            for g in body {
                goals.push(e.goal(g)?);
            }
            Ok(HornClause::new(h, goals))
        })
    }

    pub fn goals(&mut self, goals: &[RawGoal]) -> Result<Vec<Goal>, ParseError> {
        self.fixpoint(|e| goals.iter().map(|g| e.goal(g)).collect())
    }

    pub fn formula(&mut self, f: &RawFormula) -> Result<Formula, ParseError> {
        self.fixpoint(|e| e.form(f))
    }

    pub fn sort(&mut self, s: &RawSort) -> Result<Sort, ParseError> {
        match s {
            RawSort::Ident(x, pos) => {
                let sig = &self.prog.signature;
                if sig.has_name_type(&NameType::new(x)) {
                    Ok(Sort::name(x))
                } else if sig.has_data_type(x) {
                    Ok(Sort::data(x))
                } else {
                    Err(ParseError::new(*pos, format!("unknown sort {x}")))
                }
            }
            RawSort::Abs(a, pos, body) => {
                if !self.prog.signature.has_name_type(&NameType::new(a)) {
                    return Err(ParseError::new(*pos, format!("unknown name-type {a}")));
                }
                Ok(Sort::abs(NameType::new(a), self.sort(body)?))
            }
        }
    }

    fn form(&mut self, f: &RawFormula) -> R<Formula> {
        let b = |x: Formula| Box::new(x);
        Ok(match f {
            RawFormula::True => Formula::True,
            RawFormula::False => Formula::False,
            RawFormula::Goal(RawGoal::Fresh(a, t)) => {
                let (a, sa) = self.elab(a, None)?;
                if !matches!(sa, Sort::Name(_)) {
                    return err(f_pos(f), "left side of `#` must be a name");
                }
                let (t, _) = self.elab(t, None)?;
                Formula::Fresh(a, t)
            }
            RawFormula::Goal(g) => match self.goal(g)? {
                Goal::Atom(a) => Formula::Atom(a),
                Goal::Eq(t, u) => Formula::Eq(t, u),
                Goal::Fresh(a, t) => Formula::Fresh(Term::Name(a), t),
            },
            RawFormula::Not(p) => Formula::Not(b(self.form(p)?)),
            RawFormula::And(p, q) => Formula::And(b(self.form(p)?), b(self.form(q)?)),
            RawFormula::Or(p, q) => Formula::Or(b(self.form(p)?), b(self.form(q)?)),
            RawFormula::Implies(p, q) => Formula::Implies(b(self.form(p)?), b(self.form(q)?)),
            RawFormula::Iff(p, q) => Formula::Iff(b(self.form(p)?), b(self.form(q)?)),
            RawFormula::Quant(q, x, pos, s, body) => {
                let sort = self.sort(s)?;
                if *q == Quant::New && !matches!(sort, Sort::Name(_)) {
                    return err(*pos, format!("`new` must bind a name-type, found {sort}"));
                }
                let v = Var::new(x, sort);
                self.bound.push((x.clone(), v.clone()));
                let inner = self.form(body);
                self.bound.pop();
                let inner = b(inner?);
                match q {
                    Quant::Forall => Formula::Forall(v, inner),
                    Quant::Exists => Formula::Exists(v, inner),
                    Quant::New => Formula::New(v, inner),
                }
            }
        })
    }

    fn goal(&mut self, g: &RawGoal) -> R<Goal> {
        match g {
            RawGoal::Atom(p, args, pos) => {
                let Some(sorts) = self.prog.signature.pred(p).map(<[Sort]>::to_vec) else {
                    return err(*pos, format!("undeclared predicate {p}"));
                };
                if sorts.len() != args.len() {
                    return err(
                        *pos,
                        format!(
                            "{p} expects {} argument(s), got {}",
                            sorts.len(),
                            args.len()
                        ),
                    );
                }
                let mut out = Vec::new();
                let mut pending = false;
                for (a, s) in args.iter().zip(&sorts) {
                    match self.elab(a, Some(s)) {
                        Ok((t, _)) => out.push(t),
                        Err(Fail::Pending) => pending = true,
                        Err(e) => return Err(e),
                    }
                }
                if pending {
                    return Err(Fail::Pending);
                }
                Ok(Goal::Atom(Atom::new(p, out)))
            }
            RawGoal::Eq(t, u) => {
                let (t, u) = match self.elab(t, None) {
                    Ok((t, s)) => (t, self.elab(u, Some(&s))?.0),
                    Err(Fail::Pending) => {
                        let (u, s) = self.elab(u, None)?;
                        (self.elab(t, Some(&s))?.0, u)
                    }
                    Err(e) => return Err(e),
                };
                Ok(Goal::Eq(t, u))
            }
            RawGoal::Fresh(a, t) => {
                let (a_t, _) = match a {
                    Raw::Lower(..) => self.elab(a, None)?,
                    other => return err(other.pos(), "left side of `#` must be a name"),
                };
                let Term::Name(a_n) = a_t else {
                    return err(a.pos(), "left side of `#` must be a name");
                };
                let (t, _) = self.elab(t, None)?;
                Ok(Goal::Fresh(a_n, t))
            }
        }
    }

    fn default_name_type(&self) -> Option<NameType> {
        if self.open {
            return Some(NameType::new("var"));
        }
        self.prog.signature.name_types().next().cloned()
    }

    /// The name labelled `x`, declaring it if needed.
    fn name(&mut self, x: &str, ty: Option<&NameType>, pos: Pos) -> R<Name> {
        if let Some(n) = self.prog.names.get(x) {
            if let Some(ty) = ty {
                if n.ty() != ty {
                    return err(
                        pos,
                        format!("name {x} has name-type {}, expected {ty}", n.ty()),
                    );
                }
            }
            return Ok(n.clone());
        }
        if let Some((prefix, digits)) = x.rsplit_once('_') {
            let nt = NameType::new(prefix);
            if self.prog.signature.has_name_type(&nt)
                && !digits.is_empty()
                && digits.bytes().all(|b| b.is_ascii_digit())
            {
                if let Ok(id) = digits.parse::<u32>() {
                    if ty.is_some_and(|t| *t != nt) {
                        return err(pos, format!("name {x} has name-type {nt}"));
                    }
                    self.prog.supply.reserve_above(id);
                    return Ok(Name::new(nt, id));
                }
            }
        }
        let Some(ty) = ty.cloned().or_else(|| self.default_name_type()) else {
            return err(pos, format!("unknown identifier {x}"));
        };
        if !self.prog.signature.has_name_type(&ty) {
            self.prog.signature.declare_name_type(ty.as_str());
        }
        let n = self.prog.supply.declare(&ty, x);
        self.prog.names.insert(x.to_string(), n.clone());
        self.warnings
            .push(format!("{pos}: name {x} declared with name-type {ty}"));
        Ok(n)
    }

    /// The function wrapping names of `ty` into data sort `d`, if there is one.
    fn coercion(&self, ty: &NameType, d: &Sort) -> Option<&'static str> {
        let f = self.prog.signature.func("var")?;
        (f.args == [Sort::Name(ty.clone())] && Sort::Data(f.result.clone()) == *d).then_some("var")
    }

    fn finish(&mut self, t: Term, s: Sort, expected: Option<&Sort>, pos: Pos) -> R<(Term, Sort)> {
        let Some(want) = expected else {
            return Ok((t, s));
        };
        if s == *want {
            return Ok((t, s));
        }
        if let Sort::Name(ty) = &s {
            if let Some(f) = self.coercion(ty, want) {
                return Ok((Term::app(f, vec![t]), want.clone()));
            }
        }
        err(pos, format!("expected sort {want}, found {s} in `{t}`"))
    }

    fn lookup_var(&mut self, x: &str, expected: Option<&Sort>, pos: Pos) -> R<(Term, Sort)> {
        if let Some((_, v)) = self.bound.iter().rev().find(|(l, _)| l == x) {
            let (t, s) = (Term::var(v.clone()), v.sort().clone());
            return self.finish(t, s, expected, pos);
        }
        let label = if x == "_" {
            self.anon += 1;
            format!("_{}", self.anon)
        } else {
            x.to_string()
        };
        let sort = match (self.vars.get(&label), expected) {
            (Some(s), _) => s.clone(),
            (None, Some(want)) => {
                self.vars.insert(label.clone(), want.clone());
                self.changed = true;
                want.clone()
            }
            (None, None) if self.lenient => return Err(Fail::Pending),
            (None, None) if self.open => {
                let s = self.open_sort();
                self.vars.insert(label.clone(), s.clone());
                s
            }
            (None, None) => return err(pos, format!("cannot infer the sort of {x}")),
        };
        let v = Var::new(&label, sort.clone());
        self.finish(Term::var(v), sort, expected, pos)
    }

    fn open_sort(&mut self) -> Sort {
        if !self.prog.signature.has_data_type(OPEN_SORT) {
            self.prog.signature.declare_data_type(OPEN_SORT);
        }
        Sort::data(OPEN_SORT)
    }

    fn elab(&mut self, raw: &Raw, expected: Option<&Sort>) -> R<(Term, Sort)> {
        let pos = raw.pos();
        match raw {
            Raw::Upper(x, pos) => self.lookup_var(x, expected, *pos),
            Raw::Lower(x, pos) => {
                if self.bound.iter().any(|(l, _)| l == x) {
                    return self.lookup_var(x, expected, *pos);
                }
                if let Some(Sort::Name(ty)) = expected {
                    let ty = ty.clone();
                    let n = self.name(x, Some(&ty), *pos)?;
                    return Ok((Term::Name(n), Sort::Name(ty)));
                }
                if let Some(f) = self.prog.signature.func(x) {
                    if f.args.is_empty() {
                        let s = Sort::Data(f.result.clone());
                        return self.finish(Term::constant(x), s, expected, *pos);
                    }
                    return err(*pos, format!("{x} expects {} argument(s)", f.args.len()));
                }
                let ty = match expected {
                    Some(Sort::Data(_)) => {
                        let known = self.prog.names.get(x).map(|n| n.ty().clone());
                        let candidates: Vec<NameType> = match known {
                            Some(t) => vec![t],
                            None => self.prog.signature.name_types().cloned().collect(),
                        };
                        let want = expected.unwrap();
                        match candidates
                            .into_iter()
                            .find(|t| self.coercion(t, want).is_some())
                        {
                            Some(t) => Some(t),
                            None => {
                                return err(*pos, format!("unknown constant {x} of sort {want}"))
                            }
                        }
                    }
                    Some(other @ Sort::Abs(..)) => {
                        return err(*pos, format!("expected sort {other}, found name {x}"))
                    }
                    _ => None,
                };
                let n = self.name(x, ty.as_ref(), *pos)?;
                let s = Sort::Name(n.ty().clone());
                self.finish(Term::Name(n), s, expected, *pos)
            }
            Raw::Call(f, args, pos) => self.call(f, args, expected, *pos),
            Raw::Abs(a, apos, body) => {
                let (ty, body_sort) = match expected {
                    Some(Sort::Abs(ty, s)) => (Some(ty.clone()), Some((**s).clone())),
                    Some(other) => {
                        return err(pos, format!("expected sort {other}, found an abstraction"))
                    }
                    None => (None, None),
                };
                let n = self.name(a, ty.as_ref(), *apos)?;
                let (b, s) = self.elab(body, body_sort.as_ref())?;
                Ok((Term::abs(n.clone(), b), Sort::abs(n.ty().clone(), s)))
            }
            Raw::Lambda(binders, body, pos) => {
                let Some(lam) = self.prog.signature.func("lam").cloned() else {
                    return err(*pos, "λ-sugar needs a `lam` function symbol");
                };
                let [Sort::Abs(ty, inner)] = lam.args.as_slice() else {
                    return err(*pos, "`lam` must take a single abstraction");
                };
                let d = Sort::Data(lam.result.clone());
                if **inner != d {
                    return err(*pos, "`lam` must bind inside its own result sort");
                }
                let names: Vec<Name> = binders
                    .iter()
                    .map(|(x, p)| self.name(x, Some(ty), *p))
                    .collect::<R<_>>()?;
                let (mut t, _) = self.elab(body, Some(&d))?;
                for n in names.iter().rev() {
                    t = Term::app("lam", vec![Term::abs(n.clone(), t)]);
                }
                self.finish(t, d, expected, *pos)
            }
            Raw::Juxt(items) => {
                let Some(app) = self.prog.signature.func("app").cloned() else {
                    return err(pos, "juxtaposition needs an `app` function symbol");
                };
                let d = Sort::Data(app.result.clone());
                if app.args != [d.clone(), d.clone()] {
                    return err(pos, "`app` must be binary over its result sort");
                }
                let mut acc = self.elab(&items[0], Some(&d))?.0;
                for it in &items[1..] {
                    let arg = self.elab(it, Some(&d))?.0;
                    acc = Term::app("app", vec![acc, arg]);
                }
                self.finish(acc, d, expected, pos)
            }
            Raw::Swap((a, apos), (b, bpos), body) => {
                let ta = self.prog.names.get(a).map(|n| n.ty().clone());
                let tb = self.prog.names.get(b).map(|n| n.ty().clone());
                let na = self.name(a, tb.as_ref(), *apos)?;
                let nb = self.name(b, ta.as_ref().or(Some(na.ty())), *bpos)?;
                let (t, s) = self.elab(body, expected)?;
                match swap_term((&na, &nb), &t) {
                    Ok(t) => Ok((t, s)),
                    Err(e) => err(*apos, e.to_string()),
                }
            }
            Raw::Pair(x, y, pos) => {
                self.call("pair", &[(**x).clone(), (**y).clone()], expected, *pos)
            }
            Raw::List(items, tail, pos) => {
                let mut acc = match tail {
                    Some(t) => (**t).clone(),
                    None => Raw::Lower("nil".into(), *pos),
                };
                for it in items.iter().rev() {
                    acc = Raw::Call("cons".into(), vec![it.clone(), acc], it.pos());
                }
                if let Raw::Lower(..) = acc {
                    if !self
                        .prog
                        .signature
                        .func("nil")
                        .is_some_and(|f| f.args.is_empty())
                    {
                        return err(*pos, "list syntax needs a `nil` constant");
                    }
                }
                self.elab(&acc, expected)
            }
        }
    }

    fn call(
        &mut self,
        f: &str,
        args: &[Raw],
        expected: Option<&Sort>,
        pos: Pos,
    ) -> R<(Term, Sort)> {
        if let Some(decl) = self.prog.signature.func(f).cloned() {
            if decl.args.len() != args.len() {
                return err(
                    pos,
                    format!(
                        "{f} expects {} argument(s), got {}",
                        decl.args.len(),
                        args.len()
                    ),
                );
            }
            let mut out = Vec::new();
            let mut pending = false;
            for (a, s) in args.iter().zip(&decl.args) {
                match self.elab(a, Some(s)) {
                    Ok((t, _)) => out.push(t),
                    Err(Fail::Pending) => pending = true,
                    Err(e) => return Err(e),
                }
            }
            if pending {
                return Err(Fail::Pending);
            }
            let s = Sort::Data(decl.result.clone());
            return self.finish(Term::app(f, out), s, expected, pos);
        }
        if !self.open || self.prog.signature.pred(f).is_some() {
            return err(pos, format!("unknown function symbol {f}"));
        }
        let mut out = Vec::new();
        let mut sorts = Vec::new();
        for a in args {
            let (t, s) = self.elab(a, None)?;
            out.push(t);
            sorts.push(s);
        }
        let result = match expected {
            Some(Sort::Data(d)) => d.to_string(),
            _ => {
                self.open_sort();
                OPEN_SORT.to_string()
            }
        };
        if !self.prog.signature.has_data_type(&result) {
            self.prog.signature.declare_data_type(&result);
        }
        if let Err(e) = self.prog.signature.declare_func(f, sorts, &result) {
            return err(pos, e.to_string());
        }
        self.finish(Term::app(f, out), Sort::data(&result), expected, pos)
    }
}

fn f_pos(f: &RawFormula) -> Pos {
    match f {
        RawFormula::Goal(g) => g.pos(),
        RawFormula::Quant(_, _, p, _, _) => *p,
        _ => Pos::default(),
    }
}
