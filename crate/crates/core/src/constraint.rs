//! Freshness and α-equality over open terms, and nominal unification.
//!
//! Solutions pair an idempotent substitution with a freshness context of
//! atomic constraints `a # X`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::name::Name;
use crate::perm::Perm;
use crate::term::{Term, Var};

/// A set of atomic freshness constraints `a # X`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreshnessContext(BTreeSet<(Name, Var)>);

impl FreshnessContext {
    pub fn new() -> FreshnessContext {
        FreshnessContext::default()
    }

    pub fn insert(&mut self, a: Name, x: Var) -> bool {
        self.0.insert((a, x))
    }

    pub fn contains(&self, a: &Name, x: &Var) -> bool {
        // Avoid cloning: the set is small and ordered by name first.
        self.0.iter().any(|(b, y)| b == a && y == x)
    }

    pub fn extend(&mut self, other: FreshnessContext) {
        self.0.extend(other.0);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Var)> {
        self.0.iter()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Name, &Var) -> bool) {
        self.0.retain(|(a, x)| keep(a, x));
    }

    /// Every name `a` with `a # x` in the context.
    pub fn names_fresh_for(&self, x: &Var) -> BTreeSet<Name> {
        self.0
            .iter()
            .filter(|(_, y)| y == x)
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Pushes the context through a substitution: constraints on bound
    /// variables are re-solved against their images.
    pub fn apply(&self, theta: &Substitution) -> Result<FreshnessContext, FreshnessFailure> {
        let mut out = FreshnessContext::new();
        for (a, x) in &self.0 {
            match theta.get(x) {
                Some(t) => {
                    let residual = fresh_open(&FreshnessContext::new(), a, t)?;
                    out.extend(residual);
                }
                None => {
                    out.insert(a.clone(), x.clone());
                }
            }
        }
        Ok(out)
    }
}

impl FromIterator<(Name, Var)> for FreshnessContext {
    fn from_iter<I: IntoIterator<Item = (Name, Var)>>(iter: I) -> Self {
        FreshnessContext(iter.into_iter().collect())
    }
}

impl fmt::Display for FreshnessContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, x)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a} # {x}")?;
        }
        Ok(())
    }
}

/// `a # t` could not hold for any instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{name} is not fresh for {term}")]
pub struct FreshnessFailure {
    pub name: Name,
    pub term: Term,
}

/// The least set of atomic constraints that, together with `ctx`, entails `a # t`.
///
/// Constraints already in `ctx` are not repeated. A suspension `π·X` reduces
/// to `π⁻¹(a) # X`.
pub fn fresh_open(
    ctx: &FreshnessContext,
    a: &Name,
    t: &Term,
) -> Result<FreshnessContext, FreshnessFailure> {
    let mut out = FreshnessContext::new();
    fresh_into(ctx, a, t, t, &mut out)?;
    Ok(out)
}

fn fresh_into(
    ctx: &FreshnessContext,
    a: &Name,
    t: &Term,
    whole: &Term,
    out: &mut FreshnessContext,
) -> Result<(), FreshnessFailure> {
    match t {
        Term::Name(b) if a == b => Err(FreshnessFailure {
            name: a.clone(),
            term: whole.clone(),
        }),
        Term::Name(_) | Term::Const(_) => Ok(()),
        Term::App(_, args) => {
            for u in args {
                fresh_into(ctx, a, u, whole, out)?;
            }
            Ok(())
        }
        Term::Abs(b, _) if a == b => Ok(()),
        Term::Abs(_, body) => fresh_into(ctx, a, body, whole, out),
        Term::Susp(p, x) => {
            let c = p.apply_inverse(a);
            if !ctx.contains(&c, x) {
                out.insert(c, x.clone());
            }
            Ok(())
        }
    }
}

/// Whether `ctx` alone entails `a # t`.
pub fn fresh_entailed(ctx: &FreshnessContext, a: &Name, t: &Term) -> bool {
    matches!(fresh_open(ctx, a, t), Ok(residual) if residual.is_empty())
}

/// Names of `t` that are not provably fresh for it without extra constraints.
pub fn open_support(t: &Term) -> BTreeSet<Name> {
    t.names()
        .into_iter()
        .filter(|a| !fresh_entailed(&FreshnessContext::new(), a, t))
        .collect()
}

/// An idempotent map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(x: Var, t: Term) -> Substitution {
        let mut m = BTreeMap::new();
        m.insert(x, t);
        Substitution(m)
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    /// Homomorphic application; `π·X` with `X ↦ u` becomes `π·u`.
    pub fn apply(&self, t: &Term) -> Term {
        if self.0.is_empty() {
            return t.clone();
        }
        match t {
            Term::Susp(p, x) => match self.0.get(x) {
                Some(u) => u.permute(p),
                None => t.clone(),
            },
            Term::Name(_) | Term::Const(_) => t.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|u| self.apply(u)).collect())
            }
            Term::Abs(a, body) => Term::Abs(a.clone(), Box::new(self.apply(body))),
        }
    }

    /// Adds `x ↦ t`, where `x` must not occur in `t` nor be bound already.
    /// Existing images are updated so the result stays idempotent.
    pub fn bind(&mut self, x: Var, t: Term) {
        debug_assert!(!t.occurs(&x));
        let single = Substitution::singleton(x.clone(), t.clone());
        for image in self.0.values_mut() {
            *image = single.apply(image);
        }
        let t = self.apply(&t);
        self.0.insert(x, t);
    }

    /// `later ∘ self`: apply `self` first, then `later`.
    pub fn then(&self, later: &Substitution) -> Substitution {
        let mut out: BTreeMap<Var, Term> = self
            .0
            .iter()
            .map(|(x, t)| (x.clone(), later.apply(t)))
            .collect();
        for (x, t) in &later.0 {
            out.entry(x.clone()).or_insert_with(|| t.clone());
        }
        Substitution(out)
    }

    /// Keeps only the bindings for `vars`.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution(
            self.0
                .iter()
                .filter(|(x, _)| vars.contains(x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        )
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

pub fn apply_subst(theta: &Substitution, t: &Term) -> Term {
    theta.apply(t)
}

/// Applies `theta` to each goal `a # t` and collects the residual atomic constraints.
pub fn solve_freshness(
    goals: &[(Name, Term)],
    theta: &Substitution,
) -> Result<FreshnessContext, FreshnessFailure> {
    let mut out = FreshnessContext::new();
    for (a, t) in goals {
        let residual = fresh_open(&out, a, &theta.apply(t))?;
        out.extend(residual);
    }
    Ok(out)
}

/// A unification problem: equations `t ≈? u` and freshness goals `a #? t`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub equations: Vec<(Term, Term)>,
    pub freshness: Vec<(Name, Term)>,
}

impl Problem {
    pub fn equation(t: Term, u: Term) -> Problem {
        Problem {
            equations: vec![(t, u)],
            freshness: Vec::new(),
        }
    }
}

/// A unifier together with the freshness constraints it needs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Solution {
    pub subst: Substitution,
    pub fresh: FreshnessContext,
}

impl Solution {
    pub fn apply(&self, t: &Term) -> Term {
        self.subst.apply(t)
    }
}

/// Why unification failed, with the offending sub-problem. Failures are
/// rare and reported once, so the terms are kept inline rather than boxed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyFailure {
    #[error("symbol clash: {0} vs {1}")]
    SymbolClash(Term, Term),
    #[error("name clash: {0} vs {1}")]
    NameClash(Name, Name),
    #[error("occurs check: {0} occurs in {1}")]
    OccursCheck(Var, Term),
    #[error("freshness: {0}")]
    Freshness(#[from] FreshnessFailure),
}

#[allow(clippy::result_large_err)]
pub fn unify(t: &Term, u: &Term) -> Result<Solution, UnifyFailure> {
    unify_problem(Problem::equation(t.clone(), u.clone()))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Class {
    RigidRigid,
    FlexRigid,
    FlexFlex,
}

fn classify(t: &Term, u: &Term) -> Class {
    match (t.as_var().is_some(), u.as_var().is_some()) {
        (false, false) => Class::RigidRigid,
        (true, true) => Class::FlexFlex,
        _ => Class::FlexRigid,
    }
}

/// Nominal unification. Equations are solved before the freshness goals;
/// among equations rigid-rigid ones go first, then flex-rigid, then flex-flex.
#[allow(clippy::result_large_err)]
pub fn unify_problem(problem: Problem) -> Result<Solution, UnifyFailure> {
    let Problem {
        mut equations,
        mut freshness,
    } = problem;
    let mut theta = Substitution::new();

    while let Some(idx) = pick(&equations) {
        let (t, u) = equations.remove(idx);
        if t == u {
            continue;
        }
        match (&t, &u) {
            (Term::Susp(p, x), Term::Susp(q, y)) if x == y => {
                for a in p.disagreement_set(q) {
                    freshness.push((a, Term::var(x.clone())));
                }
            }
            (Term::Susp(p, x), other) | (other, Term::Susp(p, x)) => {
                if other.occurs(x) {
                    return Err(UnifyFailure::OccursCheck(x.clone(), other.clone()));
                }
                let image = other.permute(&p.inverse());
                let single = Substitution::singleton(x.clone(), image.clone());
                for (l, r) in equations.iter_mut() {
                    *l = single.apply(l);
                    *r = single.apply(r);
                }
                theta.bind(x.clone(), image);
            }
            (Term::Name(a), Term::Name(b)) => {
                return Err(UnifyFailure::NameClash(a.clone(), b.clone()));
            }
            (Term::App(f, ts), Term::App(g, us)) if f == g && ts.len() == us.len() => {
                equations.extend(ts.iter().cloned().zip(us.iter().cloned()));
            }
            (Term::Abs(a, t1), Term::Abs(b, u1)) if a.ty() == b.ty() => {
                if a == b {
                    equations.push((*t1.clone(), *u1.clone()));
                } else {
                    equations.push((*t1.clone(), u1.swap_unchecked(a, b)));
                    freshness.push((a.clone(), *u1.clone()));
                }
            }
            _ => return Err(UnifyFailure::SymbolClash(t.clone(), u.clone())),
        }
    }

    let fresh = solve_freshness(&freshness, &theta)?;
    Ok(Solution {
        subst: theta,
        fresh,
    })
}

fn pick(equations: &[(Term, Term)]) -> Option<usize> {
    equations
        .iter()
        .enumerate()
        .min_by_key(|(i, (t, u))| (classify(t, u), *i))
        .map(|(i, _)| i)
}

/// Whether `ctx` entails `t ≈ u` for every ground instance respecting it.
pub fn alpha_eq_open(ctx: &FreshnessContext, t: &Term, u: &Term) -> bool {
    match (t, u) {
        (Term::Name(a), Term::Name(b)) => a == b,
        (Term::Const(c), Term::Const(d)) => c == d,
        (Term::App(f, ts), Term::App(g, us)) => {
            f == g
                && ts.len() == us.len()
                && ts.iter().zip(us).all(|(x, y)| alpha_eq_open(ctx, x, y))
        }
        (Term::Abs(a, t1), Term::Abs(b, u1)) => {
            if a == b {
                alpha_eq_open(ctx, t1, u1)
            } else {
                a.ty() == b.ty()
                    && fresh_entailed(ctx, a, u1)
                    && alpha_eq_open(ctx, t1, &u1.swap_unchecked(a, b))
            }
        }
        (Term::Susp(p, x), Term::Susp(q, y)) => {
            x == y && p.disagreement_set(q).iter().all(|a| ctx.contains(a, x))
        }
        _ => false,
    }
}

/// Identity-permutation helper used by callers building suspensions.
pub fn suspend(perm: Perm, x: Var) -> Term {
    Term::Susp(perm, x)
}
