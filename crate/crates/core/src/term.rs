//! Nominal terms and the ground judgments: swapping, freshness, α-equality, support.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::NominalError;
use crate::name::Name;
use crate::perm::Perm;
use crate::sort::Sort;

pub type Symbol = Arc<str>;

/// A unification variable. Renamed-apart copies share the label and differ by index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    label: Symbol,
    index: u32,
    sort: Sort,
}

impl Var {
    pub fn new(label: &str, sort: Sort) -> Var {
        Var {
            label: Arc::from(label),
            index: 0,
            sort,
        }
    }

    pub fn with_index(&self, index: u32) -> Var {
        Var {
            label: self.label.clone(),
            index,
            sort: self.sort.clone(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn sort(&self) -> &Sort {
        &self.sort
    }

    pub fn same_ident(&self, other: &Var) -> bool {
        self.index == other.index && self.label == other.label
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            f.write_str(&self.label)
        } else {
            write!(f, "{}_{}", self.label, self.index)
        }
    }
}

/// `t ::= a | π·X | c | f(t1,...,tn) | ⟨a⟩t`
///
/// Explicit swaps only survive on variables (as suspensions); everywhere else
/// they are pushed through, so ground terms are swap-free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Name(Name),
    Susp(Perm, Var),
    Const(Symbol),
    /// Always at least one argument; nullary applications are `Const`.
    App(Symbol, Vec<Term>),
    Abs(Name, Box<Term>),
}

impl Term {
    pub fn name(a: &Name) -> Term {
        Term::Name(a.clone())
    }

    pub fn var(x: Var) -> Term {
        Term::Susp(Perm::identity(), x)
    }

    pub fn constant(c: &str) -> Term {
        Term::Const(Arc::from(c))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::app_sym(Arc::from(f), args)
    }

    pub fn app_sym(f: Symbol, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Const(f)
        } else {
            Term::App(f, args)
        }
    }

    pub fn abs(a: Name, body: Term) -> Term {
        Term::Abs(a, Box::new(body))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Susp(..) => false,
            Term::Name(_) | Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
            Term::Abs(_, body) => body.is_ground(),
        }
    }

    pub fn as_var(&self) -> Option<(&Perm, &Var)> {
        match self {
            Term::Susp(p, x) => Some((p, x)),
            _ => None,
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Susp(_, x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::Name(_) | Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Abs(_, body) => body.collect_vars(out),
        }
    }

    pub fn occurs(&self, x: &Var) -> bool {
        match self {
            Term::Susp(_, y) => y == x,
            Term::Name(_) | Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(x)),
            Term::Abs(_, body) => body.occurs(x),
        }
    }

    /// Every name occurring anywhere: free, bound, or inside a suspension.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    pub(crate) fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Name(a) => {
                out.insert(a.clone());
            }
            Term::Susp(p, _) => out.extend(p.domain()),
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_names(out)),
            Term::Abs(a, body) => {
                out.insert(a.clone());
                body.collect_names(out);
            }
        }
    }

    pub fn mentions_name(&self, a: &Name) -> bool {
        match self {
            Term::Name(b) => a == b,
            Term::Susp(p, _) => p.swaps().iter().any(|(x, y)| x == a || y == a),
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|t| t.mentions_name(a)),
            Term::Abs(b, body) => a == b || body.mentions_name(a),
        }
    }

    /// Nesting depth of function symbols; names, constants and abstraction
    /// nodes do not add to it.
    pub fn depth(&self) -> usize {
        match self {
            Term::Name(_) | Term::Const(_) | Term::Susp(..) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            Term::Abs(_, body) => body.depth(),
        }
    }

    /// `π·t`. On suspensions the permutation is composed onto the suspended one.
    pub fn permute(&self, perm: &Perm) -> Term {
        if perm.is_identity() {
            return self.clone();
        }
        match self {
            Term::Name(a) => Term::Name(perm.apply(a)),
            Term::Susp(p, x) => Term::Susp(perm.compose(p), x.clone()),
            Term::Const(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.permute(perm)).collect())
            }
            Term::Abs(a, body) => Term::Abs(perm.apply(a), Box::new(body.permute(perm))),
        }
    }

    /// `(a b)·t`, without checking the name-types.
    pub(crate) fn swap_unchecked(&self, a: &Name, b: &Name) -> Term {
        if a == b {
            return self.clone();
        }
        let swap = |n: &Name| {
            if n == a {
                b.clone()
            } else if n == b {
                a.clone()
            } else {
                n.clone()
            }
        };
        match self {
            Term::Name(n) => Term::Name(swap(n)),
            Term::Susp(p, x) => Term::Susp(p.prepend_unchecked(a.clone(), b.clone()), x.clone()),
            Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|t| t.swap_unchecked(a, b)).collect(),
            ),
            Term::Abs(n, body) => Term::Abs(swap(n), Box::new(body.swap_unchecked(a, b))),
        }
    }

    /// Renames names by a map that must be injective on the names of `self`.
    /// Unlike swapping this is not a permutation, so callers use it only to
    /// instantiate clause-local names.
    pub fn rename_names(&self, map: &BTreeMap<Name, Name>) -> Term {
        let r = |n: &Name| map.get(n).cloned().unwrap_or_else(|| n.clone());
        match self {
            Term::Name(a) => Term::Name(r(a)),
            Term::Susp(p, x) => {
                let swaps: Vec<_> = p.swaps().iter().map(|(a, b)| (r(a), r(b))).collect();
                let perm = Perm::from_swaps(swaps).expect("renaming preserves name-types");
                Term::Susp(perm, x.clone())
            }
            Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|t| t.rename_names(map)).collect(),
            ),
            Term::Abs(a, body) => Term::Abs(r(a), Box::new(body.rename_names(map))),
        }
    }

    pub fn rename_vars(&self, map: &BTreeMap<Var, Var>) -> Term {
        match self {
            Term::Susp(p, x) => {
                Term::Susp(p.clone(), map.get(x).cloned().unwrap_or_else(|| x.clone()))
            }
            Term::Name(_) | Term::Const(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|t| t.rename_vars(map)).collect())
            }
            Term::Abs(a, body) => Term::Abs(a.clone(), Box::new(body.rename_vars(map))),
        }
    }
}

/// `(a b)·t`. Abstraction binders are swapped along with everything else,
/// never renamed first.
pub fn swap_term(pair: (&Name, &Name), t: &Term) -> Result<Term, NominalError> {
    let (a, b) = pair;
    if a.ty() != b.ty() {
        return Err(NominalError::SwapTypeMismatch(a.clone(), b.clone()));
    }
    Ok(t.swap_unchecked(a, b))
}

fn require_ground(t: &Term) -> Result<(), NominalError> {
    if t.is_ground() {
        Ok(())
    } else {
        Err(NominalError::OpenTerm(t.to_string()))
    }
}

/// `⊢ a # t` for ground `t`.
pub fn fresh_ground(a: &Name, t: &Term) -> Result<bool, NominalError> {
    require_ground(t)?;
    Ok(fresh_in(a, t))
}

fn fresh_in(a: &Name, t: &Term) -> bool {
    match t {
        Term::Name(b) => a != b,
        Term::Const(_) => true,
        Term::App(_, args) => args.iter().all(|u| fresh_in(a, u)),
        Term::Abs(b, body) => a == b || fresh_in(a, body),
        Term::Susp(..) => unreachable!("checked ground"),
    }
}

/// `⊢ t ≈ u` for ground terms.
///
/// Follows the inference rules directly. The swap `(a b)` introduced by the
/// second abstraction rule is not applied eagerly; it accumulates in a
/// renaming that is applied to names of `u` as they are reached.
pub fn alpha_eq_ground(t: &Term, u: &Term) -> Result<bool, NominalError> {
    require_ground(t)?;
    require_ground(u)?;
    alpha_under(t, u, &mut Renaming::default())
}

/// Swaps in application order: the first element acts first.
#[derive(Default)]
struct Renaming(Vec<(Name, Name)>);

impl Renaming {
    fn apply<'a>(&'a self, n: &'a Name) -> &'a Name {
        let mut cur = n;
        for (x, y) in &self.0 {
            if cur == x {
                cur = y;
            } else if cur == y {
                cur = x;
            }
        }
        cur
    }

    fn apply_inverse<'a>(&'a self, n: &'a Name) -> &'a Name {
        let mut cur = n;
        for (x, y) in self.0.iter().rev() {
            if cur == x {
                cur = y;
            } else if cur == y {
                cur = x;
            }
        }
        cur
    }
}

// Decides t ≈ π·u where π is `pi`.
fn alpha_under(t: &Term, u: &Term, pi: &mut Renaming) -> Result<bool, NominalError> {
    match (t, u) {
        (Term::Name(a), Term::Name(b)) => {
            if a.ty() != b.ty() {
                return Err(NominalError::SortMismatch(t.to_string(), u.to_string()));
            }
            Ok(a == pi.apply(b))
        }
        (Term::Const(c), Term::Const(d)) => Ok(c == d),
        (Term::App(f, ts), Term::App(g, us)) => {
            if f != g || ts.len() != us.len() {
                return Ok(false);
            }
            for (ti, ui) in ts.iter().zip(us) {
                if !alpha_under(ti, ui, pi)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Term::Abs(a, t1), Term::Abs(b0, u1)) => {
            if a.ty() != b0.ty() {
                return Err(NominalError::SortMismatch(t.to_string(), u.to_string()));
            }
            let b = pi.apply(b0).clone();
            if *a == b {
                return alpha_under(t1, u1, pi);
            }
            // ⟨a⟩t1 ≈ ⟨b⟩(π·u1) needs a # π·u1, i.e. π⁻¹(a) # u1, and t1 ≈ (a b)·π·u1.
            if !fresh_in(pi.apply_inverse(a), u1) {
                return Ok(false);
            }
            pi.0.push((a.clone(), b));
            let r = alpha_under(t1, u1, pi);
            pi.0.pop();
            r
        }
        (Term::Name(_), _) | (_, Term::Name(_)) | (Term::Abs(..), _) | (_, Term::Abs(..)) => {
            Err(NominalError::SortMismatch(t.to_string(), u.to_string()))
        }
        _ => Ok(false),
    }
}

/// `FN(t)`: the names not fresh for a ground term.
pub fn support(t: &Term) -> Result<BTreeSet<Name>, NominalError> {
    require_ground(t)?;
    let mut out = BTreeSet::new();
    free_names(t, &mut Vec::new(), &mut out);
    Ok(out)
}

fn free_names(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Name(a) => {
            if !bound.contains(a) {
                out.insert(a.clone());
            }
        }
        Term::Const(_) | Term::Susp(..) => {}
        Term::App(_, args) => args.iter().for_each(|u| free_names(u, bound, out)),
        Term::Abs(a, body) => {
            bound.push(a.clone());
            free_names(body, bound, out);
            bound.pop();
        }
    }
}

/// An α-invariant key for ground terms: bound names become binder distances.
///
/// Used to index sets of ground atoms up to α-equivalence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlphaKey {
    Free(Name),
    Bound(usize),
    Const(Symbol),
    App(Symbol, Vec<AlphaKey>),
    Abs(Box<AlphaKey>),
}

impl AlphaKey {
    pub fn of(t: &Term) -> Result<AlphaKey, NominalError> {
        require_ground(t)?;
        Ok(key_of(t, &mut Vec::new()))
    }
}

fn key_of(t: &Term, binders: &mut Vec<Name>) -> AlphaKey {
    match t {
        Term::Name(a) => match binders.iter().rev().position(|b| b == a) {
            Some(i) => AlphaKey::Bound(i),
            None => AlphaKey::Free(a.clone()),
        },
        Term::Const(c) => AlphaKey::Const(c.clone()),
        Term::App(f, args) => {
            AlphaKey::App(f.clone(), args.iter().map(|u| key_of(u, binders)).collect())
        }
        Term::Abs(a, body) => {
            binders.push(a.clone());
            let k = key_of(body, binders);
            binders.pop();
            AlphaKey::Abs(Box::new(k))
        }
        Term::Susp(..) => unreachable!("checked ground"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(a) => write!(f, "{a}"),
            Term::Susp(p, x) => {
                if p.is_identity() {
                    write!(f, "{x}")
                } else {
                    write!(f, "{p}. {x}")
                }
            }
            Term::Const(c) if &**c == "nil" => f.write_str("[]"),
            Term::Const(c) => f.write_str(c),
            Term::App(s, args) if &**s == "cons" && args.len() == 2 => fmt_list(self, f),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Abs(a, body) => write!(f, "<{a}> {body}"),
        }
    }
}

fn fmt_list(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str("[")?;
    let mut cur = t;
    let mut first = true;
    loop {
        match cur {
            Term::App(s, args) if &**s == "cons" && args.len() == 2 => {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{}", args[0])?;
                cur = &args[1];
            }
            Term::Const(c) if &**c == "nil" => break,
            tail => {
                write!(f, " | {tail}")?;
                break;
            }
        }
    }
    f.write_str("]")
}
