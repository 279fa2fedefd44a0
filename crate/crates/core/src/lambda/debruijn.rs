use std::fmt;

use crate::name::Name;
use crate::term::Term;

use super::Exp;

/// Nameless λ-terms; indices start at 1 for the nearest binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeBruijn {
    Index(usize),
    Lambda(Box<DeBruijn>),
    Apply(Box<DeBruijn>, Box<DeBruijn>),
    Free(Name),
}

impl fmt::Display for DeBruijn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeBruijn::Index(i) => write!(f, "{i}"),
            DeBruijn::Lambda(b) => write!(f, "λ{b}"),
            DeBruijn::Apply(m, n) => write!(f, "({m} {n})"),
            DeBruijn::Free(a) => write!(f, "{a}"),
        }
    }
}

/// Bound occurrences become binder distances; free names stay named.
/// `None` for terms outside the λ-signature.
pub fn to_debruijn(t: &Term) -> Option<DeBruijn> {
    convert(t, &mut Vec::new())
}

fn convert(t: &Term, binders: &mut Vec<Name>) -> Option<DeBruijn> {
    Some(match Exp::view(t)? {
        Exp::Var(a) => match binders.iter().rev().position(|b| b == a) {
            Some(i) => DeBruijn::Index(i + 1),
            None => DeBruijn::Free(a.clone()),
        },
        Exp::Lam(a, body) => {
            binders.push(a.clone());
            let b = convert(body, binders);
            binders.pop();
            DeBruijn::Lambda(Box::new(b?))
        }
        Exp::App(m, n) => DeBruijn::Apply(
            Box::new(convert(m, binders)?),
            Box::new(convert(n, binders)?),
        ),
    })
}
