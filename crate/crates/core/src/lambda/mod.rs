//! The untyped λ-calculus as nominal terms over `var`, `lam` and `app`.

mod debruijn;
mod enumerate;
mod nbe;
mod reduce;

pub use debruijn::{to_debruijn, DeBruijn};
pub use enumerate::{enumerate_exp, exp_size};
pub use nbe::{nbe_normalize, Exhausted};
pub use reduce::{beta_normalize, beta_step, eta_step, normalize, subst_fun};

use crate::name::{Name, NameType};
use crate::sort::{Signature, Sort};
use crate::term::Term;

/// `var`, `exp`, the λ-term constructors, and the types, bindings and
/// contexts used by the typing relation.
pub fn lambda_signature() -> Signature {
    let mut sig = Signature::new();
    let var = sig.declare_name_type("var");
    let exp = sig.declare_data_type("exp");
    let ty = sig.declare_data_type("ty");
    let bnd = sig.declare_data_type("bnd");
    sig.declare_data_type("ctx");
    let decls: [(&str, Vec<Sort>, &str); 6] = [
        ("var", vec![Sort::Name(var.clone())], "exp"),
        ("lam", vec![Sort::abs(var.clone(), exp.clone())], "exp"),
        ("app", vec![exp.clone(), exp], "exp"),
        ("arr", vec![ty.clone(), ty.clone()], "ty"),
        ("pair", vec![Sort::Name(var), ty], "bnd"),
        ("cons", vec![bnd, Sort::data("ctx")], "ctx"),
    ];
    for (f, args, result) in decls {
        sig.declare_func(f, args, result).expect("fixed signature");
    }
    sig.declare_const("o", "ty").expect("fixed signature");
    sig.declare_const("nil", "ctx").expect("fixed signature");
    sig
}

pub fn var_type() -> NameType {
    NameType::new("var")
}

pub fn mk_var(a: &Name) -> Term {
    Term::app("var", vec![Term::name(a)])
}

pub fn mk_lam(a: &Name, body: Term) -> Term {
    Term::app("lam", vec![Term::abs(a.clone(), body)])
}

pub fn mk_app(m: Term, n: Term) -> Term {
    Term::app("app", vec![m, n])
}

/// A ground λ-term seen through its constructor.
#[derive(Clone, Copy, Debug)]
pub enum Exp<'a> {
    Var(&'a Name),
    Lam(&'a Name, &'a Term),
    App(&'a Term, &'a Term),
}

impl<'a> Exp<'a> {
    pub fn view(t: &'a Term) -> Option<Exp<'a>> {
        let Term::App(f, args) = t else { return None };
        match (&**f, args.as_slice()) {
            ("var", [Term::Name(a)]) => Some(Exp::Var(a)),
            ("lam", [Term::Abs(a, body)]) => Some(Exp::Lam(a, body)),
            ("app", [m, n]) => Some(Exp::App(m, n)),
            _ => None,
        }
    }
}
