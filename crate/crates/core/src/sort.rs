//! Sorts, signatures, sort contexts and the typing judgment for terms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::SortError;
use crate::name::{Name, NameType};
use crate::term::{Symbol, Term, Var};

/// `σ ::= ν | δ | ⟨ν⟩σ`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Name(NameType),
    Data(Symbol),
    Abs(NameType, Box<Sort>),
}

impl Sort {
    pub fn data(label: &str) -> Sort {
        Sort::Data(Arc::from(label))
    }

    pub fn name(label: &str) -> Sort {
        Sort::Name(NameType::new(label))
    }

    pub fn abs(ty: NameType, body: Sort) -> Sort {
        Sort::Abs(ty, Box::new(body))
    }

    pub fn is_data(&self) -> bool {
        matches!(self, Sort::Data(_))
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Name(ty) => write!(f, "{ty}"),
            Sort::Data(d) => f.write_str(d),
            Sort::Abs(ty, body) => write!(f, "<{ty}>{body}"),
        }
    }
}

/// A function symbol `f : σ1 × ... × σn → δ`; constants have no arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub args: Vec<Sort>,
    pub result: Symbol,
}

/// A language: name-types, data types, constants, function and relation symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    name_types: BTreeSet<NameType>,
    data_types: BTreeSet<Symbol>,
    funcs: BTreeMap<Symbol, FuncDecl>,
    preds: BTreeMap<Symbol, Vec<Sort>>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare_name_type(&mut self, label: &str) -> NameType {
        let ty = NameType::new(label);
        self.name_types.insert(ty.clone());
        ty
    }

    pub fn declare_data_type(&mut self, label: &str) -> Sort {
        self.data_types.insert(Arc::from(label));
        Sort::data(label)
    }

    pub fn declare_const(&mut self, name: &str, ty: &str) -> Result<(), SortError> {
        self.declare_func(name, Vec::new(), ty)
    }

    pub fn declare_func(
        &mut self,
        name: &str,
        args: Vec<Sort>,
        result: &str,
    ) -> Result<(), SortError> {
        if self.funcs.contains_key(name) || self.preds.contains_key(name) {
            return Err(SortError::DuplicateSymbol(name.to_string()));
        }
        if !self.data_types.contains(result) {
            return Err(SortError::UnknownDataType(result.to_string()));
        }
        for s in &args {
            self.check_sort(s)?;
        }
        self.funcs.insert(
            Arc::from(name),
            FuncDecl {
                args,
                result: Arc::from(result),
            },
        );
        Ok(())
    }

    pub fn declare_pred(&mut self, name: &str, args: Vec<Sort>) -> Result<(), SortError> {
        if self.funcs.contains_key(name) || self.preds.contains_key(name) {
            return Err(SortError::DuplicateSymbol(name.to_string()));
        }
        for s in &args {
            self.check_sort(s)?;
        }
        self.preds.insert(Arc::from(name), args);
        Ok(())
    }

    /// Checks that every name-type and data type in `sort` is declared.
    pub fn check_sort(&self, sort: &Sort) -> Result<(), SortError> {
        match sort {
            Sort::Name(ty) if self.name_types.contains(ty) => Ok(()),
            Sort::Name(ty) => Err(SortError::UnknownNameType(ty.to_string())),
            Sort::Data(d) if self.data_types.contains(d) => Ok(()),
            Sort::Data(d) => Err(SortError::UnknownDataType(d.to_string())),
            Sort::Abs(ty, body) => {
                self.check_sort(&Sort::Name(ty.clone()))?;
                self.check_sort(body)
            }
        }
    }

    pub fn has_name_type(&self, ty: &NameType) -> bool {
        self.name_types.contains(ty)
    }

    pub fn has_data_type(&self, d: &str) -> bool {
        self.data_types.contains(d)
    }

    pub fn name_types(&self) -> impl Iterator<Item = &NameType> {
        self.name_types.iter()
    }

    pub fn data_types(&self) -> impl Iterator<Item = &Symbol> {
        self.data_types.iter()
    }

    pub fn func(&self, name: &str) -> Option<&FuncDecl> {
        self.funcs.get(name)
    }

    pub fn funcs(&self) -> impl Iterator<Item = (&Symbol, &FuncDecl)> {
        self.funcs.iter()
    }

    pub fn pred(&self, name: &str) -> Option<&[Sort]> {
        self.preds.get(name).map(Vec::as_slice)
    }

    pub fn preds(&self) -> impl Iterator<Item = (&Symbol, &Vec<Sort>)> {
        self.preds.iter()
    }

    /// Whether values of `sort` can contain names of type `ty` at all.
    ///
    /// A name of type `ty` is fresh for every value of a sort that cannot.
    pub fn sort_may_contain(&self, sort: &Sort, ty: &NameType) -> bool {
        let mut seen = BTreeSet::new();
        self.may_contain(sort, ty, &mut seen)
    }

    fn may_contain(&self, sort: &Sort, ty: &NameType, seen: &mut BTreeSet<Symbol>) -> bool {
        match sort {
            Sort::Name(t) => t == ty,
            Sort::Abs(_, body) => self.may_contain(body, ty, seen),
            Sort::Data(d) => {
                if !seen.insert(d.clone()) {
                    return false;
                }
                self.funcs
                    .values()
                    .filter(|f| f.result == *d)
                    .any(|f| f.args.iter().any(|a| self.may_contain(a, ty, seen)))
            }
        }
    }
}

/// `Σ ::= · | Σ, x:σ | Σ#a:ν`
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SortContext {
    vars: Vec<Var>,
    names: Vec<(Name, bool)>,
}

impl SortContext {
    pub fn new() -> SortContext {
        SortContext::default()
    }

    /// A context declaring every variable and name that occurs in `terms`.
    pub fn covering<'a>(terms: impl IntoIterator<Item = &'a Term>) -> SortContext {
        let mut ctx = SortContext::new();
        for t in terms {
            for v in t.vars() {
                ctx.bind_var(v);
            }
            for n in t.names() {
                ctx.declare_name(n);
            }
        }
        ctx
    }

    pub fn bind_var(&mut self, v: Var) {
        if !self.vars.iter().any(|w| w.same_ident(&v)) {
            self.vars.push(v);
        }
    }

    pub fn declare_name(&mut self, a: Name) {
        if !self.names.iter().any(|(b, _)| *b == a) {
            self.names.push((a, false));
        }
    }

    /// `Σ#a`: `a` is distinct from all earlier names and fresh for all earlier variables.
    pub fn declare_fresh_name(&mut self, a: Name) {
        if !self.names.iter().any(|(b, _)| *b == a) {
            self.names.push((a, true));
        }
    }

    pub fn var_sort(&self, v: &Var) -> Option<&Sort> {
        self.vars.iter().find(|w| w.same_ident(v)).map(Var::sort)
    }

    pub fn has_name(&self, a: &Name) -> bool {
        self.names.iter().any(|(b, _)| b == a)
    }

    pub fn is_fresh_tagged(&self, a: &Name) -> bool {
        self.names.iter().any(|(b, fresh)| b == a && *fresh)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }
}

/// The typing judgment `Σ ⊢ t : σ`.
pub fn well_sorted(ctx: &SortContext, sig: &Signature, t: &Term) -> Result<Sort, SortError> {
    match t {
        Term::Name(a) => {
            if !sig.has_name_type(a.ty()) {
                return Err(SortError::UnknownNameType(a.ty().to_string()));
            }
            if !ctx.has_name(a) {
                return Err(SortError::UndeclaredName(a.to_string()));
            }
            Ok(Sort::Name(a.ty().clone()))
        }
        Term::Susp(perm, x) => {
            for (a, b) in perm.swaps() {
                for n in [a, b] {
                    well_sorted(ctx, sig, &Term::Name(n.clone()))?;
                }
            }
            match ctx.var_sort(x) {
                Some(s) if s == x.sort() => Ok(s.clone()),
                Some(s) => Err(SortError::Mismatch {
                    expected: s.clone(),
                    found: x.sort().clone(),
                    term: x.to_string(),
                }),
                None => Err(SortError::UnboundVariable(x.to_string())),
            }
        }
        Term::Const(c) => {
            let decl = sig
                .func(c)
                .ok_or_else(|| SortError::UnknownSymbol(c.to_string()))?;
            if !decl.args.is_empty() {
                return Err(SortError::Arity {
                    symbol: c.to_string(),
                    expected: decl.args.len(),
                    found: 0,
                });
            }
            Ok(Sort::Data(decl.result.clone()))
        }
        Term::App(f, args) => {
            let decl = sig
                .func(f)
                .ok_or_else(|| SortError::UnknownSymbol(f.to_string()))?;
            check_args(ctx, sig, f, &decl.args, args)?;
            Ok(Sort::Data(decl.result.clone()))
        }
        Term::Abs(a, body) => {
            well_sorted(ctx, sig, &Term::Name(a.clone()))?;
            let body_sort = well_sorted(ctx, sig, body)?;
            Ok(Sort::abs(a.ty().clone(), body_sort))
        }
    }
}

/// Checks an argument list against declared sorts (shared by terms and atoms).
pub fn check_args(
    ctx: &SortContext,
    sig: &Signature,
    symbol: &str,
    expected: &[Sort],
    args: &[Term],
) -> Result<(), SortError> {
    if expected.len() != args.len() {
        return Err(SortError::Arity {
            symbol: symbol.to_string(),
            expected: expected.len(),
            found: args.len(),
        });
    }
    for (want, arg) in expected.iter().zip(args) {
        let got = well_sorted(ctx, sig, arg)?;
        if got != *want {
            return Err(SortError::Mismatch {
                expected: want.clone(),
                found: got,
                term: arg.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::name::NameSupply;

    fn lambda_sig() -> (Signature, NameType) {
        let mut sig = Signature::new();
        let var = sig.declare_name_type("var");
        sig.declare_data_type("exp");
        sig.declare_func("var", vec![Sort::Name(var.clone())], "exp")
            .unwrap();
        sig.declare_func("app", vec![Sort::data("exp"), Sort::data("exp")], "exp")
            .unwrap();
        sig.declare_func(
            "lam",
            vec![Sort::abs(var.clone(), Sort::data("exp"))],
            "exp",
        )
        .unwrap();
        (sig, var)
    }

    #[test]
    fn var_and_lam_have_sort_exp() {
        let (sig, var) = lambda_sig();
        let mut supply = NameSupply::new();
        let a = supply.declare(&var, "a");
        let va = Term::app("var", vec![Term::Name(a.clone())]);
        let ctx = SortContext::covering([&va]);
        assert_eq!(well_sorted(&ctx, &sig, &va).unwrap(), Sort::data("exp"));
        let id = Term::app("lam", vec![Term::abs(a.clone(), va.clone())]);
        assert_eq!(well_sorted(&ctx, &sig, &id).unwrap(), Sort::data("exp"));
        let abs = Term::abs(a, va);
        assert_eq!(
            well_sorted(&ctx, &sig, &abs).unwrap(),
            Sort::abs(var, Sort::data("exp"))
        );
    }

    #[test]
    fn app_is_binary() {
        let (sig, var) = lambda_sig();
        let mut supply = NameSupply::new();
        let a = supply.declare(&var, "a");
        let bad = Term::app("app", vec![Term::app("var", vec![Term::Name(a)])]);
        let ctx = SortContext::covering([&bad]);
        assert!(matches!(
            well_sorted(&ctx, &sig, &bad),
            Err(SortError::Arity {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn unbound_variables_and_names_are_reported() {
        let (sig, var) = lambda_sig();
        let x = Var::new("X", Sort::data("exp"));
        let t = Term::var(x);
        assert!(matches!(
            well_sorted(&SortContext::new(), &sig, &t),
            Err(SortError::UnboundVariable(_))
        ));
        let a = NameSupply::new().declare(&var, "a");
        assert!(matches!(
            well_sorted(&SortContext::new(), &sig, &Term::Name(a)),
            Err(SortError::UndeclaredName(_))
        ));
    }

    #[test]
    fn result_sorts_must_be_data() {
        let (mut sig, _) = lambda_sig();
        assert!(sig.declare_func("bad", vec![], "var").is_err());
        assert!(sig.declare_func("var", vec![], "exp").is_err());
    }

    #[test]
    fn name_free_sorts() {
        let (mut sig, var) = lambda_sig();
        sig.declare_data_type("ty");
        sig.declare_const("o", "ty").unwrap();
        sig.declare_func("arr", vec![Sort::data("ty"), Sort::data("ty")], "ty")
            .unwrap();
        assert!(sig.sort_may_contain(&Sort::data("exp"), &var));
        assert!(!sig.sort_may_contain(&Sort::data("ty"), &var));
    }
}
