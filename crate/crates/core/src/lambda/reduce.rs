use crate::name::Name;
use crate::name::NameSupply;
use crate::term::{fresh_ground, Term};

use super::{mk_app, mk_lam, Exp};

/// `M{a := N}`, renaming a binder only when it is `a` itself or not fresh for `N`.
///
/// Terms outside the λ-signature are returned unchanged.
pub fn subst_fun(supply: &mut NameSupply, m: &Term, a: &Name, n: &Term) -> Term {
    match Exp::view(m) {
        Some(Exp::Var(b)) if b == a => n.clone(),
        Some(Exp::Var(_)) | None => m.clone(),
        Some(Exp::App(m1, m2)) => mk_app(subst_fun(supply, m1, a, n), subst_fun(supply, m2, a, n)),
        Some(Exp::Lam(b, body)) => {
            if b != a && fresh_ground(b, n).unwrap_or(false) {
                mk_lam(b, subst_fun(supply, body, a, n))
            } else {
                let c = supply.fresh_name(b.ty(), [m, n]);
                let renamed = body.swap_unchecked(b, &c);
                mk_lam(&c, subst_fun(supply, &renamed, a, n))
            }
        }
    }
}

/// Contracts the leftmost-outermost β-redex.
pub fn beta_step(supply: &mut NameSupply, t: &Term) -> Option<Term> {
    match Exp::view(t)? {
        Exp::Var(_) => None,
        Exp::Lam(a, body) => Some(mk_lam(a, beta_step(supply, body)?)),
        Exp::App(f, arg) => {
            if let Some(Exp::Lam(a, body)) = Exp::view(f) {
                return Some(subst_fun(supply, body, a, arg));
            }
            if let Some(f2) = beta_step(supply, f) {
                return Some(mk_app(f2, arg.clone()));
            }
            Some(mk_app(f.clone(), beta_step(supply, arg)?))
        }
    }
}

/// Contracts the leftmost-outermost η-redex `lam(<a>app(M, var(a)))` with `a # M`.
pub fn eta_step(t: &Term) -> Option<Term> {
    match Exp::view(t)? {
        Exp::Var(_) => None,
        Exp::Lam(a, body) => {
            if let Some(Exp::App(m, x)) = Exp::view(body) {
                if matches!(Exp::view(x), Some(Exp::Var(b)) if b == a)
                    && fresh_ground(a, m).unwrap_or(false)
                {
                    return Some(m.clone());
                }
            }
            Some(mk_lam(a, eta_step(body)?))
        }
        Exp::App(f, arg) => match eta_step(f) {
            Some(f2) => Some(mk_app(f2, arg.clone())),
            None => Some(mk_app(f.clone(), eta_step(arg)?)),
        },
    }
}

/// β-steps until none applies, then η-steps, within `fuel` steps in total.
/// `None` means the fuel ran out.
pub fn normalize(supply: &mut NameSupply, t: &Term, fuel: usize) -> Option<Term> {
    run(supply, t, fuel, true)
}

/// Like [`normalize`] without η.
pub fn beta_normalize(supply: &mut NameSupply, t: &Term, fuel: usize) -> Option<Term> {
    run(supply, t, fuel, false)
}

fn run(supply: &mut NameSupply, t: &Term, mut fuel: usize, eta: bool) -> Option<Term> {
    let mut cur = t.clone();
    loop {
        let next = beta_step(supply, &cur).or_else(|| if eta { eta_step(&cur) } else { None });
        match next {
            None => return Some(cur),
            Some(_) if fuel == 0 => return None,
            Some(n) => {
                fuel -= 1;
                cur = n;
            }
        }
    }
}
