use crate::name::Name;
use crate::term::Term;

use super::{mk_app, mk_lam, mk_var, Exp};

/// Variable occurrences plus binders; application nodes are free.
pub fn exp_size(t: &Term) -> usize {
    match Exp::view(t) {
        Some(Exp::Var(_)) => 1,
        Some(Exp::Lam(_, body)) => 1 + exp_size(body),
        Some(Exp::App(m, n)) => exp_size(m) + exp_size(n),
        None => 0,
    }
}

/// Every λ-term over `names` with size between 1 and `max_size`, smallest
/// first, in a fixed order.
pub fn enumerate_exp(names: &[Name], max_size: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new()];
    for s in 1..=max_size {
        let mut level = Vec::new();
        if s == 1 {
            level.extend(names.iter().map(mk_var));
        }
        for a in names {
            for body in &by_size[s - 1] {
                level.push(mk_lam(a, body.clone()));
            }
        }
        for l in 1..s {
            for m in &by_size[l] {
                for n in &by_size[s - l] {
                    level.push(mk_app(m.clone(), n.clone()));
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}
