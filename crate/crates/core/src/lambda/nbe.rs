use std::cell::{Cell, RefCell};
use std::rc::Rc;

use thiserror::Error;

use crate::name::{Name, NameSupply};
use crate::term::Term;

use super::{mk_app, mk_lam, mk_var, var_type, Exp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("evaluation ran out of fuel")]
pub struct Exhausted;

type Res<T> = Result<T, Exhausted>;
type Thunk = Rc<dyn Fn() -> Res<Sem>>;

#[derive(Clone)]
enum Sem {
    L(Rc<dyn Fn(Thunk) -> Res<Sem>>),
    N(Rc<Neu>),
}

enum Neu {
    V(Name),
    A(Rc<Neu>, Sem),
}

enum Env {
    Nil,
    Cons(Name, Thunk, Rc<Env>),
}

struct Ctx {
    fuel: Cell<usize>,
    supply: RefCell<NameSupply>,
}

impl Ctx {
    fn tick(&self) -> Res<()> {
        let f = self.fuel.get();
        if f == 0 {
            return Err(Exhausted);
        }
        self.fuel.set(f - 1);
        Ok(())
    }
}

fn evals(ctx: &Rc<Ctx>, env: &Rc<Env>, t: &Term) -> Res<Sem> {
    ctx.tick()?;
    match Exp::view(t) {
        Some(Exp::Var(y)) => {
            let mut cur = env.clone();
            loop {
                match &*cur {
                    Env::Nil => return Ok(Sem::N(Rc::new(Neu::V(y.clone())))),
                    Env::Cons(x, v, _) if x == y => return v(),
                    Env::Cons(_, _, rest) => cur = rest.clone(),
                }
            }
        }
        Some(Exp::Lam(x, body)) => {
            let (ctx2, env2, x, body) = (ctx.clone(), env.clone(), x.clone(), body.clone());
            Ok(Sem::L(Rc::new(move |v: Thunk| {
                let inner = Rc::new(Env::Cons(x.clone(), v, env2.clone()));
                evals(&ctx2, &inner, &body)
            })))
        }
        Some(Exp::App(t1, t2)) => {
            let arg = {
                let (ctx2, env2, t2) = (ctx.clone(), env.clone(), t2.clone());
                move || evals(&ctx2, &env2, &t2)
            };
            match evals(ctx, env, t1)? {
                Sem::L(f) => f(Rc::new(arg)),
                Sem::N(n) => Ok(Sem::N(Rc::new(Neu::A(n, arg()?)))),
            }
        }
        None => panic!("not a λ-term: {t}"),
    }
}

fn reify(ctx: &Rc<Ctx>, d: &Sem) -> Res<Term> {
    match d {
        Sem::L(f) => {
            let x = ctx.supply.borrow_mut().fresh(&var_type());
            let xv = x.clone();
            let body = f(Rc::new(move || Ok(Sem::N(Rc::new(Neu::V(xv.clone()))))))?;
            Ok(mk_lam(&x, reify(ctx, &body)?))
        }
        Sem::N(n) => reifyn(ctx, n),
    }
}

fn reifyn(ctx: &Rc<Ctx>, n: &Neu) -> Res<Term> {
    match n {
        Neu::V(x) => Ok(mk_var(x)),
        Neu::A(n, d) => Ok(mk_app(reifyn(ctx, n)?, reify(ctx, d)?)),
    }
}

/// Normalization by evaluation: interpret into functions, read back with a
/// fresh name per function value. Arguments are passed unevaluated.
///
/// `fuel` bounds the number of evaluation steps; divergent terms exhaust it.
pub fn nbe_normalize(supply: &mut NameSupply, t: &Term, fuel: usize) -> Result<Term, Exhausted> {
    for a in t.names() {
        supply.reserve_above(a.id());
    }
    let ctx = Rc::new(Ctx {
        fuel: Cell::new(fuel),
        supply: RefCell::new(supply.clone()),
    });
    let out = evals(&ctx, &Rc::new(Env::Nil), t).and_then(|d| reify(&ctx, &d));
    *supply = ctx.supply.borrow().clone();
    out
}
