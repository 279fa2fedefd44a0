//! Nominal abstract syntax and nominal logic programming.

pub mod constraint;
pub mod engine;
pub mod error;
pub mod lambda;
pub mod name;
pub mod perm;
pub mod sort;
pub mod syntax;
pub mod term;

pub use constraint::{
    alpha_eq_open, apply_subst, fresh_open, solve_freshness, unify, unify_problem,
    FreshnessContext, Problem, Solution, Substitution, UnifyFailure,
};
pub use error::{NominalError, SortError};
pub use name::{Name, NameSupply, NameType};
pub use perm::{perm_apply, perm_compose, perm_disagreement, perm_inverse, Perm};
pub use sort::{well_sorted, Signature, Sort, SortContext};
pub use term::{alpha_eq_ground, fresh_ground, support, swap_term, AlphaKey, Symbol, Term, Var};
