//! Nominal Horn clause programs: resolution, least models and formula evaluation.

mod formula;
mod model;
mod program;
mod solve;

pub use formula::{eval_formula, BoundKind, Formula, FormulaError, Truth};
pub use model::{ground_terms, least_model_enum, Bound, LeastModel};
pub use program::{freshen_clause, Atom, Goal, HornClause, Program, ProgramError};
pub use solve::{Answer, Answers, SolveOptions, Solver};
