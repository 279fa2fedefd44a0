use thiserror::Error;

use crate::name::Name;
use crate::sort::Sort;

/// Failures of the ground judgments and the swapping action.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NominalError {
    #[error("cannot swap {0} and {1}: they have different name-types")]
    SwapTypeMismatch(Name, Name),
    #[error("open term `{0}`: use the constraint solver")]
    OpenTerm(String),
    #[error("sort mismatch between `{0}` and `{1}`")]
    SortMismatch(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("undeclared name {0}")]
    UndeclaredName(String),
    #[error("unknown name-type {0}")]
    UnknownNameType(String),
    #[error("unknown data type {0}")]
    UnknownDataType(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("symbol {0} is already declared")]
    DuplicateSymbol(String),
    #[error("{symbol} expects {expected} argument(s), got {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("expected sort {expected}, found {found} in `{term}`")]
    Mismatch {
        expected: Sort,
        found: Sort,
        term: String,
    },
    #[error("sort {0} cannot be the result of a function symbol")]
    NotDataSort(Sort),
    #[error("abstraction sort must bind a name-type, found {0}")]
    BadAbstraction(Sort),
}
