//! The total kernel language: terms, sorts, typing and evaluation.

mod eval;
mod syntax;
mod term;
mod typing;
mod value;

pub use eval::{
    eval, eval_counted, eval_with, EvalBudget, EvalError, Resource, DEFAULT_MAX_NAT_BITS, DEFAULT_MAX_STEPS,
};
pub use syntax::{parse, parse_value, pretty, ParseError};
pub use term::{Op, Sort, Term, Var};
pub use typing::{check_well_formed, infer_sort, Path, Signature, TypeError, TypedProgram};
pub use value::Value;
