//! Two-sorted formulas: syntax, normal form, satisfaction and the flow classes.

mod ast;
mod classify;
mod eval;
mod normal;
mod parse;
mod random;
mod sentences;

pub use ast::{alpha_eq, free_variables, print_formula, rename_free, Formula, FreeVars, Sort};
pub use classify::{classify, is_member, FormulaClass};
pub use eval::{evaluate, Assignment, Compiled, TruthTable, Tuples, DEFAULT_ARITY_BUDGET};
pub(crate) use eval::tuple_count;
pub use normal::{expand_incon, is_normalized, normalize};
pub use parse::parse_formula;
pub use random::random_formula;
pub use sentences::{
    build_absolute_closure_sentence, build_absolute_closure_sentence_with_budget, build_compactness_sentence,
    build_compactness_sentence_with_budget, build_density_sentence, connectedness_sentence, not_separated_sentence,
    DEFAULT_SENTENCE_BUDGET,
};
