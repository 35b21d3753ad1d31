//! LTL syntax, the textual grammar, and exact semantics on lasso words.

mod formula;
mod lasso;
mod oracle;
mod parser;

pub use formula::{Alphabet, Formula, LassoWord, Sample, Trace};
pub(crate) use formula::sample_from_bits;
pub use lasso::eval_lasso;
pub use oracle::{semantic_verdict_oracle, semantic_verdict_oracle_with_budget, DEFAULT_ORACLE_BUDGET};
pub use parser::{parse_formula, parse_formula_open};
