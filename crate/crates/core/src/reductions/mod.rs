//! Symbolic rewriting of linear combinations of basic invariants.

mod engine;
mod expr;
mod facts;
mod lemma4;

pub use engine::{
    default_budget, lemma4_rewrite, merge_reduce, reduce_fixpoint, reduce_fixpoint_with_stats,
    single_step, splice_reduce, ReduceStats, StepKind,
};
pub use expr::InvariantExpression;
pub use facts::CodeFacts;
pub use lemma4::{
    antisymmetrizer, integer_matrix, lemma4_relations, quartic_generators, Lemma4Rules,
};
