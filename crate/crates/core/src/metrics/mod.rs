//! Evaluation measures and paired significance testing.

mod eval;
mod stats;

pub use eval::{
    bca, cc, evaluate_classes, evaluate_dims, evaluate_hybrid_classes, evaluate_hybrid_dims, rmse,
    EvaluationReport,
};
pub use stats::{holm_adjust, wilcoxon_signed_rank, Alternative, WilcoxonOutcome, EXACT_MAX_N};
