//! Experiment orchestration: synthetic data, the two active-learning loops,
//! suites of runs and their persisted results.

mod config;
mod context;
mod corpus;
mod loops;
mod suite;

pub use config::{AdaptationConfig, AdaptationMethod, DataSource, ExperimentConfig};
pub use context::{SourcePredictions, TransferContext};
pub use corpus::{generate_domain_pair, generate_synthetic_corpus, CorpusConfig, DIMENSION_NAMES, LABEL_SCALE, N_SESSIONS};
pub use loops::{run_cec_to_dee, run_curve, run_dee_to_cec, FitCounts, LearningCurve};
pub use suite::{
    curve_rows, load_datasets, read_rows, report, run_suite, summarize, write_rows, Comparison, CurveRow,
    MetricSummary, StrategyMeans, SuiteOutcome, Summary, CURVES_FILE, RUNS_DIR, SUMMARY_FILE,
};
