//! Sample-selection strategies: cross-task inconsistency and its combinations
//! with uncertainty and greedy-sampling diversity, plus the baselines.

mod distance;
mod scores;
mod select;
mod strategy;

pub use distance::{ctigs_distances, mtigs_distance, mtigs_distances, mtigs_modified_distance, mtigs_modified_distances};
pub use scores::{confidence, cti, entropy, map_to_dimensional, map_rows_to_dimensional, nrc_mapping_predict};
pub use select::{argmax, argmin, select, select_ctigs, strategy_scores, ScoreVector, SelectionInputs};
pub use strategy::{StrategyKind, TransferDirection};
