//! Datasets, label encodings, the affective-norm lexicon, pool bookkeeping and
//! file I/O.

mod dataset;
mod io;
mod lexicon;
mod pool;

pub use dataset::Dataset;
pub use io::{load_dataset, write_dataset, DatasetFiles, LabelSchema};
pub use lexicon::{AffectiveNormLexicon, LexiconMap};
pub use pool::PoolState;
