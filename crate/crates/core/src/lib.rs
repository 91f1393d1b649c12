//! Cross-task inconsistency active learning between categorical emotion
//! classification and dimensional emotion estimation.

pub mod acquisition;
pub mod adaptation;
pub mod data;
pub mod error;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Dataset64 = data::Dataset<f64>;
pub type Dataset32 = data::Dataset<f32>;
pub type Lexicon64 = data::AffectiveNormLexicon<f64>;
pub type ClassifierModel64 = learners::ClassifierModel<f64>;
pub type ClassifierModel32 = learners::ClassifierModel<f32>;
pub type RegressorModel64 = learners::RegressorModel<f64>;
pub type RegressorModel32 = learners::RegressorModel<f32>;
pub type PcaProjection64 = learners::PcaProjection<f64>;
pub type LinearProjection64 = adaptation::LinearProjection<f64>;
