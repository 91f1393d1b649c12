use nalgebra::{DMatrix, DVector};

use crate::data::LexiconMap;
use crate::error::{Error, Result};
use crate::scalar::Real;

const LOG_FLOOR: f64 = 1e-12;

/// Expected lexicon scores under the class probabilities: `sum_e p_e * NRC[e]`.
pub fn map_to_dimensional<T: Real>(probs: &[T], lexicon: &LexiconMap<T>) -> Result<DVector<T>> {
    if probs.len() != lexicon.n_classes() {
        return Err(Error::DimensionMismatch {
            what: "class probabilities",
            expected: lexicon.n_classes(),
            found: probs.len(),
        });
    }
    let rows = lexicon.rows();
    Ok(DVector::from_fn(rows.ncols(), |d, _| {
        probs.iter().enumerate().fold(T::zero(), |acc, (e, &p)| acc + p * rows[(e, d)])
    }))
}

/// Row-wise [`map_to_dimensional`] for an N x |E| probability matrix.
pub fn map_rows_to_dimensional<T: Real>(probs: &DMatrix<T>, lexicon: &LexiconMap<T>) -> Result<DMatrix<T>> {
    if probs.ncols() != lexicon.n_classes() {
        return Err(Error::DimensionMismatch {
            what: "class probabilities",
            expected: lexicon.n_classes(),
            found: probs.ncols(),
        });
    }
    Ok(probs * lexicon.rows())
}

/// Dimensional estimates of every sample straight from the lexicon, with no
/// training and no queries.
pub fn nrc_mapping_predict<T: Real>(probs: &DMatrix<T>, lexicon: &LexiconMap<T>) -> Result<DMatrix<T>> {
    map_rows_to_dimensional(probs, lexicon)
}

/// Euclidean distance between the regressor's estimate and the lexicon-mapped
/// classifier output.
pub fn cti<T: Real>(predicted: &[T], mapped: &[T]) -> Result<T> {
    if predicted.len() != mapped.len() {
        return Err(Error::DimensionMismatch { what: "dimensional vectors", expected: predicted.len(), found: mapped.len() });
    }
    Ok(predicted
        .iter()
        .zip(mapped)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
        .sqrt())
}

/// Shannon entropy in nats; probabilities are floored at 1e-12 before the log.
pub fn entropy<T: Real>(probs: &[T]) -> T {
    let floor = T::lit(LOG_FLOOR);
    -probs
        .iter()
        .filter(|&&p| p > T::zero())
        .fold(T::zero(), |acc, &p| acc + p * p.max(floor).ln())
}

pub fn confidence<T: Real>(probs: &[T]) -> T {
    probs.iter().copied().fold(T::zero(), |m, p| m.max(p))
}
