use nalgebra::DMatrix;

use super::distance::ctigs_distances;
use super::StrategyKind;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Per-pool-sample scores, aligned with the pool order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector<T: Real> {
    values: Vec<T>,
    higher_is_better: bool,
}

impl<T: Real> ScoreVector<T> {
    pub fn new(values: Vec<T>, higher_is_better: bool) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.finite()) {
            return Err(Error::Numerical(format!("non-finite score at pool position {i}")));
        }
        Ok(Self { values, higher_is_better })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn higher_is_better(&self) -> bool {
        self.higher_is_better
    }

    /// Position of the best score; ties go to the lowest position.
    pub fn best(&self) -> Result<usize> {
        if self.higher_is_better {
            argmax(&self.values)
        } else {
            argmin(&self.values)
        }
    }
}

pub fn argmax<T: Real>(values: &[T]) -> Result<usize> {
    extremum(values, |a, b| a > b)
}

pub fn argmin<T: Real>(values: &[T]) -> Result<usize> {
    extremum(values, |a, b| a < b)
}

fn extremum<T: Real>(values: &[T], better: impl Fn(T, T) -> bool) -> Result<usize> {
    let mut it = values.iter().copied().enumerate();
    let (mut best, mut best_val) = it.next().ok_or(Error::EmptyInput("pool"))?;
    for (i, v) in it {
        if better(v, best_val) {
            best = i;
            best_val = v;
        }
    }
    Ok(best)
}

/// Score inputs computed over the whole pool. Each strategy reads only the
/// fields it needs.
#[derive(Clone, Copy, Debug)]
pub struct SelectionInputs<'a, T: Real> {
    pub pool_len: usize,
    /// Cross-task inconsistency per sample.
    pub cti: Option<&'a [T]>,
    pub entropy: Option<&'a [T]>,
    pub confidence: Option<&'a [T]>,
    /// Greedy distance with the label product (class-restricted for CTiGS).
    pub distance: Option<&'a [T]>,
    /// Greedy distance with the Euclidean label term.
    pub modified_distance: Option<&'a [T]>,
    /// Confidence of the source-task classifier.
    pub source_confidence: Option<&'a [T]>,
}

impl<'a, T: Real> SelectionInputs<'a, T> {
    /// Inputs for a pool of `pool_len` samples with no scores attached yet.
    pub fn empty(pool_len: usize) -> Self {
        Self {
            pool_len,
            cti: None,
            entropy: None,
            confidence: None,
            distance: None,
            modified_distance: None,
            source_confidence: None,
        }
    }

    fn need(&self, field: Option<&'a [T]>, name: &str, kind: StrategyKind) -> Result<&'a [T]> {
        let v = field.ok_or_else(|| Error::InvalidArgument(format!("{kind} needs {name} scores")))?;
        if v.len() != self.pool_len {
            return Err(Error::DimensionMismatch { what: "pool scores", expected: self.pool_len, found: v.len() });
        }
        Ok(v)
    }
}

fn zip_with<T: Real>(a: &[T], b: &[T], f: impl Fn(T, T) -> T) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// The score vector a strategy maximizes (or minimizes); `None` for random sampling.
pub fn strategy_scores<T: Real>(kind: StrategyKind, inputs: &SelectionInputs<'_, T>) -> Result<Option<ScoreVector<T>>> {
    use StrategyKind::*;
    let scores = match kind {
        Rand => return Ok(None),
        NRCMapping => {
            return Err(Error::InvalidArgument("NRCMapping predicts directly and does not select samples".into()))
        }
        Ent => ScoreVector::new(inputs.need(inputs.entropy, "entropy", kind)?.to_vec(), true),
        LC => ScoreVector::new(inputs.need(inputs.confidence, "confidence", kind)?.to_vec(), false),
        SourceLC => ScoreVector::new(inputs.need(inputs.source_confidence, "source confidence", kind)?.to_vec(), false),
        CTIAL => ScoreVector::new(inputs.need(inputs.cti, "cti", kind)?.to_vec(), true),
        MTiGS | SourceMTiGS | CTiGS => ScoreVector::new(inputs.need(inputs.distance, "distance", kind)?.to_vec(), true),
        EntCTIAL => {
            let (i, h) = (inputs.need(inputs.cti, "cti", kind)?, inputs.need(inputs.entropy, "entropy", kind)?);
            ScoreVector::new(zip_with(i, h, |a, b| a * b), true)
        }
        LCCTIAL => {
            let (i, c) = (inputs.need(inputs.cti, "cti", kind)?, inputs.need(inputs.confidence, "confidence", kind)?);
            ScoreVector::new(zip_with(i, c, |a, b| a / b), true)
        }
        MTiGSCTIAL => {
            let i = inputs.need(inputs.cti, "cti", kind)?;
            let d = inputs.need(inputs.modified_distance, "modified distance", kind)?;
            ScoreVector::new(zip_with(i, d, |a, b| a * b), true)
        }
    }?;
    Ok(Some(scores))
}

/// Pool position chosen by `kind`. Random sampling draws `rng.below(pool_len)`.
pub fn select<T: Real>(kind: StrategyKind, inputs: &SelectionInputs<'_, T>, rng: &mut SeededRng) -> Result<usize> {
    if inputs.pool_len == 0 {
        return Err(Error::EmptyInput("pool"));
    }
    match strategy_scores(kind, inputs)? {
        None => Ok(rng.below(inputs.pool_len)),
        Some(scores) => scores.best(),
    }
}

/// Cross-task greedy sampling: the pool position with the largest
/// class-restricted greedy distance.
pub fn select_ctigs<T: Real>(
    pool_x: &DMatrix<T>,
    pool_pred: &DMatrix<T>,
    pool_classes: &[usize],
    labeled_x: &DMatrix<T>,
    labeled_y: &DMatrix<T>,
    labeled_classes: &[usize],
) -> Result<usize> {
    let d = ctigs_distances(pool_x, pool_pred, pool_classes, labeled_x, labeled_y, labeled_classes)?;
    argmax(&d)
}
