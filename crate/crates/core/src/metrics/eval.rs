use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Metrics of one evaluation. Classification fills `bca`; regression fills
/// `rmse` and `cc` per dimension. A `None` correlation means it is undefined
/// because one of the series has zero variance.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationReport<T: Real> {
    pub bca: Option<T>,
    pub rmse: Option<Vec<T>>,
    pub cc: Option<Vec<Option<T>>>,
}

impl<T: Real> EvaluationReport<T> {
    pub fn rmse_mean(&self) -> Option<T> {
        let r = self.rmse.as_ref()?;
        if r.is_empty() {
            return None;
        }
        Some(r.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(r.len()))
    }

    /// Mean over the dimensions whose correlation is defined.
    pub fn cc_mean(&self) -> Option<T> {
        let defined: Vec<T> = self.cc.as_ref()?.iter().flatten().copied().collect();
        if defined.is_empty() {
            return None;
        }
        Some(defined.iter().fold(T::zero(), |a, &b| a + b) / T::from_count(defined.len()))
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { what: "paired series", expected: a, found: b });
    }
    Ok(())
}

/// Balanced classification accuracy: unweighted mean of per-class recall over
/// the classes present in `truth`.
pub fn bca<T: Real>(truth: &[usize], pred: &[usize]) -> Result<T> {
    same_len(truth.len(), pred.len())?;
    if truth.is_empty() {
        return Err(Error::EmptyInput("balanced accuracy"));
    }
    let n_classes = truth.iter().max().map_or(0, |m| m + 1);
    let mut hits = vec![0usize; n_classes];
    let mut totals = vec![0usize; n_classes];
    for (&t, &p) in truth.iter().zip(pred) {
        totals[t] += 1;
        if t == p {
            hits[t] += 1;
        }
    }
    let mut sum = T::zero();
    let mut observed = 0;
    for (h, t) in hits.iter().zip(&totals).filter(|(_, &t)| t > 0) {
        sum += T::from_count(*h) / T::from_count(*t);
        observed += 1;
    }
    Ok(sum / T::from_count(observed))
}

pub fn rmse<T: Real>(truth: &[T], pred: &[T]) -> Result<T> {
    same_len(truth.len(), pred.len())?;
    if truth.is_empty() {
        return Err(Error::EmptyInput("rmse"));
    }
    let sse = truth.iter().zip(pred).fold(T::zero(), |acc, (&t, &p)| acc + (t - p) * (t - p));
    Ok((sse / T::from_count(truth.len())).sqrt())
}

/// Pearson correlation; `None` when either series is constant.
pub fn cc<T: Real>(truth: &[T], pred: &[T]) -> Result<Option<T>> {
    same_len(truth.len(), pred.len())?;
    if truth.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least two points".into()));
    }
    let n = T::from_count(truth.len());
    let mt = truth.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mp = pred.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut stp, mut stt, mut spp) = (T::zero(), T::zero(), T::zero());
    for (&t, &p) in truth.iter().zip(pred) {
        let (dt, dp) = (t - mt, p - mp);
        stp += dt * dp;
        stt += dt * dt;
        spp += dp * dp;
    }
    if stt == T::zero() || spp == T::zero() {
        return Ok(None);
    }
    Ok(Some((stp / (stt * spp).sqrt()).clamp(-T::one(), T::one())))
}

pub fn evaluate_classes<T: Real>(truth: &[usize], pred: &[usize]) -> Result<EvaluationReport<T>> {
    Ok(EvaluationReport { bca: Some(bca(truth, pred)?), rmse: None, cc: None })
}

pub fn evaluate_dims<T: Real>(truth: &DMatrix<T>, pred: &DMatrix<T>) -> Result<EvaluationReport<T>> {
    if truth.shape() != pred.shape() {
        return Err(Error::DimensionMismatch { what: "prediction rows", expected: truth.nrows(), found: pred.nrows() });
    }
    let mut r = Vec::with_capacity(truth.ncols());
    let mut c = Vec::with_capacity(truth.ncols());
    for d in 0..truth.ncols() {
        let t: Vec<T> = truth.column(d).iter().copied().collect();
        let p: Vec<T> = pred.column(d).iter().copied().collect();
        r.push(rmse(&t, &p)?);
        c.push(if t.len() >= 2 { cc(&t, &p)? } else { None });
    }
    Ok(EvaluationReport { bca: None, rmse: Some(r), cc: Some(c) })
}

fn check_partition(n: usize, labeled: &[usize], pool: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in labeled.iter().chain(pool) {
        if i >= n || seen[i] {
            return Err(Error::InvalidArgument(format!("index {i} out of range or listed twice")));
        }
        seen[i] = true;
    }
    if let Some(gap) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidArgument(format!("index {gap} neither labeled nor in the pool")));
    }
    Ok(())
}

/// Metrics over the whole target set: labeled samples contribute their
/// ground truth as the prediction, pool samples the model's prediction.
pub fn evaluate_hybrid_classes<T: Real>(
    truth: &[usize],
    labeled: &[usize],
    pool: &[usize],
    pool_pred: &[usize],
) -> Result<EvaluationReport<T>> {
    check_partition(truth.len(), labeled, pool)?;
    same_len(pool.len(), pool_pred.len())?;
    let all_truth: Vec<usize> = labeled.iter().chain(pool).map(|&i| truth[i]).collect();
    let all_pred: Vec<usize> = labeled.iter().map(|&i| truth[i]).chain(pool_pred.iter().copied()).collect();
    evaluate_classes(&all_truth, &all_pred)
}

/// Regression counterpart of [`evaluate_hybrid_classes`]; `pool_pred` has one
/// row per pool entry.
pub fn evaluate_hybrid_dims<T: Real>(
    truth: &DMatrix<T>,
    labeled: &[usize],
    pool: &[usize],
    pool_pred: &DMatrix<T>,
) -> Result<EvaluationReport<T>> {
    check_partition(truth.nrows(), labeled, pool)?;
    same_len(pool.len(), pool_pred.nrows())?;
    let order: Vec<usize> = labeled.iter().chain(pool).copied().collect();
    let all_truth = truth.select_rows(order.iter());
    let mut all_pred = all_truth.clone();
    for (k, row) in pool_pred.row_iter().enumerate() {
        all_pred.row_mut(labeled.len() + k).copy_from(&row);
    }
    evaluate_dims(&all_truth, &all_pred)
}
