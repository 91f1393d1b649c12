use nalgebra::DMatrix;

use super::{fit_classifier, fit_regressor};
use crate::error::{Error, Result};
use crate::metrics::{bca, rmse};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Candidate regularization weights (`1/C` for the classifier, `alpha` for ridge).
pub const DEFAULT_REG_GRID: [f64; 8] = [1.0, 5.0, 10.0, 50.0, 1e2, 5e2, 1e3, 5e3];

#[derive(Clone, Copy, Debug)]
pub enum TaskLabels<'a, T: Real> {
    /// Class indices and the size of the emotion set.
    Categorical { classes: &'a [usize], n_classes: usize },
    /// N x |D| dimensional scores.
    Dimensional(&'a DMatrix<T>),
}

impl<T: Real> TaskLabels<'_, T> {
    fn len(&self) -> usize {
        match self {
            TaskLabels::Categorical { classes, .. } => classes.len(),
            TaskLabels::Dimensional(y) => y.nrows(),
        }
    }
}

/// Fold id per row. Stratified round-robin over shuffled per-class index
/// lists for classification; contiguous chunks of one shuffled order for
/// regression.
fn assign_folds<T: Real>(labels: &TaskLabels<'_, T>, folds: usize, rng: &mut SeededRng) -> Vec<usize> {
    let n = labels.len();
    let mut fold_of = vec![0; n];
    match labels {
        TaskLabels::Categorical { classes, n_classes } => {
            let mut counter = 0;
            for c in 0..*n_classes {
                let mut members: Vec<usize> = (0..n).filter(|&i| classes[i] == c).collect();
                rng.shuffle(&mut members);
                for i in members {
                    fold_of[i] = counter % folds;
                    counter += 1;
                }
            }
        }
        TaskLabels::Dimensional(_) => {
            let mut order: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut order);
            for (pos, i) in order.into_iter().enumerate() {
                fold_of[i] = pos * folds / n;
            }
        }
    }
    fold_of
}

/// Picks the grid value with the best mean k-fold score: highest balanced
/// accuracy for classification, lowest dimension-averaged RMSE for
/// regression. Ties go to the smaller value.
pub fn select_regularization<T: Real>(
    x: &DMatrix<T>,
    labels: TaskLabels<'_, T>,
    grid: &[T],
    folds: usize,
    seed: u64,
) -> Result<T> {
    let mut grid: Vec<T> = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    grid.dedup();
    match grid.as_slice() {
        [] => return Err(Error::InvalidArgument("empty regularization grid".into())),
        [only] => return Ok(*only),
        _ => {}
    }
    if grid.iter().any(|g| !(*g > T::zero())) {
        return Err(Error::InvalidArgument("regularization grid values must be positive".into()));
    }
    let n = labels.len();
    if n != x.nrows() {
        return Err(Error::DimensionMismatch { what: "cross-validation labels", expected: x.nrows(), found: n });
    }
    if folds < 2 || n < folds {
        return Err(Error::TooFewSamples(format!("{n} rows for {folds} folds")));
    }

    let mut rng = SeededRng::new(seed);
    let fold_of = assign_folds(&labels, folds, &mut rng);
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| (0..n).partition(|&i| fold_of[i] != f))
        .collect();
    for (train, test) in &splits {
        if test.is_empty() || train.is_empty() {
            return Err(Error::TooFewSamples("a fold is empty".into()));
        }
        if let TaskLabels::Categorical { classes, .. } = labels {
            let first = classes[train[0]];
            if train.iter().all(|&i| classes[i] == first) {
                return Err(Error::TooFewSamples("a training fold holds a single class".into()));
            }
        }
    }

    let mut best: Option<(T, T)> = None;
    for &value in &grid {
        let mut total = T::zero();
        for (train, test) in &splits {
            let xtr = x.select_rows(train.iter());
            let xte = x.select_rows(test.iter());
            let score = match labels {
                TaskLabels::Categorical { classes, n_classes } => {
                    let ytr: Vec<usize> = train.iter().map(|&i| classes[i]).collect();
                    let yte: Vec<usize> = test.iter().map(|&i| classes[i]).collect();
                    let model = fit_classifier(&xtr, &ytr, n_classes, T::one() / value)?;
                    // negate so that lower is better for both tasks
                    -bca::<T>(&yte, &model.predict_classes(&xte)?)?
                }
                TaskLabels::Dimensional(y) => {
                    let model = fit_regressor(&xtr, &y.select_rows(train.iter()), value)?;
                    let pred = model.predict(&xte)?;
                    let truth = y.select_rows(test.iter());
                    let mut acc = T::zero();
                    for d in 0..truth.ncols() {
                        let t: Vec<T> = truth.column(d).iter().copied().collect();
                        let p: Vec<T> = pred.column(d).iter().copied().collect();
                        acc += rmse(&t, &p)?;
                    }
                    acc / T::from_count(truth.ncols())
                }
            };
            total += score;
        }
        let mean = total / T::from_count(folds);
        if best.is_none_or(|(_, s)| mean < s) {
            best = Some((value, mean));
        }
    }
    Ok(best.expect("grid is non-empty").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_dee(seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut rng = SeededRng::new(seed);
        let x = DMatrix::from_fn(60, 4, |_, _| rng.normal());
        let w = DMatrix::from_fn(4, 3, |_, _| rng.normal());
        (x.clone(), x * w)
    }

    #[test]
    fn singleton_grid() {
        let x = DMatrix::<f64>::zeros(1, 1);
        let y = DMatrix::<f64>::zeros(1, 1);
        assert_eq!(select_regularization(&x, TaskLabels::Dimensional(&y), &[7.0], 3, 0).unwrap(), 7.0);
    }

    #[test]
    fn noiseless_linear_prefers_least_shrinkage() {
        let (x, y) = linear_dee(1);
        let grid: Vec<f64> = DEFAULT_REG_GRID.to_vec();
        assert_eq!(select_regularization(&x, TaskLabels::Dimensional(&y), &grid, 3, 4).unwrap(), 1.0);
    }

    #[test]
    fn ties_pick_smaller_value() {
        // constant targets: every penalty predicts the training mean exactly
        let (x, _) = linear_dee(2);
        let y = DMatrix::from_element(60, 2, 3.0);
        let v = select_regularization(&x, TaskLabels::Dimensional(&y), &[50.0, 5.0, 500.0], 3, 0).unwrap();
        assert_eq!(v, 5.0);
    }

    #[test]
    fn too_few_rows() {
        let x = DMatrix::<f64>::zeros(2, 1);
        let y = DMatrix::<f64>::zeros(2, 1);
        assert!(matches!(
            select_regularization(&x, TaskLabels::Dimensional(&y), &[1.0, 2.0], 3, 0),
            Err(Error::TooFewSamples(_))
        ));
    }

    #[test]
    fn categorical_selection_runs_and_is_deterministic() {
        let mut rng = SeededRng::new(8);
        let classes: Vec<usize> = (0..45).map(|i| i % 3).collect();
        let x = DMatrix::from_fn(45, 2, |i, j| classes[i] as f64 * (j as f64 + 1.0) + 0.8 * rng.normal());
        let labels = TaskLabels::Categorical { classes: &classes, n_classes: 3 };
        let a = select_regularization(&x, labels, &DEFAULT_REG_GRID, 3, 11).unwrap();
        let b = select_regularization(&x, labels, &DEFAULT_REG_GRID, 3, 11).unwrap();
        assert_eq!(a, b);
        assert!(DEFAULT_REG_GRID.contains(&a));
    }

    #[test]
    fn stratified_folds_balance_classes() {
        let classes: Vec<usize> = (0..30).map(|i| i % 2).collect();
        let labels = TaskLabels::<f64>::Categorical { classes: &classes, n_classes: 2 };
        let folds = assign_folds(&labels, 3, &mut SeededRng::new(0));
        for f in 0..3 {
            for c in 0..2 {
                let count = (0..30).filter(|&i| folds[i] == f && classes[i] == c).count();
                assert_eq!(count, 5);
            }
        }
    }
}
