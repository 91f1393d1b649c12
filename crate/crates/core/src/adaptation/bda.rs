use nalgebra::DMatrix;

use super::components::{mean_gap, transfer_components, AdaptationKind, LinearProjection};
use super::mmd;
use crate::error::{Error, Result};
use crate::learners::ClassifierModel;
use crate::scalar::Real;

/// Outcome of balanced distribution adaptation at the selected balance factor.
#[derive(Clone, Debug)]
pub struct BdaFit<T: Real> {
    pub projection: LinearProjection<T>,
    /// Classifier trained on the adapted source features.
    pub classifier: ClassifierModel<T>,
    /// Final target pseudo-labels.
    pub pseudo_labels: Vec<usize>,
    /// Marginal plus per-class MMD in the adapted space.
    pub objective: T,
    /// `(balance factor, objective)` for every grid value, in grid order.
    pub grid_objectives: Vec<(T, T)>,
}

fn rows_of_class(labels: &[usize], c: usize) -> Vec<usize> {
    labels.iter().enumerate().filter(|(_, &l)| l == c).map(|(i, _)| i).collect()
}

/// Sum of the marginal MMD and the MMD of every class present in both domains.
fn alignment_objective<T: Real>(
    zs: &DMatrix<T>,
    ys: &[usize],
    zt: &DMatrix<T>,
    pseudo: &[usize],
    n_classes: usize,
) -> Result<T> {
    let mut total = mmd(zs, zt)?;
    for c in 0..n_classes {
        let (s, t) = (rows_of_class(ys, c), rows_of_class(pseudo, c));
        if !s.is_empty() && !t.is_empty() {
            total += mmd(&zs.select_rows(s.iter()), &zt.select_rows(t.iter()))?;
        }
    }
    Ok(total)
}

/// `balance * g g' + (1 - balance) * sum_c g_c g_c'` with `g` the source-target
/// mean gap and `g_c` the per-class gap under the current pseudo-labels.
/// Classes with no pseudo-labeled target sample contribute nothing.
fn discrepancy<T: Real>(
    xs: &DMatrix<T>,
    ys: &[usize],
    xt: &DMatrix<T>,
    pseudo: &[usize],
    n_classes: usize,
    balance: T,
) -> DMatrix<T> {
    let gap = mean_gap(xs, xt);
    let mut m = &gap * gap.transpose() * balance;
    let conditional_weight = T::one() - balance;
    if conditional_weight > T::zero() {
        for c in 0..n_classes {
            let (s, t) = (rows_of_class(ys, c), rows_of_class(pseudo, c));
            if s.is_empty() || t.is_empty() {
                continue;
            }
            let g = mean_gap(&xs.select_rows(s.iter()), &xt.select_rows(t.iter()));
            m += &g * g.transpose() * conditional_weight;
        }
    }
    m
}

struct Run<T: Real> {
    projection: DMatrix<T>,
    classifier: ClassifierModel<T>,
    pseudo: Vec<usize>,
    objective: T,
}

#[allow(clippy::too_many_arguments)]
fn run_once<T, F>(
    xs: &DMatrix<T>,
    ys: &[usize],
    xt: &DMatrix<T>,
    n_classes: usize,
    d: usize,
    iterations: usize,
    balance: T,
    mu: T,
    factory: &F,
) -> Result<Run<T>>
where
    T: Real,
    F: Fn(&DMatrix<T>, &[usize]) -> Result<ClassifierModel<T>>,
{
    let mut pseudo = factory(xs, ys)?.predict_classes(xt)?;
    let mut last = None;
    for _ in 0..iterations {
        let m = discrepancy(xs, ys, xt, &pseudo, n_classes, balance);
        let w = transfer_components(xs, xt, &m, d, mu)?;
        let zs = xs * &w;
        let zt = xt * &w;
        let clf = factory(&zs, ys)?;
        pseudo = clf.predict_classes(&zt)?;
        last = Some((w, zs, zt, clf));
    }
    let (projection, zs, zt, classifier) = last.expect("at least one iteration");
    let objective = alignment_objective(&zs, ys, &zt, &pseudo, n_classes)?;
    Ok(Run { projection, classifier, pseudo, objective })
}

/// Balanced distribution adaptation with a linear kernel.
///
/// For each balance factor in the grid: pseudo-label the target with a
/// classifier trained on the source, then for `iterations` rounds solve for
/// the projection that aligns marginal and class-conditional means (weighted
/// by the balance factor), retrain on the adapted source and relabel the
/// target. The grid value with the lowest marginal + per-class MMD wins,
/// ties going to the earlier grid entry.
#[allow(clippy::too_many_arguments)]
pub fn bda_fit<T, F>(
    xs: &DMatrix<T>,
    ys: &[usize],
    n_classes: usize,
    xt: &DMatrix<T>,
    d: usize,
    iterations: usize,
    balance_grid: &[T],
    mu: T,
    classifier_factory: F,
) -> Result<BdaFit<T>>
where
    T: Real,
    F: Fn(&DMatrix<T>, &[usize]) -> Result<ClassifierModel<T>>,
{
    if ys.len() != xs.nrows() {
        return Err(Error::DimensionMismatch { what: "source labels", expected: xs.nrows(), found: ys.len() });
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("BDA needs at least one iteration".into()));
    }
    if balance_grid.is_empty() {
        return Err(Error::InvalidArgument("empty balance-factor grid".into()));
    }
    if let Some(b) = balance_grid.iter().find(|b| **b < T::zero() || **b > T::one()) {
        return Err(Error::InvalidArgument(format!("balance factor {b} outside [0, 1]")));
    }
    if let Some(c) = (0..n_classes).find(|&c| !ys.contains(&c)) {
        return Err(Error::InvalidArgument(format!("class {c} has no source samples")));
    }

    let mut best: Option<(T, Run<T>)> = None;
    let mut grid_objectives = Vec::with_capacity(balance_grid.len());
    for &balance in balance_grid {
        let run = run_once(xs, ys, xt, n_classes, d, iterations, balance, mu, &classifier_factory)?;
        grid_objectives.push((balance, run.objective));
        if best.as_ref().is_none_or(|(_, b)| run.objective < b.objective) {
            best = Some((balance, run));
        }
    }
    let (balance, run) = best.expect("grid is non-empty");
    Ok(BdaFit {
        projection: LinearProjection::new(run.projection, AdaptationKind::Bda, Some(balance)),
        classifier: run.classifier,
        pseudo_labels: run.pseudo,
        objective: run.objective,
        grid_objectives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptation::tca_fit;
    use crate::learners::fit_classifier;
    use crate::rng::SeededRng;

    fn blobs(rng: &mut SeededRng, n: usize, shift: f64) -> (DMatrix<f64>, Vec<usize>) {
        let centers = [[2.0, 0.0, 0.0, 0.0], [-2.0, 0.0, 0.0, 0.0], [0.0, 2.0, 0.0, 0.0]];
        let y: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let x = DMatrix::from_fn(n, 4, |i, j| centers[y[i]][j] + 0.6 * rng.normal() + if j == 2 { shift } else { 0.0 });
        (x, y)
    }

    fn factory(x: &DMatrix<f64>, y: &[usize]) -> Result<ClassifierModel<f64>> {
        fit_classifier(x, y, 3, 1.0)
    }

    #[test]
    fn marginal_only_single_iteration_equals_tca() {
        let mut rng = SeededRng::new(4);
        let (xs, ys) = blobs(&mut rng, 60, 0.0);
        let (xt, _) = blobs(&mut rng, 45, 3.0);
        let fit = bda_fit(&xs, &ys, 3, &xt, 2, 1, &[1.0], 1.0, factory).unwrap();
        let tca = tca_fit(&xs, &xt, 2, 1.0).unwrap();
        assert!((fit.projection.matrix() - tca.matrix()).amax() < 1e-9);
    }

    #[test]
    fn selected_factor_is_grid_minimum() {
        let mut rng = SeededRng::new(5);
        let (xs, ys) = blobs(&mut rng, 60, 0.0);
        let (xt, _) = blobs(&mut rng, 60, 2.5);
        let grid = [0.1, 0.5, 0.9];
        let fit = bda_fit(&xs, &ys, 3, &xt, 3, 3, &grid, 1.0, factory).unwrap();
        let chosen = fit.projection.balance_factor().unwrap();
        assert!(grid.contains(&chosen));
        let min = fit.grid_objectives.iter().map(|(_, o)| *o).fold(f64::INFINITY, f64::min);
        assert_eq!(fit.objective, min);
        assert_eq!(fit.projection.n_components(), 3);
    }

    #[test]
    fn missing_source_class() {
        let xs = DMatrix::from_row_slice(4, 1, &[0.0, 1.0, 2.0, 3.0]);
        let xt = xs.clone();
        let err = bda_fit(&xs, &[0, 0, 1, 1], 3, &xt, 1, 1, &[0.5], 1.0, factory);
        assert!(err.is_err());
    }
}
