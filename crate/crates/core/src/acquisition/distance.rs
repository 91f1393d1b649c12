//! Greedy-sampling distances between unlabeled samples and the labeled set,
//! combining feature-space and label-space separation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

fn euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y)).sqrt()
}

/// Product over dimensions of absolute label differences.
fn label_product<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::one(), |acc, (&x, &y)| acc * (x - y).magnitude())
}

fn check_labeled<T: Real>(x_dim: usize, y_dim: usize, labeled_x: &DMatrix<T>, labeled_y: &DMatrix<T>) -> Result<()> {
    if labeled_x.nrows() == 0 {
        return Err(Error::EmptyInput("labeled set"));
    }
    if labeled_x.nrows() != labeled_y.nrows() {
        return Err(Error::DimensionMismatch { what: "labeled rows", expected: labeled_x.nrows(), found: labeled_y.nrows() });
    }
    if labeled_x.ncols() != x_dim {
        return Err(Error::DimensionMismatch { what: "feature columns", expected: x_dim, found: labeled_x.ncols() });
    }
    if labeled_y.ncols() != y_dim {
        return Err(Error::DimensionMismatch { what: "label columns", expected: y_dim, found: labeled_y.ncols() });
    }
    Ok(())
}

/// Column-major copies so that each sample is a contiguous slice.
struct Samples<T: Real> {
    x: DMatrix<T>,
    y: DMatrix<T>,
}

impl<T: Real> Samples<T> {
    fn new(x: &DMatrix<T>, y: &DMatrix<T>) -> Self {
        Self { x: x.transpose(), y: y.transpose() }
    }

    fn len(&self) -> usize {
        self.x.ncols()
    }

    fn x(&self, i: usize) -> &[T] {
        let f = self.x.nrows();
        &self.x.as_slice()[i * f..(i + 1) * f]
    }

    fn y(&self, i: usize) -> &[T] {
        let d = self.y.nrows();
        &self.y.as_slice()[i * d..(i + 1) * d]
    }
}

fn min_distance<T: Real>(
    x: &[T],
    pred: &[T],
    labeled: &Samples<T>,
    label_term: fn(&[T], &[T]) -> T,
    mut keep: impl FnMut(usize) -> bool,
) -> Option<T> {
    let mut best: Option<T> = None;
    for j in (0..labeled.len()).filter(|&j| keep(j)) {
        let d = euclidean(x, labeled.x(j)) * label_term(pred, labeled.y(j));
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
    }
    best
}

/// `min_j ||x - x_j|| * prod_d |pred_d - y_j,d|` over the labeled set.
pub fn mtigs_distance<T: Real>(x: &[T], pred: &[T], labeled_x: &DMatrix<T>, labeled_y: &DMatrix<T>) -> Result<T> {
    check_labeled(x.len(), pred.len(), labeled_x, labeled_y)?;
    let labeled = Samples::new(labeled_x, labeled_y);
    Ok(min_distance(x, pred, &labeled, label_product, |_| true).expect("labeled set is non-empty"))
}

/// `min_j ||x - x_j|| * ||pred - y_j||` over the labeled set.
pub fn mtigs_modified_distance<T: Real>(
    x: &[T],
    pred: &[T],
    labeled_x: &DMatrix<T>,
    labeled_y: &DMatrix<T>,
) -> Result<T> {
    check_labeled(x.len(), pred.len(), labeled_x, labeled_y)?;
    let labeled = Samples::new(labeled_x, labeled_y);
    Ok(min_distance(x, pred, &labeled, euclidean, |_| true).expect("labeled set is non-empty"))
}

fn pool_distances<T: Real>(
    pool_x: &DMatrix<T>,
    pool_pred: &DMatrix<T>,
    labeled_x: &DMatrix<T>,
    labeled_y: &DMatrix<T>,
    label_term: fn(&[T], &[T]) -> T,
) -> Result<Vec<T>> {
    check_labeled(pool_x.ncols(), pool_pred.ncols(), labeled_x, labeled_y)?;
    if pool_x.nrows() != pool_pred.nrows() {
        return Err(Error::DimensionMismatch { what: "pool predictions", expected: pool_x.nrows(), found: pool_pred.nrows() });
    }
    let pool = Samples::new(pool_x, pool_pred);
    let labeled = Samples::new(labeled_x, labeled_y);
    Ok((0..pool.len())
        .map(|i| min_distance(pool.x(i), pool.y(i), &labeled, label_term, |_| true).expect("non-empty"))
        .collect())
}

/// [`mtigs_distance`] for every pool row.
pub fn mtigs_distances<T: Real>(
    pool_x: &DMatrix<T>,
    pool_pred: &DMatrix<T>,
    labeled_x: &DMatrix<T>,
    labeled_y: &DMatrix<T>,
) -> Result<Vec<T>> {
    pool_distances(pool_x, pool_pred, labeled_x, labeled_y, label_product)
}

/// [`mtigs_modified_distance`] for every pool row.
pub fn mtigs_modified_distances<T: Real>(
    pool_x: &DMatrix<T>,
    pool_pred: &DMatrix<T>,
    labeled_x: &DMatrix<T>,
    labeled_y: &DMatrix<T>,
) -> Result<Vec<T>> {
    pool_distances(pool_x, pool_pred, labeled_x, labeled_y, euclidean)
}

/// Class-restricted [`mtigs_distance`]: each pool sample is compared only with
/// labeled samples that the source classifier assigns to the same category,
/// or with the whole labeled set when that category has no labeled member.
pub fn ctigs_distances<T: Real>(
    pool_x: &DMatrix<T>,
    pool_pred: &DMatrix<T>,
    pool_classes: &[usize],
    labeled_x: &DMatrix<T>,
    labeled_y: &DMatrix<T>,
    labeled_classes: &[usize],
) -> Result<Vec<T>> {
    check_labeled(pool_x.ncols(), pool_pred.ncols(), labeled_x, labeled_y)?;
    if pool_classes.len() != pool_x.nrows() || pool_pred.nrows() != pool_x.nrows() {
        return Err(Error::DimensionMismatch { what: "pool rows", expected: pool_x.nrows(), found: pool_classes.len() });
    }
    if labeled_classes.len() != labeled_x.nrows() {
        return Err(Error::DimensionMismatch {
            what: "labeled classes",
            expected: labeled_x.nrows(),
            found: labeled_classes.len(),
        });
    }
    let pool = Samples::new(pool_x, pool_pred);
    let labeled = Samples::new(labeled_x, labeled_y);
    Ok((0..pool.len())
        .map(|i| {
            let c = pool_classes[i];
            min_distance(pool.x(i), pool.y(i), &labeled, label_product, |j| labeled_classes[j] == c)
                .or_else(|| min_distance(pool.x(i), pool.y(i), &labeled, label_product, |_| true))
                .expect("non-empty")
        })
        .collect())
}
