use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{centered, check_cols, column_means};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdaptationKind {
    Tca,
    Bda,
}

/// Linear map from original features to adapted features (F x d).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProjection<T: Real> {
    matrix: DMatrix<T>,
    kind: AdaptationKind,
    balance_factor: Option<T>,
}

impl<T: Real> LinearProjection<T> {
    pub(crate) fn new(matrix: DMatrix<T>, kind: AdaptationKind, balance_factor: Option<T>) -> Self {
        Self { matrix, kind, balance_factor }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn kind(&self) -> AdaptationKind {
        self.kind
    }

    pub fn balance_factor(&self) -> Option<T> {
        self.balance_factor
    }

    pub fn n_components(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn project(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_cols(x, self.matrix.nrows())?;
        Ok(x * &self.matrix)
    }
}

pub(crate) fn mean_gap<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DVector<T> {
    column_means(a) - column_means(b)
}

/// Leading `d` solutions of `A w = lambda (M + mu I) w`, where `A` is the
/// scatter of the stacked samples and `M` the supplied discrepancy term.
/// Columns are scaled to unit norm and signed so that each column's
/// largest-magnitude entry is positive.
pub(crate) fn transfer_components<T: Real>(
    xs: &DMatrix<T>,
    xt: &DMatrix<T>,
    discrepancy: &DMatrix<T>,
    d: usize,
    mu: T,
) -> Result<DMatrix<T>> {
    let f = xs.ncols();
    if xs.nrows() == 0 || xt.nrows() == 0 {
        return Err(Error::EmptyInput("adaptation domain"));
    }
    if xt.ncols() != f {
        return Err(Error::DimensionMismatch { what: "target features", expected: f, found: xt.ncols() });
    }
    if !(mu > T::zero()) {
        return Err(Error::InvalidArgument(format!("regularizer mu must be positive, got {mu}")));
    }
    if d == 0 || d > f {
        return Err(Error::RankDeficient { requested: d, available: f });
    }
    let stacked = DMatrix::from_fn(xs.nrows() + xt.nrows(), f, |i, j| {
        if i < xs.nrows() {
            xs[(i, j)]
        } else {
            xt[(i - xs.nrows(), j)]
        }
    });
    let sc = centered(&stacked, &column_means(&stacked));
    let scatter = sc.transpose() * &sc;
    let mut constraint = discrepancy.clone();
    for i in 0..f {
        constraint[(i, i)] += mu;
    }
    let chol = constraint
        .cholesky()
        .ok_or_else(|| Error::Numerical("adaptation constraint is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let mut reduced = &l_inv * scatter * l_inv.transpose();
    reduced = (&reduced + reduced.transpose()) * T::lit(0.5);
    let eig = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..f).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let top = eig.eigenvalues[order[0]];
    let floor = top.max(T::zero()) * T::lit(1e-10);
    let available = order.iter().take_while(|&&i| eig.eigenvalues[i] > floor).count();
    if d > available {
        return Err(Error::RankDeficient { requested: d, available });
    }
    let chosen = eig.eigenvectors.select_columns(order[..d].iter());
    let mut w = l_inv.transpose() * chosen;
    for mut col in w.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
        let pivot = col.iter().copied().fold(T::zero(), |m, v| if v.magnitude() > m.magnitude() { v } else { m });
        if pivot < T::zero() {
            col.neg_mut();
        }
    }
    Ok(w)
}

/// Transfer component analysis with a linear kernel: keeps the directions of
/// largest stacked variance relative to the squared mean gap between the
/// domains plus `mu` times the squared norm.
pub fn tca_fit<T: Real>(xs: &DMatrix<T>, xt: &DMatrix<T>, d: usize, mu: T) -> Result<LinearProjection<T>> {
    if xs.nrows() == 0 || xt.nrows() == 0 {
        return Err(Error::EmptyInput("adaptation domain"));
    }
    if xs.ncols() != xt.ncols() {
        return Err(Error::DimensionMismatch { what: "target features", expected: xs.ncols(), found: xt.ncols() });
    }
    let gap = mean_gap(xs, xt);
    let discrepancy = &gap * gap.transpose();
    let w = transfer_components(xs, xt, &discrepancy, d, mu)?;
    Ok(LinearProjection::new(w, AdaptationKind::Tca, None))
}
