//! Base models for both tasks: multinomial logistic regression, multi-output
//! ridge regression and PCA, plus cross-validated regularization selection.

mod classifier;
mod cv;
mod optim;
mod pca;
mod regressor;

pub use classifier::{classifier_objective, fit_classifier, ClassifierModel};
pub use cv::{select_regularization, TaskLabels, DEFAULT_REG_GRID};
pub use optim::{minimize_lbfgs, LbfgsOptions, OptimOutcome};
pub use pca::{fit_pca, fit_pca_components, PcaProjection};
pub use regressor::{fit_regressor, RegressorModel};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn column_means<T: Real>(x: &DMatrix<T>) -> DVector<T> {
    let n = T::from_count(x.nrows().max(1));
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

pub(crate) fn centered<T: Real>(x: &DMatrix<T>, mean: &DVector<T>) -> DMatrix<T> {
    let mut out = x.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.add_scalar_mut(-mean[j]);
    }
    out
}

pub(crate) fn check_cols<T: Real>(x: &DMatrix<T>, expected: usize) -> Result<()> {
    if x.ncols() != expected {
        return Err(Error::DimensionMismatch {
            what: "feature columns",
            expected,
            found: x.ncols(),
        });
    }
    Ok(())
}
