//! Cross-corpus feature alignment with linear-kernel maximum mean discrepancy:
//! transfer component analysis and balanced distribution adaptation.

mod bda;
mod components;

pub use bda::{bda_fit, BdaFit};
pub use components::{tca_fit, AdaptationKind, LinearProjection};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::learners::column_means;
use crate::scalar::Real;

/// Squared distance between the row means of `a` and `b`.
pub fn mmd<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<T> {
    if a.nrows() == 0 || b.nrows() == 0 {
        return Err(Error::EmptyInput("mmd sample"));
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch { what: "mmd columns", expected: a.ncols(), found: b.ncols() });
    }
    Ok((column_means(a) - column_means(b)).norm_squared())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_unit_shift() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mmd(&a, &a).unwrap(), 0.0);
        let b = a.map(|v| v) + DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(mmd(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        let a = DMatrix::<f64>::zeros(0, 2);
        let b = DMatrix::<f64>::zeros(2, 2);
        assert!(mmd(&a, &b).is_err());
        assert!(mmd(&b, &DMatrix::zeros(2, 3)).is_err());
    }
}
