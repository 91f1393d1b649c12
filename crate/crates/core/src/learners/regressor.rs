use nalgebra::{DMatrix, DVector};

use super::{centered, check_cols, column_means};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Multi-output ridge regression; each output column is an independent ridge
/// problem sharing the same penalty.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressorModel<T: Real> {
    weights: DMatrix<T>,
    bias: DVector<T>,
    alpha: T,
}

impl<T: Real> RegressorModel<T> {
    pub fn weights(&self) -> &DMatrix<T> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<T> {
        &self.bias
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn predict(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_cols(x, self.weights.nrows())?;
        let mut out = x * &self.weights;
        for mut row in out.row_iter_mut() {
            row += self.bias.transpose();
        }
        Ok(out)
    }
}

/// Closed form on centered data: `(Xc'Xc + alpha I) W = Xc'Yc`, bias from the means.
pub fn fit_regressor<T: Real>(x: &DMatrix<T>, y: &DMatrix<T>, alpha: T) -> Result<RegressorModel<T>> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch { what: "regression targets", expected: x.nrows(), found: y.nrows() });
    }
    if x.nrows() == 0 {
        return Err(Error::EmptyInput("regression training set"));
    }
    if !(alpha > T::zero()) {
        return Err(Error::InvalidArgument(format!("ridge penalty must be positive, got {alpha}")));
    }
    let x_mean = column_means(x);
    let y_mean = column_means(y);
    let xc = centered(x, &x_mean);
    let yc = centered(y, &y_mean);
    let mut gram = xc.transpose() * &xc;
    for i in 0..gram.nrows() {
        gram[(i, i)] += alpha;
    }
    let rhs = xc.transpose() * &yc;
    let weights = gram
        .cholesky()
        .ok_or_else(|| Error::Numerical("ridge system is not positive definite".into()))?
        .solve(&rhs);
    let bias = &y_mean - weights.transpose() * &x_mean;
    Ok(RegressorModel { weights, bias, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn problem(seed: u64, n: usize, f: usize, d: usize, noise: f64) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let mut rng = SeededRng::new(seed);
        let x = DMatrix::from_fn(n, f, |_, _| rng.normal());
        let w = DMatrix::from_fn(f, d, |_, _| rng.normal());
        let mut y = &x * &w;
        for v in y.iter_mut() {
            *v += 2.0 + noise * rng.normal();
        }
        (x, y, w)
    }

    #[test]
    fn noiseless_recovery() {
        let (x, y, _) = problem(1, 30, 4, 3, 0.0);
        let m = fit_regressor(&x, &y, 1e-8).unwrap();
        let p = m.predict(&x).unwrap();
        assert!((p - y).amax() < 1e-6);
    }

    #[test]
    fn huge_penalty_predicts_means() {
        let (x, y, _) = problem(2, 25, 3, 2, 0.3);
        let m = fit_regressor(&x, &y, 1e12).unwrap();
        let p = m.predict(&x).unwrap();
        let means = column_means(&y);
        assert!(m.weights().amax() < 1e-8);
        for r in p.row_iter() {
            assert!((r[0] - means[0]).abs() < 1e-6 && (r[1] - means[1]).abs() < 1e-6);
        }
    }

    #[test]
    fn normal_equation_residual() {
        let (x, y, _) = problem(3, 20, 5, 3, 0.5);
        let alpha = 3.0;
        let m = fit_regressor(&x, &y, alpha).unwrap();
        let xc = centered(&x, &column_means(&x));
        let yc = centered(&y, &column_means(&y));
        let lhs = (xc.transpose() * &xc + DMatrix::identity(5, 5) * alpha) * m.weights();
        let rhs = xc.transpose() * &yc;
        assert!((lhs - rhs).amax() <= 1e-8);
    }

    #[test]
    fn bad_inputs() {
        let x = DMatrix::<f64>::zeros(3, 2);
        assert!(fit_regressor(&x, &DMatrix::zeros(2, 1), 1.0).is_err());
        assert!(fit_regressor(&x, &DMatrix::zeros(3, 1), 0.0).is_err());
    }

    #[test]
    fn prediction_is_affine() {
        let (x, y, _) = problem(4, 20, 3, 2, 0.2);
        let m = fit_regressor(&x, &y, 1.0).unwrap();
        let probe = DMatrix::from_row_slice(1, 3, &[0.3, -1.2, 2.0]);
        let origin = m.predict(&DMatrix::zeros(1, 3)).unwrap();
        let base = m.predict(&probe).unwrap() - &origin;
        let scaled = m.predict(&(&probe * 2.5)).unwrap() - &origin;
        assert!((scaled - base * 2.5).amax() < 1e-9);
    }
}
