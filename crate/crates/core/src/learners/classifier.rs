use nalgebra::{DMatrix, DVector};

use super::check_cols;
use super::optim::{minimize_lbfgs, LbfgsOptions};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITERATIONS: usize = 2000;
const TOLERANCE_PER_SAMPLE: f64 = 1e-5;

/// Multinomial logistic regression, `p = softmax(x W + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierModel<T: Real> {
    weights: DMatrix<T>,
    bias: DVector<T>,
    inv_reg: T,
    iterations: usize,
    converged: bool,
}

impl<T: Real> ClassifierModel<T> {
    pub fn from_parts(weights: DMatrix<T>, bias: DVector<T>, inv_reg: T) -> Result<Self> {
        if weights.ncols() != bias.len() {
            return Err(Error::DimensionMismatch {
                what: "classifier bias",
                expected: weights.ncols(),
                found: bias.len(),
            });
        }
        Ok(Self { weights, bias, inv_reg, iterations: 0, converged: true })
    }

    /// All-zero model: every prediction is the uniform distribution.
    pub fn uniform(n_features: usize, n_classes: usize) -> Self {
        Self {
            weights: DMatrix::zeros(n_features, n_classes),
            bias: DVector::zeros(n_classes),
            inv_reg: T::one(),
            iterations: 0,
            converged: true,
        }
    }

    pub fn weights(&self) -> &DMatrix<T> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<T> {
        &self.bias
    }

    pub fn inv_reg(&self) -> T {
        self.inv_reg
    }

    pub fn n_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn n_features(&self) -> usize {
        self.weights.nrows()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// False when the solver hit its iteration cap before the gradient tolerance.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Row-wise class probabilities (N x |E|).
    pub fn predict_proba(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_cols(x, self.n_features())?;
        let mut scores = x * &self.weights;
        let k = self.n_classes();
        for i in 0..scores.nrows() {
            let mut max = scores[(i, 0)] + self.bias[0];
            for j in 0..k {
                scores[(i, j)] += self.bias[j];
                max = max.max(scores[(i, j)]);
            }
            let mut total = T::zero();
            for j in 0..k {
                let e = (scores[(i, j)] - max).exp();
                scores[(i, j)] = e;
                total += e;
            }
            for j in 0..k {
                scores[(i, j)] /= total;
            }
        }
        Ok(scores)
    }

    /// Most probable class per row; ties go to the lower class index.
    pub fn predict_classes(&self, x: &DMatrix<T>) -> Result<Vec<usize>> {
        let p = self.predict_proba(x)?;
        Ok(p.row_iter().map(|r| argmax_slice(r.iter().copied())).collect())
    }
}

pub(crate) fn argmax_slice<T: Real>(values: impl Iterator<Item = T>) -> usize {
    let mut best = 0;
    let mut best_val: Option<T> = None;
    for (i, v) in values.enumerate() {
        if best_val.is_none_or(|b| v > b) {
            best = i;
            best_val = Some(v);
        }
    }
    best
}

/// Penalized negative log-likelihood `sum_i CE_i + ||W||^2 / (2 C)` and its
/// gradients with respect to the weights and the (unpenalized) bias.
pub fn classifier_objective<T: Real>(
    x: &DMatrix<T>,
    y: &[usize],
    n_classes: usize,
    inv_reg: T,
    weights: &DMatrix<T>,
    bias: &DVector<T>,
) -> (T, DMatrix<T>, DVector<T>) {
    let mut scores = x * weights;
    let mut loss = T::zero();
    for (i, mut row) in scores.row_iter_mut().enumerate() {
        row += bias.transpose();
        let max = row.max();
        let lse = row.iter().map(|&s| (s - max).exp()).fold(T::zero(), |a, b| a + b).ln() + max;
        loss += lse - row[y[i]];
        for v in row.iter_mut() {
            *v = (*v - lse).exp();
        }
        row[y[i]] -= T::one();
    }
    // scores now holds P - Y
    let penalty = T::one() / inv_reg;
    let grad_w = x.transpose() * &scores + weights * penalty;
    let grad_b = DVector::from_iterator(n_classes, scores.column_iter().map(|c| c.sum()));
    let value = loss + weights.norm_squared() * penalty * T::lit(0.5);
    (value, grad_w, grad_b)
}

/// Fits the multinomial model with L-BFGS from a zero start.
pub fn fit_classifier<T: Real>(
    x: &DMatrix<T>,
    y: &[usize],
    n_classes: usize,
    inv_reg: T,
) -> Result<ClassifierModel<T>> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch { what: "classifier labels", expected: x.nrows(), found: y.len() });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput("classifier training set"));
    }
    if !(inv_reg > T::zero()) {
        return Err(Error::InvalidArgument(format!("inverse regularization must be positive, got {inv_reg}")));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::InvalidArgument(format!("class index {bad} >= {n_classes}")));
    }
    if y.iter().all(|&c| c == y[0]) {
        return Err(Error::SingleClass);
    }

    let f = x.ncols();
    let split = |theta: &DVector<T>| {
        let w = DMatrix::from_column_slice(f, n_classes, &theta.as_slice()[..f * n_classes]);
        let b = DVector::from_column_slice(&theta.as_slice()[f * n_classes..]);
        (w, b)
    };
    let objective = |theta: &DVector<T>| {
        let (w, b) = split(theta);
        let (v, gw, gb) = classifier_objective(x, y, n_classes, inv_reg, &w, &b);
        let mut g = DVector::zeros(theta.len());
        g.as_mut_slice()[..f * n_classes].copy_from_slice(gw.as_slice());
        g.as_mut_slice()[f * n_classes..].copy_from_slice(gb.as_slice());
        (v, g)
    };
    let opts = LbfgsOptions {
        max_iterations: MAX_ITERATIONS,
        gradient_tolerance: T::lit(TOLERANCE_PER_SAMPLE) * T::from_count(y.len()),
        memory: 10,
    };
    let out = minimize_lbfgs(objective, DVector::zeros(f * n_classes + n_classes), opts);
    if !out.value.finite() {
        return Err(Error::Numerical("classifier objective diverged".into()));
    }
    let (weights, bias) = split(&out.x);
    if !out.converged {
        log::debug!(
            "classifier stopped after {} iterations, gradient norm {}",
            out.iterations,
            out.gradient_norm
        );
    }
    Ok(ClassifierModel { weights, bias, inv_reg, iterations: out.iterations, converged: out.converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_abs_diff_eq;

    fn random_matrix(rng: &mut SeededRng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.normal())
    }

    #[test]
    fn uniform_softmax_with_zero_parameters() {
        let m = ClassifierModel::<f64>::uniform(3, 4);
        let p = m.predict_proba(&DMatrix::from_element(2, 3, 1.7)).unwrap();
        for v in p.iter() {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn bias_ln2_gives_two_thirds() {
        let m = ClassifierModel::from_parts(
            DMatrix::<f64>::zeros(2, 2),
            DVector::from_vec(vec![2f64.ln(), 0.0]),
            1.0,
        )
        .unwrap();
        let p = m.predict_proba(&DMatrix::from_element(3, 2, -4.0)).unwrap();
        for r in p.row_iter() {
            assert_abs_diff_eq!(r[0], 2.0 / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r[1], 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m = ClassifierModel::<f64>::uniform(3, 2);
        assert!(m.predict_proba(&DMatrix::zeros(1, 4)).is_err());
    }

    #[test]
    fn separable_blobs() {
        let mut rng = SeededRng::new(1);
        let n = 40;
        let x = DMatrix::from_fn(n, 2, |i, _| {
            let c = if i < n / 2 { -3.0 } else { 3.0 };
            c + 0.5 * rng.normal()
        });
        let y: Vec<usize> = (0..n).map(|i| usize::from(i >= n / 2)).collect();
        let m = fit_classifier(&x, &y, 2, 10.0).unwrap();
        assert_eq!(m.predict_classes(&x).unwrap(), y);
    }

    #[test]
    fn noise_with_strong_regularization_stays_near_half() {
        let mut rng = SeededRng::new(5);
        let n = 2000;
        let x = random_matrix(&mut rng, n, 3);
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let m = fit_classifier(&x, &y, 2, 1.0).unwrap();
        let p = m.predict_proba(&x).unwrap();
        for v in p.iter() {
            assert!((v - 0.5).abs() < 0.1, "{v}");
        }
    }

    #[test]
    fn single_class_rejected() {
        let x = DMatrix::<f64>::zeros(3, 2);
        assert!(matches!(fit_classifier(&x, &[1, 1, 1], 3, 1.0), Err(Error::SingleClass)));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = SeededRng::new(9);
        let x = random_matrix(&mut rng, 5, 3);
        let y = vec![0, 2, 1, 2, 0];
        let w = random_matrix(&mut rng, 3, 3);
        let b = DVector::from_fn(3, |_, _| rng.normal());
        let (_, gw, gb) = classifier_objective(&x, &y, 3, 0.7, &w, &b);
        let h = 1e-4;
        for k in 0..9 {
            let (mut wp, mut wm) = (w.clone(), w.clone());
            wp[k] += h;
            wm[k] -= h;
            let fd = (classifier_objective(&x, &y, 3, 0.7, &wp, &b).0
                - classifier_objective(&x, &y, 3, 0.7, &wm, &b).0)
                / (2.0 * h);
            assert!((fd - gw[k]).abs() <= 1e-4 * gw[k].abs().max(1e-8), "{fd} vs {}", gw[k]);
        }
        for k in 0..3 {
            let (mut bp, mut bm) = (b.clone(), b.clone());
            bp[k] += h;
            bm[k] -= h;
            let fd = (classifier_objective(&x, &y, 3, 0.7, &w, &bp).0
                - classifier_objective(&x, &y, 3, 0.7, &w, &bm).0)
                / (2.0 * h);
            assert!((fd - gb[k]).abs() <= 1e-4 * gb[k].abs().max(1e-8));
        }
    }

    #[test]
    fn converges_to_tolerance() {
        let mut rng = SeededRng::new(12);
        let x = random_matrix(&mut rng, 60, 4);
        let y: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let m = fit_classifier(&x, &y, 3, 0.5).unwrap();
        assert!(m.converged());
        let (_, gw, gb) = classifier_objective(&x, &y, 3, 0.5, m.weights(), m.bias());
        let norm = (gw.norm_squared() + gb.norm_squared()).sqrt();
        assert!(norm / 60.0 <= 1e-5);
    }

    #[test]
    fn works_in_single_precision() {
        let x = DMatrix::<f32>::from_row_slice(4, 1, &[-2.0, -1.0, 1.0, 2.0]);
        let m = fit_classifier(&x, &[0, 0, 1, 1], 2, 1.0f32).unwrap();
        assert_eq!(m.predict_classes(&x).unwrap(), vec![0, 0, 1, 1]);
    }
}
