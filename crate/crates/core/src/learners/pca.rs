use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{centered, check_cols, column_means};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Projection onto leading principal directions.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaProjection<T: Real> {
    mean: DVector<T>,
    components: DMatrix<T>,
    explained_variance: Vec<T>,
    variance_fraction: T,
}

impl<T: Real> PcaProjection<T> {
    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }

    /// F x d, orthonormal columns in decreasing-variance order.
    pub fn components(&self) -> &DMatrix<T> {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    /// Variance captured by each retained component.
    pub fn explained_variance(&self) -> &[T] {
        &self.explained_variance
    }

    /// Fraction of total variance the retained components were required to reach.
    pub fn variance_fraction(&self) -> T {
        self.variance_fraction
    }

    pub fn project(&self, x: &DMatrix<T>) -> Result<DMatrix<T>> {
        check_cols(x, self.mean.len())?;
        Ok(centered(x, &self.mean) * &self.components)
    }
}

struct Spectrum<T: Real> {
    mean: DVector<T>,
    values: Vec<T>,
    vectors: DMatrix<T>,
}

fn spectrum<T: Real>(x: &DMatrix<T>) -> Result<Spectrum<T>> {
    if x.nrows() < 2 {
        return Err(Error::InvalidArgument("PCA needs at least two rows".into()));
    }
    let mean = column_means(x);
    let xc = centered(x, &mean);
    let cov = (xc.transpose() * &xc) / T::from_count(x.nrows() - 1);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i].max(T::zero())).collect();
    let mut vectors = eig.eigenvectors.select_columns(order.iter());
    for mut col in vectors.column_iter_mut() {
        let pivot = col.iter().copied().fold(T::zero(), |m, v| if v.magnitude() > m.magnitude() { v } else { m });
        if pivot < T::zero() {
            col.neg_mut();
        }
    }
    let total = values.iter().fold(T::zero(), |a, &b| a + b);
    if !(total > T::zero()) {
        return Err(Error::InvalidArgument("PCA input has zero variance".into()));
    }
    Ok(Spectrum { mean, values, vectors })
}

/// Numerical rank: eigenvalues above a relative floor.
fn numerical_rank<T: Real>(values: &[T]) -> usize {
    let floor = values[0] * T::default_epsilon().sqrt() * T::lit(1e-3);
    values.iter().take_while(|&&v| v > floor).count()
}

/// Keeps the fewest components whose cumulative explained variance reaches
/// `variance_fraction` of the total.
pub fn fit_pca<T: Real>(x: &DMatrix<T>, variance_fraction: T) -> Result<PcaProjection<T>> {
    if !(variance_fraction > T::zero() && variance_fraction <= T::one()) {
        return Err(Error::InvalidArgument(format!("variance fraction {variance_fraction} outside (0, 1]")));
    }
    let spec = spectrum(x)?;
    let total = spec.values.iter().fold(T::zero(), |a, &b| a + b);
    let rank = numerical_rank(&spec.values);
    // roundoff slack so that a fraction of exactly 1 stops at the numerical rank
    let goal = variance_fraction * total * (T::one() - T::default_epsilon().sqrt());
    let mut cumulative = T::zero();
    let mut d = 0;
    while d < rank {
        cumulative += spec.values[d];
        d += 1;
        if cumulative >= goal {
            break;
        }
    }
    Ok(build(spec, d, variance_fraction))
}

/// PCA with a fixed number of components.
pub fn fit_pca_components<T: Real>(x: &DMatrix<T>, n_components: usize) -> Result<PcaProjection<T>> {
    let spec = spectrum(x)?;
    if n_components == 0 || n_components > spec.values.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot keep {n_components} of {} components",
            spec.values.len()
        )));
    }
    let total = spec.values.iter().fold(T::zero(), |a, &b| a + b);
    let kept = spec.values[..n_components].iter().fold(T::zero(), |a, &b| a + b);
    Ok(build(spec, n_components, kept / total))
}

fn build<T: Real>(spec: Spectrum<T>, d: usize, variance_fraction: T) -> PcaProjection<T> {
    PcaProjection {
        mean: spec.mean,
        components: spec.vectors.columns(0, d).into_owned(),
        explained_variance: spec.values[..d].to_vec(),
        variance_fraction,
    }
}
