use nalgebra::DMatrix;

use super::config::{AdaptationMethod, ExperimentConfig};
use crate::acquisition::{confidence, map_rows_to_dimensional, TransferDirection};
use crate::adaptation::{bda_fit, tca_fit};
use crate::data::{AffectiveNormLexicon, Dataset, LexiconMap};
use crate::error::{Error, Result};
use crate::learners::{
    fit_classifier, fit_pca, fit_regressor, select_regularization, ClassifierModel, TaskLabels,
};
use crate::scalar::Real;

/// Source-model outputs on every target row, computed once before any
/// active learning starts.
#[derive(Clone, Debug)]
pub enum SourcePredictions<T: Real> {
    /// Regression source: dimensional estimates.
    Dimensional { estimates: DMatrix<T> },
    /// Classification source: class probabilities, their lexicon mapping,
    /// predicted classes and confidence.
    Categorical { probs: DMatrix<T>, mapped: DMatrix<T>, classes: Vec<usize>, confidence: Vec<T> },
}

/// Everything a learning-curve run needs besides its strategy and seed.
#[derive(Clone, Debug)]
pub struct TransferContext<T: Real> {
    pub direction: TransferDirection,
    /// Target dataset; its labels answer the queries.
    pub target: Dataset<T>,
    /// Target features in the target-only principal subspace.
    pub al_features: DMatrix<T>,
    /// Lexicon rows of the classification task's emotions, on the label
    /// interval of the dimensional task.
    pub lexicon_map: LexiconMap<T>,
    pub source: SourcePredictions<T>,
    /// Dimensionality of the space the source model works in.
    pub cross_task_dims: usize,
    /// Source-model fits performed while preparing.
    pub source_fits: usize,
}

fn stack<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_fn(a.nrows() + b.nrows(), a.ncols(), |i, j| {
        if i < a.nrows() {
            a[(i, j)]
        } else {
            b[(i - a.nrows(), j)]
        }
    })
}

/// Grid search that falls back to `fallback` when cross-validation is not
/// possible.
pub(crate) fn choose_regularization<T: Real>(
    x: &DMatrix<T>,
    labels: TaskLabels<'_, T>,
    grid: &[T],
    folds: usize,
    seed: u64,
    fallback: T,
) -> T {
    match select_regularization(x, labels, grid, folds, seed) {
        Ok(v) => v,
        Err(e) => {
            log::debug!("regularization search skipped: {e}");
            fallback
        }
    }
}

pub(crate) fn smallest<T: Real>(grid: &[T]) -> T {
    grid.iter().copied().fold(grid[0], |m, v| if v < m { v } else { m })
}

impl<T: Real> TransferContext<T> {
    /// Builds the feature spaces and the source model.
    ///
    /// The target gets its own principal subspace for the target-task model.
    /// Source and target are also projected together onto the principal
    /// subspace of their union, optionally followed by TCA or BDA, and the
    /// source model trained there predicts every target row.
    pub fn prepare(config: &ExperimentConfig, source: &Dataset<T>, target: Dataset<T>) -> Result<Self> {
        let direction = config.direction;
        let (cat_set, dim_set) = match direction {
            TransferDirection::DeeToCec => (&target, source),
            TransferDirection::CecToDee => (source, &target),
        };
        let source_role = |d: TransferDirection| match d {
            TransferDirection::DeeToCec => "dimensional",
            TransferDirection::CecToDee => "categorical",
        };
        if source.n_features() != target.n_features() {
            return Err(Error::DimensionMismatch {
                what: "source features",
                expected: target.n_features(),
                found: source.n_features(),
            });
        }
        let missing = |what: &str| Error::Config(format!("{direction} needs {what} labels"));
        if cat_set.cat_labels().is_none() {
            return Err(missing(if direction == TransferDirection::DeeToCec { "target categorical" } else { "source categorical" }));
        }
        let dim_labels = dim_set.dim_labels().ok_or_else(|| {
            missing(if direction == TransferDirection::DeeToCec { "source dimensional" } else { "target dimensional" })
        })?;
        let scale = dim_set.dim_scale().expect("dimensional labels carry a scale");

        let lexicon = match &config.lexicon {
            Some(path) => AffectiveNormLexicon::load(path)?,
            None => AffectiveNormLexicon::nrc_vad(),
        };
        if lexicon.n_dimensions() != dim_labels.ncols() {
            return Err(Error::DimensionMismatch {
                what: "lexicon dimensions",
                expected: dim_labels.ncols(),
                found: lexicon.n_dimensions(),
            });
        }
        let lexicon_map = lexicon.rescale(scale)?.map_for(cat_set.emotion_names())?;

        let variance = T::lit(config.pca_variance);
        let al_features = fit_pca(target.features(), variance)?.project(target.features())?;

        let stacked = stack(source.features(), target.features());
        let pca = fit_pca(&stacked, variance)?;
        let mut zs = pca.project(source.features())?;
        let mut zt = pca.project(target.features())?;

        let grid: Vec<T> = config.reg_grid.iter().map(|&g| T::lit(g)).collect();
        let fallback = smallest(&grid);
        let folds = config.cv_folds;
        let cv_seed = config.source_cv_seed;
        let adaptation = &config.adaptation;
        let wanted = adaptation.resolved_dimensions();
        let dims = wanted.min(zs.ncols());
        if adaptation.method != AdaptationMethod::None && dims < wanted {
            log::warn!("adaptation dimensionality capped at {dims} (principal subspace size)");
        }
        let mu = T::lit(adaptation.mu);
        log::info!("source model ({} source) on {} cross-task features", source_role(direction), zs.ncols());

        let source_pred = match direction {
            TransferDirection::DeeToCec => {
                if adaptation.method == AdaptationMethod::Tca {
                    let w = tca_fit(&zs, &zt, dims, mu)?;
                    zs = w.project(&zs)?;
                    zt = w.project(&zt)?;
                }
                let alpha = choose_regularization(&zs, TaskLabels::Dimensional(dim_labels), &grid, folds, cv_seed, fallback);
                let model = fit_regressor(&zs, dim_labels, alpha)?;
                SourcePredictions::Dimensional { estimates: model.predict(&zt)? }
            }
            TransferDirection::CecToDee => {
                let ys = source.cat_labels().expect("checked above");
                let n_classes = source.n_classes();
                let model: ClassifierModel<T> = match adaptation.method {
                    AdaptationMethod::Bda => {
                        let labels = TaskLabels::Categorical { classes: ys, n_classes };
                        let reg = choose_regularization(&zs, labels, &grid, folds, cv_seed, fallback);
                        let balance: Vec<T> = adaptation.balance_grid.iter().map(|&b| T::lit(b)).collect();
                        let fit = bda_fit(&zs, ys, n_classes, &zt, dims, adaptation.iterations, &balance, mu, |x, y| {
                            fit_classifier(x, y, n_classes, T::one() / reg)
                        })?;
                        zs = fit.projection.project(&zs)?;
                        zt = fit.projection.project(&zt)?;
                        fit.classifier
                    }
                    method => {
                        if method == AdaptationMethod::Tca {
                            let w = tca_fit(&zs, &zt, dims, mu)?;
                            zs = w.project(&zs)?;
                            zt = w.project(&zt)?;
                        }
                        let labels = TaskLabels::Categorical { classes: ys, n_classes };
                        let reg = choose_regularization(&zs, labels, &grid, folds, cv_seed, fallback);
                        fit_classifier(&zs, ys, n_classes, T::one() / reg)?
                    }
                };
                let probs = model.predict_proba(&zt)?;
                let mapped = map_rows_to_dimensional(&probs, &lexicon_map)?;
                let classes = model.predict_classes(&zt)?;
                let conf = (0..probs.nrows())
                    .map(|i| confidence(&probs.row(i).iter().copied().collect::<Vec<_>>()))
                    .collect();
                SourcePredictions::Categorical { probs, mapped, classes, confidence: conf }
            }
        };

        Ok(Self {
            direction,
            target,
            al_features,
            lexicon_map,
            source: source_pred,
            cross_task_dims: zs.ncols(),
            source_fits: 1,
        })
    }

    pub fn n_target(&self) -> usize {
        self.target.n_rows()
    }
}
