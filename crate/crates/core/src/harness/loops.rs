use nalgebra::DMatrix;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::context::{choose_regularization, smallest, SourcePredictions, TransferContext};
use crate::acquisition::{
    confidence, cti, ctigs_distances, entropy, map_rows_to_dimensional, mtigs_distances, mtigs_modified_distances,
    select, SelectionInputs, StrategyKind, TransferDirection,
};
use crate::data::PoolState;
use crate::error::{Error, Result};
use crate::learners::{fit_classifier, fit_regressor, ClassifierModel, RegressorModel, TaskLabels};
use crate::metrics::{evaluate_dims, evaluate_hybrid_classes, evaluate_hybrid_dims, EvaluationReport};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Model fits performed during one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FitCounts {
    /// Source-model fits (done once, before the loop).
    pub source: usize,
    /// Target-model fits: the initial fit plus one per query.
    pub target: usize,
    /// Regularization searches on the labeled target set.
    pub searches: usize,
}

/// Metrics after each query of one (strategy, seed) run. `reports[0]` is
/// the initial model; `reports[k]` follows the k-th query.
#[derive(Clone, Debug)]
pub struct LearningCurve<T: Real> {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub reports: Vec<EvaluationReport<T>>,
    /// Target row indices in query order.
    pub queried: Vec<usize>,
    pub fits: FitCounts,
}

/// Random streams of one run. The initial labeled set comes from
/// `SeededRng::new(seed)` so every strategy starts from the same samples.
fn run_streams(seed: u64) -> (SeededRng, u64) {
    (SeededRng::for_stream(seed, 1), SeededRng::for_stream(seed, 2).next_u64())
}

fn rows_of(values: &[usize], idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|&i| values[i]).collect()
}

fn row_vec<T: Real>(m: &DMatrix<T>, i: usize) -> Vec<T> {
    m.row(i).iter().copied().collect()
}

/// Per-row Euclidean distance between two equally shaped matrices.
fn row_cti<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<Vec<T>> {
    (0..a.nrows()).map(|i| cti(&row_vec(a, i), &row_vec(b, i))).collect()
}

struct Searcher<T: Real> {
    grid: Vec<T>,
    folds: usize,
    cv_seed: u64,
    cadence: usize,
    current: Option<T>,
    count: usize,
}

impl<T: Real> Searcher<T> {
    fn new(config: &ExperimentConfig, cv_seed: u64) -> Self {
        Self {
            grid: config.reg_grid.iter().map(|&g| T::lit(g)).collect(),
            folds: config.cv_folds,
            cv_seed,
            cadence: config.search_cadence(),
            current: None,
            count: 0,
        }
    }

    /// Regularization weight for the fit after `queries` queries; searched at
    /// the start and then every `cadence` queries, otherwise reused.
    fn weight(&mut self, queries: usize, x: &DMatrix<T>, labels: TaskLabels<'_, T>) -> T {
        if self.current.is_none() || queries % self.cadence == 0 {
            let fallback = self.current.unwrap_or_else(|| smallest(&self.grid));
            self.current = Some(choose_regularization(x, labels, &self.grid, self.folds, self.cv_seed, fallback));
            self.count += 1;
        }
        self.current.expect("set above")
    }
}

fn check_run(config: &ExperimentConfig, ctx: &TransferContext<impl Real>, strategy: StrategyKind) -> Result<()> {
    if !strategy.valid_for(ctx.direction) {
        return Err(Error::Config(format!("strategy {strategy} is not available for {}", ctx.direction)));
    }
    if config.direction != ctx.direction {
        return Err(Error::Config("config and context disagree on the transfer direction".into()));
    }
    config.validate_pool(ctx.n_target())
}

/// Classification model on the labeled rows; uniform probabilities while
/// only one class is labeled.
fn fit_target_classifier<T: Real>(
    x: &DMatrix<T>,
    y: &[usize],
    n_classes: usize,
    weight: T,
) -> Result<ClassifierModel<T>> {
    match fit_classifier(x, y, n_classes, T::one() / weight) {
        Err(Error::SingleClass) => Ok(ClassifierModel::uniform(x.ncols(), n_classes)),
        other => other,
    }
}

/// Active learning of the classification task with a dimensional source
/// model. Dimensional estimates of the target come from the source model
/// once; class probabilities of the pool are recomputed after every query.
pub fn run_dee_to_cec<T: Real>(
    config: &ExperimentConfig,
    ctx: &TransferContext<T>,
    strategy: StrategyKind,
    seed: u64,
) -> Result<LearningCurve<T>> {
    check_run(config, ctx, strategy)?;
    let SourcePredictions::Dimensional { estimates } = &ctx.source else {
        return Err(Error::Config("DEEtoCEC needs dimensional source predictions".into()));
    };
    let truth = ctx.target.cat_labels().ok_or_else(|| Error::Config("target has no class labels".into()))?;
    let n_classes = ctx.target.n_classes();
    let x = &ctx.al_features;

    let mut pool = PoolState::init(ctx.n_target(), config.n_initial, seed)?;
    let (mut rng, cv_seed) = run_streams(seed);
    let mut searcher = Searcher::new(config, cv_seed);
    let mut fits = FitCounts { source: ctx.source_fits, ..Default::default() };

    let mut fit = |pool: &PoolState, queries: usize, fits: &mut FitCounts| -> Result<ClassifierModel<T>> {
        let xl = x.select_rows(pool.labeled().iter());
        let yl = rows_of(truth, pool.labeled());
        let weight = searcher.weight(queries, &xl, TaskLabels::Categorical { classes: &yl, n_classes });
        fits.target += 1;
        fit_target_classifier(&xl, &yl, n_classes, weight)
    };

    let mut model = fit(&pool, 0, &mut fits)?;
    let mut probs = model.predict_proba(&x.select_rows(pool.pool().iter()))?;
    let report = |pool: &PoolState, model: &ClassifierModel<T>| -> Result<EvaluationReport<T>> {
        let pred = model.predict_classes(&x.select_rows(pool.pool().iter()))?;
        evaluate_hybrid_classes(truth, pool.labeled(), pool.pool(), &pred)
    };
    let mut reports = vec![report(&pool, &model)?];
    let mut queried = Vec::with_capacity(config.budget);

    for k in 1..=config.budget {
        let members = pool.pool().to_vec();
        let n = members.len();
        let rows: Vec<Vec<T>> = (0..n).map(|i| row_vec(&probs, i)).collect();
        let mut inputs = SelectionInputs::empty(n);
        let (cti_s, ent_s, conf_s, dist_s);
        use StrategyKind::*;
        if matches!(strategy, CTIAL | EntCTIAL | LCCTIAL) {
            let mapped = map_rows_to_dimensional(&probs, &ctx.lexicon_map)?;
            cti_s = row_cti(&estimates.select_rows(members.iter()), &mapped)?;
            inputs.cti = Some(&cti_s);
        }
        if matches!(strategy, Ent | EntCTIAL) {
            ent_s = rows.iter().map(|p| entropy(p)).collect::<Vec<T>>();
            inputs.entropy = Some(&ent_s);
        }
        if matches!(strategy, LC | LCCTIAL) {
            conf_s = rows.iter().map(|p| confidence(p)).collect::<Vec<T>>();
            inputs.confidence = Some(&conf_s);
        }
        if strategy == SourceMTiGS {
            dist_s = mtigs_distances(
                &x.select_rows(members.iter()),
                &estimates.select_rows(members.iter()),
                &x.select_rows(pool.labeled().iter()),
                &estimates.select_rows(pool.labeled().iter()),
            )?;
            inputs.distance = Some(&dist_s);
        }
        let position = select(strategy, &inputs, &mut rng)?;
        queried.push(pool.query(position)?);
        model = fit(&pool, k, &mut fits)?;
        probs = model.predict_proba(&x.select_rows(pool.pool().iter()))?;
        reports.push(report(&pool, &model)?);
    }
    fits.searches = searcher.count;
    Ok(LearningCurve { strategy, seed, reports, queried, fits })
}

/// Active learning of the dimensional task with a categorical source model.
/// Source probabilities and their lexicon mapping are fixed; dimensional
/// estimates of the pool are recomputed after every query. `NRCMapping`
/// trains nothing and repeats the mapping's metrics on the whole target set.
pub fn run_cec_to_dee<T: Real>(
    config: &ExperimentConfig,
    ctx: &TransferContext<T>,
    strategy: StrategyKind,
    seed: u64,
) -> Result<LearningCurve<T>> {
    check_run(config, ctx, strategy)?;
    let SourcePredictions::Categorical { mapped, classes, confidence: source_conf, .. } = &ctx.source else {
        return Err(Error::Config("CECtoDEE needs categorical source predictions".into()));
    };
    let truth = ctx.target.dim_labels().ok_or_else(|| Error::Config("target has no dimensional labels".into()))?;

    if strategy == StrategyKind::NRCMapping {
        let report = evaluate_dims(truth, mapped)?;
        return Ok(LearningCurve {
            strategy,
            seed,
            reports: vec![report; config.budget + 1],
            queried: Vec::new(),
            fits: FitCounts { source: ctx.source_fits, ..Default::default() },
        });
    }

    let x = &ctx.al_features;
    let mut pool = PoolState::init(ctx.n_target(), config.n_initial, seed)?;
    let (mut rng, cv_seed) = run_streams(seed);
    let mut searcher = Searcher::new(config, cv_seed);
    let mut fits = FitCounts { source: ctx.source_fits, ..Default::default() };

    let mut fit = |pool: &PoolState, queries: usize, fits: &mut FitCounts| -> Result<RegressorModel<T>> {
        let xl = x.select_rows(pool.labeled().iter());
        let yl = truth.select_rows(pool.labeled().iter());
        let weight = searcher.weight(queries, &xl, TaskLabels::Dimensional(&yl));
        fits.target += 1;
        fit_regressor(&xl, &yl, weight)
    };

    let mut model = fit(&pool, 0, &mut fits)?;
    let mut pred = model.predict(&x.select_rows(pool.pool().iter()))?;
    let mut reports = vec![evaluate_hybrid_dims(truth, pool.labeled(), pool.pool(), &pred)?];
    let mut queried = Vec::with_capacity(config.budget);

    for k in 1..=config.budget {
        let members = pool.pool().to_vec();
        let labeled = pool.labeled().to_vec();
        let mut inputs = SelectionInputs::empty(members.len());
        let (cti_s, dist_s, mod_s, conf_s);
        use StrategyKind::*;
        if matches!(strategy, CTIAL | MTiGSCTIAL) {
            cti_s = row_cti(&pred, &mapped.select_rows(members.iter()))?;
            inputs.cti = Some(&cti_s);
        }
        if matches!(strategy, MTiGS | CTiGS | MTiGSCTIAL) {
            let xp = x.select_rows(members.iter());
            let xl = x.select_rows(labeled.iter());
            let yl = truth.select_rows(labeled.iter());
            if strategy == MTiGS {
                dist_s = mtigs_distances(&xp, &pred, &xl, &yl)?;
                inputs.distance = Some(&dist_s);
            } else if strategy == CTiGS {
                dist_s = ctigs_distances(&xp, &pred, &rows_of(classes, &members), &xl, &yl, &rows_of(classes, &labeled))?;
                inputs.distance = Some(&dist_s);
            } else {
                mod_s = mtigs_modified_distances(&xp, &pred, &xl, &yl)?;
                inputs.modified_distance = Some(&mod_s);
            }
        }
        if strategy == SourceLC {
            conf_s = members.iter().map(|&i| source_conf[i]).collect::<Vec<T>>();
            inputs.source_confidence = Some(&conf_s);
        }
        let position = select(strategy, &inputs, &mut rng)?;
        queried.push(pool.query(position)?);
        model = fit(&pool, k, &mut fits)?;
        pred = model.predict(&x.select_rows(pool.pool().iter()))?;
        reports.push(evaluate_hybrid_dims(truth, pool.labeled(), pool.pool(), &pred)?);
    }
    fits.searches = searcher.count;
    Ok(LearningCurve { strategy, seed, reports, queried, fits })
}

/// Dispatches on the context's direction.
pub fn run_curve<T: Real>(
    config: &ExperimentConfig,
    ctx: &TransferContext<T>,
    strategy: StrategyKind,
    seed: u64,
) -> Result<LearningCurve<T>> {
    match ctx.direction {
        TransferDirection::DeeToCec => run_dee_to_cec(config, ctx, strategy, seed),
        TransferDirection::CecToDee => run_cec_to_dee(config, ctx, strategy, seed),
    }
}
