use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::corpus::CorpusConfig;
use crate::acquisition::{StrategyKind, TransferDirection};
use crate::data::DatasetFiles;
use crate::error::{Error, Result};
use crate::learners::DEFAULT_REG_GRID;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdaptationMethod {
    #[default]
    None,
    Tca,
    Bda,
}

/// Feature alignment applied to the cross-task feature space before the
/// source model is trained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptationConfig {
    pub method: AdaptationMethod,
    /// Adapted dimensionality; defaults to 30 for TCA and 40 for BDA.
    pub dimensions: Option<usize>,
    pub mu: f64,
    /// BDA pseudo-labeling rounds.
    pub iterations: usize,
    pub balance_grid: Vec<f64>,
}

impl Default for AdaptationConfig {
    fn default() -> Self {
        Self {
            method: AdaptationMethod::None,
            dimensions: None,
            mu: 1.0,
            iterations: 10,
            balance_grid: (1..=9).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

impl AdaptationConfig {
    pub fn resolved_dimensions(&self) -> usize {
        self.dimensions.unwrap_or(match self.method {
            AdaptationMethod::Bda => 40,
            _ => 30,
        })
    }
}

/// Where the source and target datasets come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// One generated corpus split by session: `source_groups` form the
    /// source, the other sessions the target. With `domain_shift` set, two
    /// corpora are generated instead and the target is translated by a
    /// constant vector of that norm.
    Synthetic {
        #[serde(default)]
        corpus: CorpusConfig,
        #[serde(default = "default_source_groups")]
        source_groups: Vec<i64>,
        #[serde(default)]
        domain_shift: Option<f64>,
    },
    /// One labeled file pair split by its group column.
    SplitFile { dataset: DatasetFiles, source_groups: Vec<i64> },
    /// Separate source and target file pairs.
    Files { source: DatasetFiles, target: DatasetFiles },
}

fn default_source_groups() -> Vec<i64> {
    vec![1, 2]
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic { corpus: CorpusConfig::default(), source_groups: default_source_groups(), domain_shift: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub direction: TransferDirection,
    /// Strategies to run; empty means every strategy valid for the direction.
    pub strategies: Vec<StrategyKind>,
    pub n_initial: usize,
    /// Number of queries K.
    pub budget: usize,
    /// One repetition per seed; the seed fixes the initial labeled set.
    pub seeds: Vec<u64>,
    pub adaptation: AdaptationConfig,
    pub pca_variance: f64,
    /// Candidate regularization weights (1/C for the classifier, alpha for ridge).
    pub reg_grid: Vec<f64>,
    /// Queries between regularization searches for a classification target model.
    pub refit_cadence: usize,
    /// Queries between regularization searches for a regression target model.
    pub regression_refit_cadence: usize,
    pub cv_folds: usize,
    /// Fold seed for the source-model regularization search.
    pub source_cv_seed: u64,
    pub data: DataSource,
    /// JSON lexicon; the built-in NRC table when absent.
    pub lexicon: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// A warning is logged when the estimated number of model fits exceeds this.
    pub fit_warning_cap: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            direction: TransferDirection::DeeToCec,
            strategies: Vec::new(),
            n_initial: 20,
            budget: 200,
            seeds: (0..10).collect(),
            adaptation: AdaptationConfig::default(),
            pca_variance: 0.9,
            reg_grid: DEFAULT_REG_GRID.to_vec(),
            refit_cadence: 25,
            regression_refit_cadence: 1,
            cv_folds: 3,
            source_cv_seed: 0,
            data: DataSource::default(),
            lexicon: None,
            output_dir: PathBuf::from("results"),
            fit_warning_cap: 5_000_000,
        }
    }
}

fn config_err(message: impl Into<String>) -> Error {
    Error::Config(message.into())
}

impl ExperimentConfig {
    /// Reads a JSON config. Relative paths inside it are taken relative to
    /// the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)?;
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let fix_files = |f: &mut DatasetFiles| {
            fix(&mut f.features);
            fix(&mut f.labels);
        };
        match &mut self.data {
            DataSource::Synthetic { .. } => {}
            DataSource::SplitFile { dataset, .. } => fix_files(dataset),
            DataSource::Files { source, target } => {
                fix_files(source);
                fix_files(target);
            }
        }
        if let Some(l) = &mut self.lexicon {
            fix(l);
        }
        fix(&mut self.output_dir);
    }

    /// Configured strategies, or every strategy valid for the direction.
    pub fn resolved_strategies(&self) -> Vec<StrategyKind> {
        if self.strategies.is_empty() {
            StrategyKind::ALL.into_iter().filter(|s| s.valid_for(self.direction)).collect()
        } else {
            self.strategies.clone()
        }
    }

    /// Checks that do not need the data.
    pub fn validate(&self) -> Result<()> {
        for s in &self.strategies {
            if !s.valid_for(self.direction) {
                return Err(config_err(format!("strategy {s} is not available for {}", self.direction)));
            }
        }
        let mut seen = self.strategies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.strategies.len() {
            return Err(config_err("duplicate strategy"));
        }
        if self.seeds.is_empty() {
            return Err(config_err("no seeds"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(config_err("duplicate seed"));
        }
        if self.n_initial == 0 {
            return Err(config_err("n_initial must be at least 1"));
        }
        if !(self.pca_variance > 0.0 && self.pca_variance <= 1.0) {
            return Err(config_err(format!("pca_variance {} outside (0, 1]", self.pca_variance)));
        }
        if self.reg_grid.is_empty() || self.reg_grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(config_err("reg_grid must be non-empty and positive"));
        }
        if self.refit_cadence == 0 || self.regression_refit_cadence == 0 {
            return Err(config_err("refit cadences must be at least 1"));
        }
        if self.cv_folds < 2 {
            return Err(config_err("cv_folds must be at least 2"));
        }
        let a = &self.adaptation;
        match a.method {
            AdaptationMethod::None => {}
            AdaptationMethod::Bda if self.direction == TransferDirection::DeeToCec => {
                return Err(config_err("BDA needs a categorical source task (CECtoDEE)"));
            }
            _ => {
                if a.resolved_dimensions() == 0 {
                    return Err(config_err("adaptation dimensions must be positive"));
                }
                if !(a.mu > 0.0) {
                    return Err(config_err("adaptation mu must be positive"));
                }
            }
        }
        if a.method == AdaptationMethod::Bda {
            if a.iterations == 0 {
                return Err(config_err("BDA needs at least one iteration"));
            }
            if a.balance_grid.is_empty() || a.balance_grid.iter().any(|b| !(0.0..=1.0).contains(b)) {
                return Err(config_err("balance_grid must be non-empty with values in [0, 1]"));
            }
        }
        if let DataSource::Synthetic { corpus, source_groups, domain_shift } = &self.data {
            if corpus.n_samples == 0 {
                return Err(config_err("synthetic corpus is empty"));
            }
            if domain_shift.is_none() && source_groups.is_empty() {
                return Err(config_err("source_groups is empty"));
            }
            if domain_shift.is_some_and(|s| !(s >= 0.0 && s.is_finite())) {
                return Err(config_err("domain_shift must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    /// Checks against the target set size.
    pub fn validate_pool(&self, n_target: usize) -> Result<()> {
        if self.n_initial > n_target {
            return Err(config_err(format!("n_initial {} exceeds target size {n_target}", self.n_initial)));
        }
        let pool = n_target - self.n_initial;
        if self.budget > pool {
            return Err(config_err(format!("budget {} exceeds pool size {pool}", self.budget)));
        }
        Ok(())
    }

    /// Queries between regularization searches for this direction's target model.
    pub fn search_cadence(&self) -> usize {
        match self.direction {
            TransferDirection::DeeToCec => self.refit_cadence,
            TransferDirection::CecToDee => self.regression_refit_cadence,
        }
    }

    /// Rough number of target-model fits for the whole suite, including the
    /// cross-validation searches.
    pub fn estimated_fits(&self) -> usize {
        let runs = self.resolved_strategies().len() * self.seeds.len();
        let searches = self.budget / self.search_cadence() + 1;
        let grid = if self.reg_grid.len() > 1 { self.reg_grid.len() * self.cv_folds } else { 0 };
        runs * (self.budget + 1 + searches * grid)
    }
}
