use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::{AffectiveNormLexicon, Dataset};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Real;

/// Interval of the generated dimensional labels.
pub const LABEL_SCALE: (f64, f64) = (1.0, 5.0);
/// Number of synthetic recording sessions; rows cycle through ids 1..=5.
pub const N_SESSIONS: usize = 5;
pub const DIMENSION_NAMES: [&str; 3] = ["valence", "arousal", "dominance"];

/// Parameters of the synthetic emotion corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub n_samples: usize,
    pub classes: Vec<String>,
    /// Relative class frequencies aligned with `classes`; `None` draws
    /// classes uniformly.
    pub class_weights: Option<Vec<f64>>,
    /// Standard deviation of the per-sample deviation from the class's lexicon row.
    pub label_sigma: f64,
    /// Standard deviation of the additive feature noise.
    pub feature_sigma: f64,
    /// Scale of the class-specific feature offsets.
    pub class_separation: f64,
    pub feature_dim: usize,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_samples: 1500,
            classes: ["angry", "happy", "sad", "frustrated", "neutral"].map(String::from).to_vec(),
            class_weights: Some(vec![289.0, 947.0, 608.0, 971.0, 1099.0]),
            label_sigma: 0.4,
            feature_sigma: 1.5,
            class_separation: 0.3,
            feature_dim: 50,
            seed: 0,
        }
    }
}

/// Random structure shared by every sample drawn from one corpus: the
/// label-to-feature map and the class offsets.
struct Generator {
    classes: Vec<String>,
    class_rows: Vec<[f64; 3]>,
    mixing: DMatrix<f64>,
    offsets: DMatrix<f64>,
    cumulative_weights: Option<Vec<f64>>,
    label_sigma: f64,
    feature_sigma: f64,
}

impl Generator {
    fn new(config: &CorpusConfig) -> Result<Self> {
        if config.classes.is_empty() {
            return Err(Error::InvalidArgument("corpus needs at least one class".into()));
        }
        if config.feature_dim == 0 {
            return Err(Error::InvalidArgument("corpus feature dimension must be positive".into()));
        }
        if !(config.label_sigma >= 0.0 && config.feature_sigma >= 0.0 && config.class_separation >= 0.0) {
            return Err(Error::InvalidArgument("corpus noise levels must be nonnegative".into()));
        }
        let cumulative_weights = match &config.class_weights {
            None => None,
            Some(w) if w.len() != config.classes.len() => {
                return Err(Error::DimensionMismatch {
                    what: "class weights",
                    expected: config.classes.len(),
                    found: w.len(),
                })
            }
            Some(w) => {
                if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || !(w.iter().sum::<f64>() > 0.0) {
                    return Err(Error::InvalidArgument("class weights must be nonnegative with a positive sum".into()));
                }
                let total: f64 = w.iter().sum();
                let mut acc = 0.0;
                Some(w.iter().map(|v| {
                    acc += v / total;
                    acc
                }).collect())
            }
        };
        let lexicon = AffectiveNormLexicon::<f64>::nrc_vad().rescale(LABEL_SCALE)?;
        let mut class_rows = Vec::with_capacity(config.classes.len());
        for name in &config.classes {
            let row = lexicon.get(name).map_err(|_| Error::MissingLexiconEntry(name.clone()))?;
            class_rows.push([row[0], row[1], row[2]]);
        }
        let mut rng = SeededRng::for_stream(config.seed, 0);
        let f = config.feature_dim;
        let mixing = DMatrix::from_fn(f, 3, |_, _| rng.normal());
        let sep = config.class_separation;
        let offsets = DMatrix::from_fn(f, class_rows.len(), |_, _| sep * rng.normal());
        Ok(Self {
            classes: config.classes.iter().map(|c| c.to_lowercase()).collect(),
            class_rows,
            cumulative_weights,
            mixing,
            offsets,
            label_sigma: config.label_sigma,
            feature_sigma: config.feature_sigma,
        })
    }

    fn sample<T: Real>(&self, n: usize, shift: Option<&[f64]>, rng: &mut SeededRng) -> Result<Dataset<T>> {
        let f = self.mixing.nrows();
        let (lo, hi) = LABEL_SCALE;
        let mut classes = Vec::with_capacity(n);
        let mut dims = DMatrix::<f64>::zeros(n, 3);
        let mut features = DMatrix::<f64>::zeros(n, f);
        for i in 0..n {
            let e = match &self.cumulative_weights {
                None => rng.below(self.class_rows.len()),
                Some(cum) => {
                    let u = rng.uniform();
                    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
                }
            };
            classes.push(e);
            for d in 0..3 {
                dims[(i, d)] = (self.class_rows[e][d] + self.label_sigma * rng.normal()).clamp(lo, hi);
            }
            for j in 0..f {
                let mut v = self.offsets[(j, e)] + self.feature_sigma * rng.normal();
                for d in 0..3 {
                    v += self.mixing[(j, d)] * dims[(i, d)];
                }
                if let Some(s) = shift {
                    v += s[j];
                }
                features[(i, j)] = v;
            }
        }
        Dataset::new(features.map(T::lit))
            .with_cat_labels(classes, self.classes.clone())?
            .with_dim_labels(dims.map(T::lit), DIMENSION_NAMES.map(String::from).to_vec(), (T::lit(lo), T::lit(hi)))?
            .with_groups((0..n).map(|i| (i % N_SESSIONS) as i64 + 1).collect())
    }
}

/// Synthetic corpus carrying both label kinds. Each sample draws a class
/// (uniformly, or by `class_weights`), takes that class's lexicon row on [1, 5] plus Gaussian noise
/// (clipped to [1, 5]) as its dimensional label, and gets features
/// `A * label + offset[class] + noise` with a seeded random `A`.
pub fn generate_synthetic_corpus<T: Real>(config: &CorpusConfig) -> Result<Dataset<T>> {
    let generator = Generator::new(config)?;
    generator.sample(config.n_samples, None, &mut SeededRng::for_stream(config.seed, 1))
}

/// Two corpora sharing label-to-feature structure, the second translated by
/// a random constant vector of Euclidean norm `shift`. Both have
/// `config.n_samples` rows.
pub fn generate_domain_pair<T: Real>(config: &CorpusConfig, shift: f64) -> Result<(Dataset<T>, Dataset<T>)> {
    let generator = Generator::new(config)?;
    let source = generator.sample(config.n_samples, None, &mut SeededRng::for_stream(config.seed, 1))?;
    let mut rng = SeededRng::for_stream(config.seed, 3);
    let mut offset: Vec<f64> = (0..config.feature_dim).map(|_| rng.normal()).collect();
    let norm = offset.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut offset {
        *v *= shift / norm;
    }
    let target = generator.sample(config.n_samples, Some(&offset), &mut SeededRng::for_stream(config.seed, 2))?;
    Ok((source, target))
}
