use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Feature matrix with optional categorical labels, dimensional labels and
/// session/group keys. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T: Real> {
    features: DMatrix<T>,
    cat_labels: Option<Vec<usize>>,
    dim_labels: Option<DMatrix<T>>,
    dim_scale: Option<(T, T)>,
    group_ids: Option<Vec<i64>>,
    emotion_names: Vec<String>,
    dimension_names: Vec<String>,
}

impl<T: Real> Dataset<T> {
    pub fn new(features: DMatrix<T>) -> Self {
        Self {
            features,
            cat_labels: None,
            dim_labels: None,
            dim_scale: None,
            group_ids: None,
            emotion_names: Vec::new(),
            dimension_names: Vec::new(),
        }
    }

    pub fn with_cat_labels(mut self, labels: Vec<usize>, emotion_names: Vec<String>) -> Result<Self> {
        self.check_rows("categorical labels", labels.len())?;
        if emotion_names.is_empty() {
            return Err(Error::InvalidArgument("emotion set is empty".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= emotion_names.len()) {
            return Err(Error::InvalidArgument(format!(
                "class index {bad} outside emotion set of size {}",
                emotion_names.len()
            )));
        }
        self.cat_labels = Some(labels);
        self.emotion_names = emotion_names;
        Ok(self)
    }

    /// Emotion names without attaching labels, e.g. for an unlabeled pool.
    pub fn with_emotion_names(mut self, emotion_names: Vec<String>) -> Self {
        self.emotion_names = emotion_names;
        self
    }

    pub fn with_dim_labels(
        mut self,
        labels: DMatrix<T>,
        dimension_names: Vec<String>,
        scale: (T, T),
    ) -> Result<Self> {
        self.check_rows("dimensional labels", labels.nrows())?;
        if labels.ncols() != dimension_names.len() {
            return Err(Error::DimensionMismatch {
                what: "dimension names",
                expected: labels.ncols(),
                found: dimension_names.len(),
            });
        }
        let (lo, hi) = scale;
        if !(hi > lo) {
            return Err(Error::InvalidArgument(format!("degenerate label interval [{lo}, {hi}]")));
        }
        if let Some(v) = labels.iter().find(|v| !v.finite() || **v < lo || **v > hi) {
            return Err(Error::InvalidArgument(format!(
                "dimensional label {v} outside declared interval [{lo}, {hi}]"
            )));
        }
        self.dim_labels = Some(labels);
        self.dimension_names = dimension_names;
        self.dim_scale = Some(scale);
        Ok(self)
    }

    pub fn with_groups(mut self, group_ids: Vec<i64>) -> Result<Self> {
        self.check_rows("group ids", group_ids.len())?;
        self.group_ids = Some(group_ids);
        Ok(self)
    }

    fn check_rows(&self, what: &'static str, found: usize) -> Result<()> {
        if found != self.features.nrows() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.features.nrows(),
                found,
            });
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<T> {
        &self.features
    }

    pub fn cat_labels(&self) -> Option<&[usize]> {
        self.cat_labels.as_deref()
    }

    pub fn dim_labels(&self) -> Option<&DMatrix<T>> {
        self.dim_labels.as_ref()
    }

    pub fn dim_scale(&self) -> Option<(T, T)> {
        self.dim_scale
    }

    pub fn group_ids(&self) -> Option<&[i64]> {
        self.group_ids.as_deref()
    }

    pub fn emotion_names(&self) -> &[String] {
        &self.emotion_names
    }

    pub fn dimension_names(&self) -> &[String] {
        &self.dimension_names
    }

    pub fn n_classes(&self) -> usize {
        self.emotion_names.len()
    }

    /// One-hot expansion of the categorical labels (N x |E|).
    pub fn one_hot(&self) -> Option<DMatrix<T>> {
        let labels = self.cat_labels.as_ref()?;
        let mut out = DMatrix::zeros(labels.len(), self.emotion_names.len());
        for (i, &c) in labels.iter().enumerate() {
            out[(i, c)] = T::one();
        }
        Some(out)
    }

    /// Same dataset with the feature matrix swapped out (row count must match).
    pub fn with_features(&self, features: DMatrix<T>) -> Result<Self> {
        self.check_rows("replacement features", features.nrows())?;
        let mut out = self.clone();
        out.features = features;
        Ok(out)
    }

    /// Rows in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset<T> {
        Dataset {
            features: self.features.select_rows(rows.iter()),
            cat_labels: self.cat_labels.as_ref().map(|l| rows.iter().map(|&r| l[r]).collect()),
            dim_labels: self.dim_labels.as_ref().map(|l| l.select_rows(rows.iter())),
            dim_scale: self.dim_scale,
            group_ids: self.group_ids.as_ref().map(|g| rows.iter().map(|&r| g[r]).collect()),
            emotion_names: self.emotion_names.clone(),
            dimension_names: self.dimension_names.clone(),
        }
    }

    /// Splits into (rows whose group is in `source_groups`, the rest), keeping
    /// the original row order within each part.
    pub fn split_by_groups(&self, source_groups: &[i64]) -> Result<(Dataset<T>, Dataset<T>)> {
        let groups = self
            .group_ids
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("dataset has no group ids".into()))?;
        let observed: BTreeSet<i64> = groups.iter().copied().collect();
        let wanted: BTreeSet<i64> = source_groups.iter().copied().collect();
        if wanted.is_empty() {
            return Err(Error::InvalidArgument("source group set is empty".into()));
        }
        if let Some(&g) = wanted.iter().find(|g| !observed.contains(g)) {
            return Err(Error::UnknownGroup(g));
        }
        if wanted.len() == observed.len() {
            return Err(Error::InvalidArgument(
                "source groups must be a strict subset of the observed groups".into(),
            ));
        }
        let (src, tgt): (Vec<usize>, Vec<usize>) =
            (0..self.n_rows()).partition(|&i| wanted.contains(&groups[i]));
        Ok((self.subset(&src), self.subset(&tgt)))
    }
}
