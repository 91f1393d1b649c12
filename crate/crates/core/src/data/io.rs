use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column roles of a label CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelSchema {
    /// Column holding emotion category names.
    #[serde(default)]
    pub class_column: Option<String>,
    /// Declared emotion set; class names map to indices in this order.
    #[serde(default)]
    pub emotion_names: Vec<String>,
    /// Columns holding dimensional scores, in dimension order.
    #[serde(default)]
    pub dimension_columns: Vec<String>,
    /// Interval the dimensional scores live in.
    #[serde(default)]
    pub dim_scale: Option<(f64, f64)>,
    #[serde(default)]
    pub group_column: Option<String>,
}

fn parse_err(path: &Path, line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        column,
        message: message.into(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?)
}

fn read_features<T: Real>(path: &Path) -> Result<DMatrix<T>> {
    let mut rdr = reader(path)?;
    let width = rdr.headers()?.len();
    if width == 0 {
        return Err(parse_err(path, 1, 1, "feature file has no columns"));
    }
    let mut values = Vec::new();
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(parse_err(
                path,
                line,
                rec.len().min(width) + 1,
                format!("ragged row: {} cells, header has {width}", rec.len()),
            ));
        }
        for (j, cell) in rec.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(path, line, j + 1, format!("non-numeric cell `{cell}`")))?;
            if !v.is_finite() {
                return Err(parse_err(path, line, j + 1, format!("non-finite cell `{cell}`")));
            }
            values.push(T::lit(v));
        }
        rows += 1;
    }
    Ok(DMatrix::from_row_iterator(rows, width, values))
}

struct LabelColumns {
    class: Option<usize>,
    dims: Vec<usize>,
    group: Option<usize>,
}

fn locate(headers: &csv::StringRecord, path: &Path, schema: &LabelSchema) -> Result<LabelColumns> {
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(path, 1, 1, format!("missing label column `{name}`")))
    };
    Ok(LabelColumns {
        class: schema.class_column.as_deref().map(find).transpose()?,
        dims: schema.dimension_columns.iter().map(|c| find(c)).collect::<Result<_>>()?,
        group: schema.group_column.as_deref().map(find).transpose()?,
    })
}

/// Reads a feature CSV and a label CSV (both with header rows) into a dataset.
pub fn load_dataset<T: Real>(
    features_path: &Path,
    labels_path: &Path,
    schema: &LabelSchema,
) -> Result<Dataset<T>> {
    let features = read_features::<T>(features_path)?;
    let path = labels_path;
    let mut rdr = reader(path)?;
    let cols = locate(rdr.headers()?, path, schema)?;
    if cols.class.is_some() && schema.emotion_names.is_empty() {
        return Err(Error::InvalidArgument("class column given without an emotion set".into()));
    }

    let mut classes = Vec::new();
    let mut dims = Vec::new();
    let mut groups = Vec::new();
    let mut rows = 0usize;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |j: usize| -> Result<&str> {
            rec.get(j).ok_or_else(|| parse_err(path, line, j + 1, "ragged row: missing cell"))
        };
        if let Some(j) = cols.class {
            let token = cell(j)?;
            let idx = schema
                .emotion_names
                .iter()
                .position(|e| e.eq_ignore_ascii_case(token))
                .ok_or_else(|| parse_err(path, line, j + 1, format!("unknown class name `{token}`")))?;
            classes.push(idx);
        }
        for &j in &cols.dims {
            let token = cell(j)?;
            let v: f64 = token
                .parse()
                .map_err(|_| parse_err(path, line, j + 1, format!("non-numeric cell `{token}`")))?;
            dims.push(T::lit(v));
        }
        if let Some(j) = cols.group {
            let token = cell(j)?;
            let g: i64 = token
                .parse()
                .map_err(|_| parse_err(path, line, j + 1, format!("non-integer group `{token}`")))?;
            groups.push(g);
        }
        rows += 1;
    }
    if rows != features.nrows() {
        return Err(parse_err(
            path,
            rows as u64 + 1,
            1,
            format!("label file has {rows} rows, feature file has {}", features.nrows()),
        ));
    }

    let mut ds = Dataset::new(features).with_emotion_names(schema.emotion_names.clone());
    if cols.class.is_some() {
        ds = ds.with_cat_labels(classes, schema.emotion_names.clone())?;
    }
    if !cols.dims.is_empty() {
        let scale = schema
            .dim_scale
            .ok_or_else(|| Error::InvalidArgument("dimension columns need a dim_scale".into()))?;
        let y = DMatrix::from_row_iterator(rows, cols.dims.len(), dims);
        ds = ds.with_dim_labels(y, schema.dimension_columns.clone(), (T::lit(scale.0), T::lit(scale.1)))?;
    }
    if cols.group.is_some() {
        ds = ds.with_groups(groups)?;
    }
    Ok(ds)
}

/// Writes `ds` as a feature CSV and a label CSV and returns the schema that
/// reads them back.
pub fn write_dataset<T: Real>(
    ds: &Dataset<T>,
    features_path: &Path,
    labels_path: &Path,
) -> Result<LabelSchema> {
    let mut w = csv::Writer::from_path(features_path)?;
    w.write_record((0..ds.n_features()).map(|j| format!("f{j}")))?;
    for i in 0..ds.n_rows() {
        w.write_record(ds.features().row(i).iter().map(|v| v.as_f64().to_string()))?;
    }
    w.flush()?;

    let mut header = Vec::new();
    if ds.cat_labels().is_some() {
        header.push("class".to_string());
    }
    header.extend(ds.dimension_names().iter().cloned());
    if ds.group_ids().is_some() {
        header.push("group".to_string());
    }
    let mut w = csv::Writer::from_path(labels_path)?;
    w.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut row = Vec::with_capacity(header.len());
        if let Some(c) = ds.cat_labels() {
            row.push(ds.emotion_names()[c[i]].clone());
        }
        if let Some(y) = ds.dim_labels() {
            row.extend(y.row(i).iter().map(|v| v.as_f64().to_string()));
        }
        if let Some(g) = ds.group_ids() {
            row.push(g[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    Ok(LabelSchema {
        class_column: ds.cat_labels().map(|_| "class".to_string()),
        emotion_names: ds.emotion_names().to_vec(),
        dimension_columns: ds.dimension_names().to_vec(),
        dim_scale: ds.dim_scale().map(|(lo, hi)| (lo.as_f64(), hi.as_f64())),
        group_column: ds.group_ids().map(|_| "group".to_string()),
    })
}

/// Paths of a feature/label CSV pair plus the schema of the label file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetFiles {
    pub features: PathBuf,
    pub labels: PathBuf,
    pub schema: LabelSchema,
}

impl DatasetFiles {
    pub fn load<T: Real>(&self) -> Result<Dataset<T>> {
        load_dataset(&self.features, &self.labels, &self.schema)
    }
}
