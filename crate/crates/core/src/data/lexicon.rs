use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Valence, arousal and dominance of eight common emotion categories in the
/// NRC VAD lexicon, on its native [0, 1] scale.
const NRC_VAD: [(&str, [f64; 3]); 8] = [
    ("angry", [0.122, 0.830, 0.604]),
    ("happy", [1.000, 0.735, 0.772]),
    ("sad", [0.225, 0.333, 0.149]),
    ("disgusted", [0.051, 0.773, 0.274]),
    ("fearful", [0.083, 0.482, 0.278]),
    ("surprised", [0.784, 0.855, 0.539]),
    ("frustrated", [0.080, 0.651, 0.255]),
    ("neutral", [0.469, 0.184, 0.357]),
];

/// Per-category dimensional scores. Category names are matched case-insensitively.
#[derive(Clone, Debug, PartialEq)]
pub struct AffectiveNormLexicon<T: Real> {
    entries: BTreeMap<String, Vec<T>>,
    scale: (T, T),
}

impl<T: Real> AffectiveNormLexicon<T> {
    pub fn new(entries: BTreeMap<String, Vec<T>>, scale: (T, T)) -> Result<Self> {
        let (lo, hi) = scale;
        if !(hi > lo) {
            return Err(Error::InvalidArgument(format!("degenerate lexicon scale [{lo}, {hi}]")));
        }
        let mut width = None;
        let mut normalized = BTreeMap::new();
        for (name, scores) in entries {
            if *width.get_or_insert(scores.len()) != scores.len() {
                return Err(Error::InvalidArgument(format!(
                    "lexicon entry `{name}` has {} scores, expected {}",
                    scores.len(),
                    width.unwrap()
                )));
            }
            if let Some(s) = scores.iter().find(|s| !s.finite() || **s < lo || **s > hi) {
                return Err(Error::InvalidArgument(format!(
                    "lexicon score {s} for `{name}` outside [{lo}, {hi}]"
                )));
            }
            normalized.insert(name.to_lowercase(), scores);
        }
        if normalized.is_empty() {
            return Err(Error::EmptyInput("lexicon"));
        }
        Ok(Self { entries: normalized, scale })
    }

    /// The eight-category valence/arousal/dominance table on [0, 1].
    pub fn nrc_vad() -> Self {
        let entries = NRC_VAD
            .iter()
            .map(|(name, s)| (name.to_string(), s.iter().map(|&v| T::lit(v)).collect()))
            .collect();
        Self::new(entries, (T::zero(), T::one())).expect("built-in table is valid")
    }

    pub fn scale(&self) -> (T, T) {
        self.scale
    }

    pub fn n_dimensions(&self) -> usize {
        self.entries.values().next().map_or(0, Vec::len)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, category: &str) -> Result<&[T]> {
        self.entries
            .get(&category.to_lowercase())
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingLexiconEntry(category.to_string()))
    }

    /// Affine map of every score from the current scale onto `target`.
    pub fn rescale(&self, target: (T, T)) -> Result<Self> {
        let (lo, hi) = self.scale;
        let (tlo, thi) = target;
        if !(hi > lo) || !(thi > tlo) {
            return Err(Error::InvalidArgument("rescaling needs non-degenerate intervals".into()));
        }
        let factor = (thi - tlo) / (hi - lo);
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| {
                let mapped = v.iter().map(|&s| (tlo + (s - lo) * factor).clamp(tlo, thi)).collect();
                (k.clone(), mapped)
            })
            .collect();
        Ok(Self { entries, scale: target })
    }

    /// Rows of the lexicon in the order of `emotion_names`.
    pub fn map_for(&self, emotion_names: &[String]) -> Result<LexiconMap<T>> {
        let d = self.n_dimensions();
        let mut rows = DMatrix::zeros(emotion_names.len(), d);
        for (e, name) in emotion_names.iter().enumerate() {
            let scores = self.get(name)?;
            for (k, &s) in scores.iter().enumerate() {
                rows[(e, k)] = s;
            }
        }
        Ok(LexiconMap { rows })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("lexicon JSON must be an object".into()))?;
        let number = |v: &Value, ctx: &str| -> Result<T> {
            v.as_f64()
                .map(T::lit)
                .ok_or_else(|| Error::InvalidArgument(format!("non-numeric value in `{ctx}`")))
        };
        let scale = match obj.get("scale").and_then(Value::as_array) {
            Some(pair) if pair.len() == 2 => (number(&pair[0], "scale")?, number(&pair[1], "scale")?),
            _ => return Err(Error::InvalidArgument("lexicon needs \"scale\": [lo, hi]".into())),
        };
        let mut entries = BTreeMap::new();
        for (name, scores) in obj.iter().filter(|(k, _)| k.as_str() != "scale") {
            let arr = scores
                .as_array()
                .ok_or_else(|| Error::InvalidArgument(format!("entry `{name}` is not an array")))?;
            let parsed = arr.iter().map(|v| number(v, name)).collect::<Result<Vec<T>>>()?;
            entries.insert(name.clone(), parsed);
        }
        Self::new(entries, scale)
    }

    pub fn to_json_string(&self) -> String {
        let mut obj = Map::new();
        for (k, v) in &self.entries {
            obj.insert(k.clone(), Value::from(v.iter().map(|s| s.as_f64()).collect::<Vec<_>>()));
        }
        obj.insert("scale".into(), Value::from(vec![self.scale.0.as_f64(), self.scale.1.as_f64()]));
        serde_json::to_string_pretty(&Value::Object(obj)).expect("plain JSON values serialize")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}

/// Lexicon rows aligned with a dataset's emotion set (|E| x |D|).
#[derive(Clone, Debug, PartialEq)]
pub struct LexiconMap<T: Real> {
    rows: DMatrix<T>,
}

impl<T: Real> LexiconMap<T> {
    pub fn from_rows(rows: DMatrix<T>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &DMatrix<T> {
        &self.rows
    }

    pub fn n_classes(&self) -> usize {
        self.rows.nrows()
    }

    pub fn n_dimensions(&self) -> usize {
        self.rows.ncols()
    }
}
