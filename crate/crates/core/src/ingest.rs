//! Gold datasets (TSV) and per-model prediction files (JSON lines).
//!
//! Dataset files have a header row `id<TAB>text<TAB>label` and one sample per
//! row. Prediction files start with a header record
//! `{"model_id", "weight", "labels"}` followed by one `{"id", "probs"}` record
//! per sample, with `probs` in header label order. Loading is strict: every
//! dataset sample must have exactly one prediction and nothing else may appear.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{LabelId, LabelSchema};

/// Rows whose sum lies within this distance of 1 are renormalized; anything
/// further out is rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

const DATASET_HEADER: [&str; 3] = ["id", "text", "label"];

#[derive(Clone, Debug, PartialEq)]
pub struct GoldDataset {
    ids: Vec<String>,
    texts: Vec<String>,
    gold: Vec<LabelId>,
    index: HashMap<String, usize>,
}

impl GoldDataset {
    pub fn new(ids: Vec<String>, texts: Vec<String>, gold: Vec<LabelId>) -> Result<Self> {
        if ids.len() != texts.len() || ids.len() != gold.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} ids, {} texts, {} labels",
                ids.len(),
                texts.len(),
                gold.len()
            )));
        }
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                // rows are 1-based after the header line
                return Err(Error::DuplicateId {
                    id: id.clone(),
                    line: i + 2,
                });
            }
        }
        Ok(Self {
            ids,
            texts,
            gold,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn texts(&self) -> &[String] {
        &self.texts
    }

    pub fn gold(&self) -> &[LabelId] {
        &self.gold
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }
}

/// Row-major `n x c` matrix of class probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionMatrix {
    probs: Vec<f64>,
    n: usize,
    c: usize,
}

impl PredictionMatrix {
    /// Builds a matrix from rows, checking that entries are finite and
    /// nonnegative and that each row sums to 1 within [`ROW_SUM_TOLERANCE`].
    /// Accepted rows are divided by their own sum.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], c: usize) -> Result<Self> {
        let mut probs = Vec::with_capacity(rows.len() * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            let normalized = normalize_row(row).map_err(|reason| Error::BadProbability {
                id: i.to_string(),
                line: i + 1,
                reason,
            })?;
            probs.extend(normalized);
        }
        Ok(Self {
            probs,
            n: rows.len(),
            c,
        })
    }

    /// One-hot rows for hard labels.
    pub fn one_hot(labels: &[LabelId], c: usize) -> Result<Self> {
        let mut probs = vec![0.0; labels.len() * c];
        for (i, l) in labels.iter().enumerate() {
            if l.0 >= c {
                return Err(Error::LabelOutOfRange {
                    index: l.0,
                    count: c,
                });
            }
            probs[i * c + l.0] = 1.0;
        }
        Ok(Self {
            probs,
            n: labels.len(),
            c,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[i * self.c..(i + 1) * self.c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks_exact(self.c.max(1)).take(self.n)
    }

    /// Argmax of row `i`; ties go to the lowest index.
    pub fn argmax(&self, i: usize) -> LabelId {
        LabelId(argmax_lowest(self.row(i)))
    }

    pub fn argmax_labels(&self) -> Vec<LabelId> {
        (0..self.n).map(|i| self.argmax(i)).collect()
    }
}

pub(crate) fn argmax_lowest(row: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = k;
        }
    }
    best
}

fn normalize_row(row: &[f64]) -> std::result::Result<Vec<f64>, String> {
    if let Some(v) = row.iter().find(|v| !v.is_finite()) {
        return Err(format!("non-finite entry {v}"));
    }
    if let Some(v) = row.iter().find(|v| **v < 0.0) {
        return Err(format!("negative entry {v}"));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(format!("row sums to {sum}"));
    }
    Ok(row.iter().map(|v| v / sum).collect())
}

/// One model's aligned predictions plus its ensemble weight (its accuracy
/// on the training split).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelRun {
    pub model_id: String,
    pub predictions: PredictionMatrix,
    pub weight: f64,
}

impl ModelRun {
    pub fn new(
        model_id: impl Into<String>,
        predictions: PredictionMatrix,
        weight: f64,
    ) -> Result<Self> {
        let model_id = model_id.into();
        if model_id.trim().is_empty() {
            return Err(Error::BadHeader("empty model_id".into()));
        }
        check_weight(weight)?;
        Ok(Self {
            model_id,
            predictions,
            weight,
        })
    }
}

fn check_weight(weight: f64) -> Result<()> {
    if weight.is_finite() && (0.0..=1.0).contains(&weight) {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange(weight))
    }
}

/// Header record of a prediction file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PredictionHeader {
    pub model_id: String,
    pub weight: f64,
    pub labels: Vec<String>,
    /// Generator seed, present on simulated files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PredictionRecord {
    id: String,
    probs: Vec<f64>,
}

pub fn load_dataset(path: impl AsRef<Path>, schema: &LabelSchema) -> Result<GoldDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, schema)
}

pub fn parse_dataset(text: &str, schema: &LabelSchema) -> Result<GoldDataset> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, header)) => {
            let cols: Vec<&str> = header.trim_start_matches('\u{feff}').split('\t').collect();
            if cols != DATASET_HEADER {
                return Err(Error::MalformedRow {
                    line: 1,
                    reason: format!("expected header `id\\ttext\\tlabel`, got {header:?}"),
                });
            }
        }
        None => {
            return Err(Error::MalformedRow {
                line: 1,
                reason: "missing header".into(),
            })
        }
    }

    let mut ids = Vec::new();
    let mut texts = Vec::new();
    let mut gold = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, row) in lines {
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(Error::MalformedRow {
                line,
                reason: "empty id".into(),
            });
        }
        if seen.insert(id.to_string(), line).is_some() {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line,
            });
        }
        let label = schema.parse_label(fields[2]).map_err(|e| match e {
            Error::UnknownLabel { label, .. } => Error::UnknownLabel {
                label,
                line: Some(line),
            },
            other => other,
        })?;
        ids.push(id.to_string());
        texts.push(fields[1].to_string());
        gold.push(label);
    }
    GoldDataset::new(ids, texts, gold)
}

/// Renders a dataset in the TSV format accepted by [`parse_dataset`].
pub fn dataset_to_string(dataset: &GoldDataset, schema: &LabelSchema) -> Result<String> {
    let mut out = DATASET_HEADER.join("\t");
    out.push('\n');
    for ((id, text), label) in dataset.ids.iter().zip(&dataset.texts).zip(&dataset.gold) {
        if [id, text].iter().any(|s| s.contains(['\t', '\n', '\r'])) {
            return Err(Error::Serialize(format!(
                "sample {id:?} contains a tab or line break"
            )));
        }
        schema.check(*label)?;
        out.push_str(id);
        out.push('\t');
        out.push_str(text);
        out.push('\t');
        out.push_str(schema.name(*label));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_dataset(
    path: impl AsRef<Path>,
    dataset: &GoldDataset,
    schema: &LabelSchema,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, dataset_to_string(dataset, schema)?).map_err(|e| Error::io(path, e))
}

pub fn load_predictions(
    path: impl AsRef<Path>,
    dataset: &GoldDataset,
    schema: &LabelSchema,
) -> Result<ModelRun> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, dataset, schema)
}

/// Parses a prediction file, reordering rows to dataset order and columns to
/// schema order.
pub fn parse_predictions(
    text: &str,
    dataset: &GoldDataset,
    schema: &LabelSchema,
) -> Result<ModelRun> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header_line) = lines
        .next()
        .ok_or_else(|| Error::BadHeader("missing header record".into()))?;
    let header: PredictionHeader =
        serde_json::from_str(header_line).map_err(|e| Error::BadHeader(e.to_string()))?;
    if header.model_id.trim().is_empty() {
        return Err(Error::BadHeader("empty model_id".into()));
    }
    check_weight(header.weight)?;
    let columns = column_map(&header.labels, schema)?;

    let c = schema.count();
    let n = dataset.len();
    let mut probs = vec![0.0; n * c];
    let mut filled = vec![false; n];
    for (line, raw) in lines {
        let record: PredictionRecord =
            serde_json::from_str(raw).map_err(|e| Error::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
        let row = dataset
            .position(&record.id)
            .ok_or_else(|| Error::ExtraSample {
                id: record.id.clone(),
                line,
            })?;
        if filled[row] {
            return Err(Error::DuplicateId {
                id: record.id,
                line,
            });
        }
        if record.probs.len() != c {
            return Err(Error::BadProbability {
                id: record.id,
                line,
                reason: format!("{} entries, expected {c}", record.probs.len()),
            });
        }
        let normalized = normalize_row(&record.probs).map_err(|reason| Error::BadProbability {
            id: record.id.clone(),
            line,
            reason,
        })?;
        for (col, v) in columns.iter().zip(normalized) {
            probs[row * c + col] = v;
        }
        filled[row] = true;
    }
    if let Some(missing) = filled.iter().position(|f| !f) {
        return Err(Error::MissingSample(dataset.ids[missing].clone()));
    }

    ModelRun::new(
        header.model_id,
        PredictionMatrix { probs, n, c },
        header.weight,
    )
}

/// Maps header label positions to schema positions. The header must name
/// every schema label exactly once.
pub(crate) fn column_map(labels: &[String], schema: &LabelSchema) -> Result<Vec<usize>> {
    if labels.len() != schema.count() {
        return Err(Error::BadHeader(format!(
            "header lists {} labels, schema has {}",
            labels.len(),
            schema.count()
        )));
    }
    let mut map = Vec::with_capacity(labels.len());
    for name in labels {
        let id = schema
            .parse_label(name)
            .map_err(|_| Error::BadHeader(format!("label {name:?} not in schema")))?;
        if map.contains(&id.0) {
            return Err(Error::BadHeader(format!("label {name:?} listed twice")));
        }
        map.push(id.0);
    }
    Ok(map)
}

/// Renders a run in prediction-file format, rows in dataset order.
pub fn predictions_to_string(
    run: &ModelRun,
    dataset: &GoldDataset,
    schema: &LabelSchema,
    seed: Option<u64>,
) -> Result<String> {
    if run.predictions.n() != dataset.len() || run.predictions.c() != schema.count() {
        return Err(Error::ShapeMismatch(format!(
            "model {:?} is {}x{}, dataset/schema is {}x{}",
            run.model_id,
            run.predictions.n(),
            run.predictions.c(),
            dataset.len(),
            schema.count()
        )));
    }
    let header = PredictionHeader {
        model_id: run.model_id.clone(),
        weight: run.weight,
        labels: schema.labels().to_vec(),
        seed,
    };
    let mut out = to_json_line(&header)?;
    for (id, row) in dataset.ids.iter().zip(run.predictions.rows()) {
        out.push_str(&to_json_line(&PredictionRecord {
            id: id.clone(),
            probs: row.to_vec(),
        })?);
    }
    Ok(out)
}

pub fn write_predictions(
    path: impl AsRef<Path>,
    run: &ModelRun,
    dataset: &GoldDataset,
    schema: &LabelSchema,
    seed: Option<u64>,
) -> Result<()> {
    let path = path.as_ref();
    let text = predictions_to_string(run, dataset, schema, seed)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// A gold dataset plus aligned model runs that agree on shape.
#[derive(Clone, Debug)]
pub struct Bundle {
    pub dataset: GoldDataset,
    pub runs: Vec<ModelRun>,
}

/// Checks that every run has one row per sample and one column per class and
/// that model ids are unique.
pub fn validate_bundle(
    dataset: GoldDataset,
    runs: Vec<ModelRun>,
    schema: &LabelSchema,
) -> Result<Bundle> {
    if runs.is_empty() {
        return Err(Error::EmptyBundle);
    }
    let mut seen = std::collections::HashSet::new();
    for run in &runs {
        if run.predictions.n() != dataset.len() {
            return Err(Error::ShapeMismatch(format!(
                "model {:?} has {} rows, dataset has {} samples",
                run.model_id,
                run.predictions.n(),
                dataset.len()
            )));
        }
        if run.predictions.c() != schema.count() {
            return Err(Error::ShapeMismatch(format!(
                "model {:?} has {} classes, schema has {}",
                run.model_id,
                run.predictions.c(),
                schema.count()
            )));
        }
        if !seen.insert(run.model_id.as_str()) {
            return Err(Error::DuplicateModelId(run.model_id.clone()));
        }
    }
    for l in dataset.gold() {
        schema.check(*l)?;
    }
    Ok(Bundle { dataset, runs })
}
