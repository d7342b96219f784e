//! Hard majority voting, accuracy-weighted soft voting and top-k selection.
//!
//! Weighted voting scores class `c` of sample `i` as `sum_j a_j * p_ij[c]`,
//! where `a_j` is model `j`'s weight (its training accuracy), and predicts the
//! argmax. Majority voting gives each model one vote for its own argmax.
//!
//! Ties on the aggregate score go to the class with the greater total
//! probability mass over the contributing models, then to the lowest class
//! index. Sums are always folded in ascending `model_id` order so results do
//! not depend on the order runs are passed in.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{column_map, to_json_line, GoldDataset, ModelRun};
use crate::metrics::{evaluate, EvalReport};
use crate::schema::{LabelId, LabelSchema};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Method {
    #[value(name = "majority")]
    #[serde(rename = "majority")]
    MajorityVoted,
    #[value(name = "weighted")]
    #[serde(rename = "weighted")]
    Weighted,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MajorityVoted => "majority",
            Method::Weighted => "weighted",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Method::MajorityVoted => "Majority Voted",
            Method::Weighted => "Weighted",
        }
    }
}

/// Number of top-weighted models to ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TopK {
    Count(usize),
    All,
}

impl TopK {
    pub fn resolve(self, available: usize) -> Result<usize> {
        match self {
            TopK::All => Ok(available),
            TopK::Count(0) => Err(Error::EmptyBundle),
            TopK::Count(k) if k > available => Err(Error::KTooLarge { k, available }),
            TopK::Count(k) => Ok(k),
        }
    }
}

impl fmt::Display for TopK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopK::Count(k) => write!(f, "{k}"),
            TopK::All => f.write_str("all"),
        }
    }
}

impl FromStr for TopK {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(TopK::All);
        }
        match s.parse::<usize>() {
            Ok(0) => Err("top-k must be at least 1".into()),
            Ok(k) => Ok(TopK::Count(k)),
            Err(_) => Err(format!("expected a positive integer or `all`, got {s:?}")),
        }
    }
}

impl Serialize for TopK {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TopK {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TieBreak {
    /// Greatest summed probability mass, then lowest class index.
    #[default]
    #[serde(rename = "mass-then-lowest-id")]
    MassThenLowestId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub method: Method,
    pub top_k: TopK,
    pub tie_break: TieBreak,
}

impl EnsembleConfig {
    pub fn new(method: Method, top_k: TopK) -> Self {
        Self {
            method,
            top_k,
            tie_break: TieBreak::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsemblePrediction {
    pub labels: Vec<LabelId>,
    /// Row-major `n x c` aggregate scores; vote counts for majority voting.
    scores: Vec<f64>,
    c: usize,
    pub contributing_models: Vec<String>,
}

impl EnsemblePrediction {
    pub fn scores(&self, i: usize) -> &[f64] {
        &self.scores[i * self.c..(i + 1) * self.c]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// The `k` runs with the highest weight, descending; equal weights are
/// ordered by ascending `model_id`.
pub fn rank_models(runs: &[ModelRun], k: TopK) -> Result<Vec<&ModelRun>> {
    let k = k.resolve(runs.len())?;
    let mut ranked: Vec<&ModelRun> = runs.iter().collect();
    ranked.sort_by(|a, b| {
        b.weight
            .total_cmp(&a.weight)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    ranked.truncate(k);
    Ok(ranked)
}

/// Runs in summation order, after checking they agree on shape.
fn canonical<'a>(runs: &[&'a ModelRun]) -> Result<(Vec<&'a ModelRun>, usize, usize)> {
    let first = runs.first().ok_or(Error::EmptyBundle)?;
    let (n, c) = (first.predictions.n(), first.predictions.c());
    for r in runs {
        if r.predictions.n() != n || r.predictions.c() != c {
            return Err(Error::ShapeMismatch(format!(
                "model {:?} is {}x{}, expected {n}x{c}",
                r.model_id,
                r.predictions.n(),
                r.predictions.c()
            )));
        }
    }
    let mut sorted = runs.to_vec();
    sorted.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    Ok((sorted, n, c))
}

fn pick(scores: &[f64], mass: &[f64], _policy: TieBreak) -> LabelId {
    let mut best = 0;
    for k in 1..scores.len() {
        let better =
            scores[k] > scores[best] || (scores[k] == scores[best] && mass[k] > mass[best]);
        if better {
            best = k;
        }
    }
    LabelId(best)
}

fn aggregate<F>(
    runs: &[&ModelRun],
    tie_break: TieBreak,
    contribution: F,
) -> Result<EnsemblePrediction>
where
    F: Fn(&ModelRun, &[f64], &mut [f64]),
{
    let contributing_models = runs.iter().map(|r| r.model_id.clone()).collect();
    let (ordered, n, c) = canonical(runs)?;
    let mut scores = vec![0.0; n * c];
    let mut labels = Vec::with_capacity(n);
    let mut mass = vec![0.0; c];
    for i in 0..n {
        let row_scores = &mut scores[i * c..(i + 1) * c];
        mass.iter_mut().for_each(|m| *m = 0.0);
        for run in &ordered {
            let row = run.predictions.row(i);
            contribution(run, row, row_scores);
            for (m, p) in mass.iter_mut().zip(row) {
                *m += p;
            }
        }
        labels.push(pick(row_scores, &mass, tie_break));
    }
    Ok(EnsemblePrediction {
        labels,
        scores,
        c,
        contributing_models,
    })
}

pub fn majority_vote(runs: &[&ModelRun], tie_break: TieBreak) -> Result<EnsemblePrediction> {
    aggregate(runs, tie_break, |_, row, scores| {
        scores[crate::ingest::argmax_lowest(row)] += 1.0;
    })
}

pub fn weighted_vote(runs: &[&ModelRun], tie_break: TieBreak) -> Result<EnsemblePrediction> {
    if runs.is_empty() {
        return Err(Error::EmptyBundle);
    }
    if let Some(r) = runs
        .iter()
        .find(|r| !(r.weight.is_finite() && r.weight >= 0.0))
    {
        return Err(Error::WeightOutOfRange(r.weight));
    }
    if runs.iter().all(|r| r.weight == 0.0) {
        return Err(Error::AllZeroWeights);
    }
    aggregate(runs, tie_break, |run, row, scores| {
        for (s, p) in scores.iter_mut().zip(row) {
            *s += run.weight * p;
        }
    })
}

pub fn vote(runs: &[&ModelRun], method: Method, tie_break: TieBreak) -> Result<EnsemblePrediction> {
    match method {
        Method::MajorityVoted => majority_vote(runs, tie_break),
        Method::Weighted => weighted_vote(runs, tie_break),
    }
}

/// Selects the top-k runs, votes, and scores the result against the gold
/// labels.
pub fn run_ensemble(
    runs: &[ModelRun],
    dataset: &GoldDataset,
    schema: &LabelSchema,
    config: &EnsembleConfig,
) -> Result<(EnsemblePrediction, EvalReport)> {
    let selected = rank_models(runs, config.top_k)?;
    let prediction = vote(&selected, config.method, config.tie_break)?;
    let report = evaluate(dataset.gold(), &prediction.labels, schema)?;
    Ok((prediction, report))
}

/// Header record of an ensemble output file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EnsembleHeader {
    pub model_id: String,
    pub method: Method,
    pub top_k: TopK,
    pub tie_break: TieBreak,
    pub contributing_models: Vec<String>,
    pub labels: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EnsembleRecord {
    id: String,
    scores: Vec<f64>,
    label: String,
}

pub fn ensemble_model_id(config: &EnsembleConfig) -> String {
    format!("ensemble-{}-top{}", config.method.name(), config.top_k)
}

pub fn ensemble_to_string(
    prediction: &EnsemblePrediction,
    dataset: &GoldDataset,
    schema: &LabelSchema,
    config: &EnsembleConfig,
) -> Result<String> {
    if prediction.len() != dataset.len() || prediction.c != schema.count() {
        return Err(Error::ShapeMismatch(format!(
            "ensemble output is {}x{}, dataset/schema is {}x{}",
            prediction.len(),
            prediction.c,
            dataset.len(),
            schema.count()
        )));
    }
    let header = EnsembleHeader {
        model_id: ensemble_model_id(config),
        method: config.method,
        top_k: config.top_k,
        tie_break: config.tie_break,
        contributing_models: prediction.contributing_models.clone(),
        labels: schema.labels().to_vec(),
    };
    let mut out = to_json_line(&header)?;
    for (i, id) in dataset.ids().iter().enumerate() {
        out.push_str(&to_json_line(&EnsembleRecord {
            id: id.clone(),
            scores: prediction.scores(i).to_vec(),
            label: schema.name(prediction.labels[i]).to_string(),
        })?);
    }
    Ok(out)
}

/// Reads an ensemble output file back, rows in dataset order.
pub fn parse_ensemble(
    text: &str,
    dataset: &GoldDataset,
    schema: &LabelSchema,
) -> Result<(EnsembleHeader, EnsemblePrediction)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines
        .next()
        .ok_or_else(|| Error::BadHeader("missing header record".into()))?;
    let header: EnsembleHeader =
        serde_json::from_str(head).map_err(|e| Error::BadHeader(e.to_string()))?;
    let columns = column_map(&header.labels, schema)?;
    let (n, c) = (dataset.len(), schema.count());
    let mut scores = vec![0.0; n * c];
    let mut labels = vec![None; n];
    for (line, raw) in lines {
        let rec: EnsembleRecord = serde_json::from_str(raw).map_err(|e| Error::MalformedRow {
            line,
            reason: e.to_string(),
        })?;
        let row = dataset
            .position(&rec.id)
            .ok_or_else(|| Error::ExtraSample {
                id: rec.id.clone(),
                line,
            })?;
        if labels[row].is_some() {
            return Err(Error::DuplicateId { id: rec.id, line });
        }
        if rec.scores.len() != c {
            return Err(Error::MalformedRow {
                line,
                reason: format!("{} scores, expected {c}", rec.scores.len()),
            });
        }
        for (col, v) in columns.iter().zip(&rec.scores) {
            scores[row * c + col] = *v;
        }
        let label = schema
            .parse_label(&rec.label)
            .map_err(|_| Error::UnknownLabel {
                label: rec.label.clone(),
                line: Some(line),
            })?;
        labels[row] = Some(label);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::MissingSample(dataset.ids()[i].clone())))
        .collect::<Result<Vec<_>>>()?;
    let prediction = EnsemblePrediction {
        labels,
        scores,
        c,
        contributing_models: header.contributing_models.clone(),
    };
    Ok((header, prediction))
}
