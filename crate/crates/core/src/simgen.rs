//! Seeded synthetic gold labels and model predictions.
//!
//! Gold labels are drawn from the class priors. Each model predicts the gold
//! class with its target accuracy and otherwise a uniformly chosen wrong
//! class, independently of every other model. Probability rows put the
//! largest mass on the predicted class; larger `sharpness` gives more peaked
//! rows. All draws come from a ChaCha8 stream seeded with [`SimSpec::seed`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{GoldDataset, ModelRun, PredictionMatrix};
use crate::schema::LabelId;

/// How correct predictions are assigned to samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Correctness {
    /// Each sample is correct with probability `target_accuracy`.
    #[default]
    Bernoulli,
    /// Exactly `round(target_accuracy * n)` samples are correct, at positions
    /// chosen by a seeded shuffle.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelSpec {
    pub target_accuracy: f64,
    pub sharpness: f64,
    /// Defaults to `sim-NN`.
    pub model_id: Option<String>,
}

impl ModelSpec {
    pub fn new(target_accuracy: f64, sharpness: f64) -> Self {
        Self {
            target_accuracy,
            sharpness,
            model_id: None,
        }
    }

    pub fn named(mut self, id: impl Into<String>) -> Self {
        self.model_id = Some(id.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimSpec {
    pub n: usize,
    pub class_priors: Vec<f64>,
    pub models: Vec<ModelSpec>,
    pub seed: u64,
    pub correctness: Correctness,
}

impl SimSpec {
    pub fn new(n: usize, class_priors: Vec<f64>, models: Vec<ModelSpec>, seed: u64) -> Self {
        Self {
            n,
            class_priors,
            models,
            seed,
            correctness: Correctness::Bernoulli,
        }
    }

    pub fn uniform(n: usize, c: usize, models: Vec<ModelSpec>, seed: u64) -> Self {
        Self::new(n, vec![1.0 / c as f64; c], models, seed)
    }

    pub fn with_correctness(mut self, correctness: Correctness) -> Self {
        self.correctness = correctness;
        self
    }

    pub fn classes(&self) -> usize {
        self.class_priors.len()
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.classes();
        if c < 2 {
            return Err(Error::BadSpec(format!("need at least 2 classes, got {c}")));
        }
        if self.class_priors.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::BadSpec(
                "class priors must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = self.class_priors.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadSpec(format!("class priors sum to {total}")));
        }
        if self.models.is_empty() {
            return Err(Error::BadSpec("no model specs".into()));
        }
        let mut ids = std::collections::HashSet::new();
        for (j, m) in self.models.iter().enumerate() {
            if !(0.0..=1.0).contains(&m.target_accuracy) {
                return Err(Error::BadSpec(format!(
                    "model {j}: target accuracy {} outside [0, 1]",
                    m.target_accuracy
                )));
            }
            if !(m.sharpness.is_finite() && m.sharpness >= 1.0) {
                return Err(Error::BadSpec(format!(
                    "model {j}: sharpness {} must be >= 1",
                    m.sharpness
                )));
            }
            if !ids.insert(self.model_id(j)) {
                return Err(Error::BadSpec(format!(
                    "duplicate model id {:?}",
                    self.model_id(j)
                )));
            }
        }
        Ok(())
    }

    pub fn model_id(&self, j: usize) -> String {
        self.models[j]
            .model_id
            .clone()
            .unwrap_or_else(|| format!("sim-{:02}", j + 1))
    }
}

fn draw_class(rng: &mut ChaCha8Rng, priors: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, p) in priors.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // u landed in the rounding gap above the last cumulative sum
    priors.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

fn wrong_class(rng: &mut ChaCha8Rng, gold: usize, c: usize) -> usize {
    let k = rng.random_range(0..c - 1);
    if k >= gold {
        k + 1
    } else {
        k
    }
}

/// Others get `U[0,1)`, the predicted class gets `sharpness * (1 + U[0,1))`,
/// so it is always the strict maximum.
fn peaked_row(rng: &mut ChaCha8Rng, predicted: usize, c: usize, sharpness: f64) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..c).map(|_| rng.random::<f64>()).collect();
    raw[predicted] = sharpness * (1.0 + raw[predicted]);
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|v| v / sum).collect()
}

/// Generates a gold dataset and one run per model spec. Each run's weight is
/// its realized accuracy on the generated gold labels.
pub fn generate(spec: &SimSpec) -> Result<(GoldDataset, Vec<ModelRun>)> {
    spec.validate()?;
    let c = spec.classes();
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let gold: Vec<usize> = (0..n)
        .map(|_| draw_class(&mut rng, &spec.class_priors))
        .collect();
    let width = n.to_string().len().max(1);
    let ids: Vec<String> = (0..n).map(|i| format!("s{:0width$}", i + 1)).collect();
    let texts: Vec<String> = (0..n)
        .map(|i| format!("synthetic sample {}", i + 1))
        .collect();
    let dataset = GoldDataset::new(ids, texts, gold.iter().copied().map(LabelId).collect())?;

    let mut runs = Vec::with_capacity(spec.models.len());
    for (j, m) in spec.models.iter().enumerate() {
        let correct: Vec<bool> = match spec.correctness {
            Correctness::Bernoulli => (0..n)
                .map(|_| rng.random::<f64>() < m.target_accuracy)
                .collect(),
            Correctness::Exact => {
                let hits = (m.target_accuracy * n as f64).round() as usize;
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                let mut flags = vec![false; n];
                for &i in &order[..hits.min(n)] {
                    flags[i] = true;
                }
                flags
            }
        };
        let mut rows = Vec::with_capacity(n);
        let mut hits = 0usize;
        for i in 0..n {
            let predicted = if correct[i] {
                hits += 1;
                gold[i]
            } else {
                wrong_class(&mut rng, gold[i], c)
            };
            rows.push(peaked_row(&mut rng, predicted, c, m.sharpness));
        }
        let weight = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
        let predictions = PredictionMatrix::from_rows(&rows, c)?;
        runs.push(ModelRun::new(spec.model_id(j), predictions, weight)?);
    }
    Ok((dataset, runs))
}
