#![allow(dead_code)]

//! Test-only helpers and a brute-force voting reference written without the
//! library's aggregation code.

use polarvote::{LabelId, ModelRun, PredictionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// First index holding the row maximum.
fn first_max(row: &[f64]) -> usize {
    let top = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    row.iter().position(|v| *v == top).unwrap()
}

/// Ranks classes by (score desc, mass desc, index asc) and takes the first.
fn winner(scores: &[f64], mass: &[f64]) -> usize {
    let mut classes: Vec<usize> = (0..scores.len()).collect();
    classes.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap()
            .then(mass[b].partial_cmp(&mass[a]).unwrap())
            .then(a.cmp(&b))
    });
    classes[0]
}

fn by_id<'a>(runs: &[&'a ModelRun]) -> Vec<&'a ModelRun> {
    let mut v = runs.to_vec();
    v.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    v
}

fn column_sum(runs: &[&ModelRun], i: usize, k: usize, f: impl Fn(&ModelRun, f64) -> f64) -> f64 {
    let mut total = 0.0;
    for r in runs {
        total += f(r, r.predictions.row(i)[k]);
    }
    total
}

pub struct OracleOutput {
    pub labels: Vec<LabelId>,
    pub scores: Vec<Vec<f64>>,
}

pub fn oracle_majority(runs: &[&ModelRun]) -> OracleOutput {
    let runs = by_id(runs);
    let (n, c) = (runs[0].predictions.n(), runs[0].predictions.c());
    let mut labels = Vec::new();
    let mut all_scores = Vec::new();
    for i in 0..n {
        let mut votes = vec![0.0; c];
        for r in &runs {
            votes[first_max(r.predictions.row(i))] += 1.0;
        }
        let mass: Vec<f64> = (0..c).map(|k| column_sum(&runs, i, k, |_, p| p)).collect();
        labels.push(LabelId(winner(&votes, &mass)));
        all_scores.push(votes);
    }
    OracleOutput {
        labels,
        scores: all_scores,
    }
}

pub fn oracle_weighted(runs: &[&ModelRun]) -> OracleOutput {
    let runs = by_id(runs);
    let (n, c) = (runs[0].predictions.n(), runs[0].predictions.c());
    let mut labels = Vec::new();
    let mut all_scores = Vec::new();
    for i in 0..n {
        let scores: Vec<f64> = (0..c)
            .map(|k| column_sum(&runs, i, k, |r, p| r.weight * p))
            .collect();
        let mass: Vec<f64> = (0..c).map(|k| column_sum(&runs, i, k, |_, p| p)).collect();
        labels.push(LabelId(winner(&scores, &mass)));
        all_scores.push(scores);
    }
    OracleOutput {
        labels,
        scores: all_scores,
    }
}

pub fn random_row(rng: &mut ChaCha8Rng, c: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..c).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// Rows drawn from a small grid so that exact score ties actually occur.
pub fn coarse_row(rng: &mut ChaCha8Rng, c: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0..4) as f64).collect();
    let s: f64 = raw.iter().sum();
    if s == 0.0 {
        return vec![1.0 / c as f64; c];
    }
    raw.into_iter().map(|v| v / s).collect()
}

pub fn random_bundle(
    rng: &mut ChaCha8Rng,
    models: usize,
    n: usize,
    c: usize,
    coarse: bool,
) -> Vec<ModelRun> {
    (0..models)
        .map(|j| {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    if coarse {
                        coarse_row(rng, c)
                    } else {
                        random_row(rng, c)
                    }
                })
                .collect();
            let weight = rng.random_range(0.05..=1.0);
            ModelRun::new(
                format!("m{j}"),
                PredictionMatrix::from_rows(&rows, c).unwrap(),
                weight,
            )
            .unwrap()
        })
        .collect()
}

pub fn one_hot_run(id: &str, labels: &[usize], c: usize, weight: f64) -> ModelRun {
    let ids: Vec<LabelId> = labels.iter().copied().map(LabelId).collect();
    ModelRun::new(id, PredictionMatrix::one_hot(&ids, c).unwrap(), weight).unwrap()
}
