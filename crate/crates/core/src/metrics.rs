//! Accuracy, precision, recall and F1 with micro, macro and weighted
//! averaging, built on a confusion matrix.
//!
//! A score whose denominator is zero (a class that is never predicted, or
//! never present in the gold labels) is reported as 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schema::{LabelId, LabelSchema};

/// `counts[g][p]` = samples with gold class `g` predicted as `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl ConfusionMatrix {
    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold][pred]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes()).map(|k| self.counts[k][k]).sum()
    }

    pub fn true_positives(&self, k: usize) -> u64 {
        self.counts[k][k]
    }

    pub fn false_positives(&self, k: usize) -> u64 {
        self.predicted(k) - self.counts[k][k]
    }

    pub fn false_negatives(&self, k: usize) -> u64 {
        self.support(k) - self.counts[k][k]
    }

    /// Gold count of class `k`.
    pub fn support(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    pub fn predicted(&self, k: usize) -> u64 {
        self.counts.iter().map(|row| row[k]).sum()
    }
}

pub fn confusion(gold: &[LabelId], pred: &[LabelId], c: usize) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut counts = vec![vec![0u64; c]; c];
    for (g, p) in gold.iter().zip(pred) {
        for l in [g, p] {
            if l.0 >= c {
                return Err(Error::LabelOutOfRange {
                    index: l.0,
                    count: c,
                });
            }
        }
        counts[g.0][p.0] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        n: gold.len() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassScores {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Average {
    Micro,
    Macro,
    Weighted,
}

impl Average {
    pub const ALL: [Average; 3] = [Average::Micro, Average::Macro, Average::Weighted];

    pub fn name(self) -> &'static str {
        match self {
            Average::Micro => "micro",
            Average::Macro => "macro",
            Average::Weighted => "weighted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub per_class: Vec<ClassScores>,
    pub micro: Scores,
    #[serde(rename = "macro")]
    pub macro_avg: Scores,
    pub weighted: Scores,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    pub fn averaged(&self, average: Average) -> Scores {
        match average {
            Average::Micro => self.micro,
            Average::Macro => self.macro_avg,
            Average::Weighted => self.weighted,
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

// Counts form of 2PR/(P+R); exact for the micro case where it reduces to
// trace/n.
fn f1_counts(tp: u64, fp: u64, fn_: u64) -> f64 {
    ratio(2 * tp, 2 * tp + fp + fn_)
}

// Order-independent sum: class relabeling must not move averages by an ulp.
fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

pub fn evaluate(gold: &[LabelId], pred: &[LabelId], schema: &LabelSchema) -> Result<EvalReport> {
    let cm = confusion(gold, pred, schema.count())?;
    report_from_confusion(cm, schema)
}

pub fn report_from_confusion(cm: ConfusionMatrix, schema: &LabelSchema) -> Result<EvalReport> {
    if cm.n == 0 {
        return Err(Error::EmptyInput);
    }
    let c = cm.classes();
    let n = cm.n;

    let per_class: Vec<ClassScores> = (0..c)
        .map(|k| {
            let (tp, fp, fn_) = (
                cm.true_positives(k),
                cm.false_positives(k),
                cm.false_negatives(k),
            );
            ClassScores {
                label: schema.name(LabelId(k)).to_string(),
                precision: ratio(tp, tp + fp),
                recall: ratio(tp, tp + fn_),
                f1: f1_counts(tp, fp, fn_),
                support: tp + fn_,
            }
        })
        .collect();

    let tp = cm.trace();
    let fp: u64 = (0..c).map(|k| cm.false_positives(k)).sum();
    let fn_: u64 = (0..c).map(|k| cm.false_negatives(k)).sum();
    let accuracy = ratio(tp, n);
    let micro = Scores {
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        f1: f1_counts(tp, fp, fn_),
    };

    let mean =
        |f: fn(&ClassScores) -> f64| sorted_sum(per_class.iter().map(f).collect()) / c as f64;
    let macro_avg = Scores {
        precision: mean(|s| s.precision),
        recall: mean(|s| s.recall),
        f1: mean(|s| s.f1),
    };

    let support_mean = |f: fn(&ClassScores) -> f64| {
        sorted_sum(per_class.iter().map(|s| f(s) * s.support as f64).collect()) / n as f64
    };
    let weighted = Scores {
        precision: support_mean(|s| s.precision),
        recall: support_mean(|s| s.recall),
        f1: support_mean(|s| s.f1),
    };

    Ok(EvalReport {
        accuracy,
        per_class,
        micro,
        macro_avg,
        weighted,
        confusion: cm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabelCount {
    pub label: String,
    pub count: u64,
    pub fraction: f64,
}

/// Per-label gold counts and fractions. An empty input gives zero counts and
/// zero fractions.
pub fn label_distribution(gold: &[LabelId], schema: &LabelSchema) -> Result<Vec<LabelCount>> {
    let mut counts = vec![0u64; schema.count()];
    for l in gold {
        schema.check(*l)?;
        counts[l.0] += 1;
    }
    let n = gold.len() as u64;
    Ok(schema
        .ids()
        .zip(counts)
        .map(|(id, count)| LabelCount {
            label: schema.name(id).to_string(),
            count,
            fraction: ratio(count, n),
        })
        .collect())
}
