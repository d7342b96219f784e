//! Majority voting and accuracy-weighted soft voting on the same two-model
//! bundle, where they disagree.

use polarvote::{majority_vote, weighted_vote, LabelSchema, ModelRun, PredictionMatrix, TieBreak};

fn main() -> polarvote::Result<()> {
    let schema = LabelSchema::default();
    let a = ModelRun::new(
        "a",
        PredictionMatrix::from_rows(&[[0.5, 0.3, 0.2], [0.1, 0.1, 0.8]], 3)?,
        0.6,
    )?;
    let b = ModelRun::new(
        "b",
        PredictionMatrix::from_rows(&[[0.2, 0.6, 0.2], [0.2, 0.5, 0.3]], 3)?,
        0.4,
    )?;
    let c = ModelRun::new(
        "c",
        PredictionMatrix::from_rows(&[[0.1, 0.7, 0.2], [0.1, 0.3, 0.6]], 3)?,
        0.3,
    )?;

    let pair = [&a, &b];
    let soft = weighted_vote(&pair, TieBreak::default())?;
    println!(
        "weighted (a, b), sample 0: scores {:?} -> {}",
        soft.scores(0),
        schema.name(soft.labels[0])
    );

    // one vote each: the tie goes to the class with more probability mass
    let hard = majority_vote(&pair, TieBreak::default())?;
    println!(
        "majority (a, b), sample 0: votes {:?} -> {}",
        hard.scores(0),
        schema.name(hard.labels[0])
    );

    let all = [&a, &b, &c];
    for (name, out) in [
        ("majority", majority_vote(&all, TieBreak::default())?),
        ("weighted", weighted_vote(&all, TieBreak::default())?),
    ] {
        let labels: Vec<&str> = out.labels.iter().map(|l| schema.name(*l)).collect();
        println!("{name} (a, b, c): {labels:?}");
    }
    Ok(())
}
