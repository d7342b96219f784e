//! Five independent models at 70% accuracy: how much does a majority vote
//! gain over the best single model?

use polarvote::{evaluate, generate, majority_vote, LabelSchema, ModelSpec, SimSpec, TieBreak};

fn main() -> polarvote::Result<()> {
    let schema = LabelSchema::default();
    for seed in 1..=5 {
        let spec = SimSpec::uniform(10_000, 3, vec![ModelSpec::new(0.70, 1.5); 5], seed);
        let (dataset, runs) = generate(&spec)?;
        let best = runs.iter().map(|r| r.weight).fold(0.0, f64::max);
        let refs: Vec<_> = runs.iter().collect();
        let labels = majority_vote(&refs, TieBreak::default())?.labels;
        let acc = evaluate(dataset.gold(), &labels, &schema)?.accuracy;
        println!(
            "seed {seed}: best single {best:.4}, majority {acc:.4}, gain {:+.4}",
            acc - best
        );
    }
    Ok(())
}
