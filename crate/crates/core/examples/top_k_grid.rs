//! Ranks simulated models by weight and runs both voting methods for
//! k = 3, 5 and all, printing the same grid as `polarvote report`.

use polarvote::report::{ensemble_table, model_table};
use polarvote::{
    evaluate, generate, rank_models, run_ensemble, Average, EnsembleConfig, LabelSchema, Method,
    ModelSpec, SimSpec, TopK,
};

fn main() -> polarvote::Result<()> {
    let schema = LabelSchema::default();
    let accs = [0.55, 0.70, 0.67, 0.64, 0.67, 0.66, 0.69, 0.70, 0.68];
    let models = accs
        .iter()
        .enumerate()
        .map(|(j, a)| ModelSpec::new(*a, 1.0 + j as f64 * 0.5))
        .collect();
    let (dataset, runs) = generate(&SimSpec::new(3000, vec![0.44, 0.19, 0.37], models, 11))?;

    let mut per_model = Vec::new();
    for run in &runs {
        per_model.push((
            run.model_id.as_str(),
            evaluate(dataset.gold(), &run.predictions.argmax_labels(), &schema)?,
        ));
    }
    let rows: Vec<(&str, &_)> = per_model.iter().map(|(id, r)| (*id, r)).collect();
    print!("{}", model_table(&rows, &[Average::Macro], false));
    println!();

    let top3: Vec<&str> = rank_models(&runs, TopK::Count(3))?
        .iter()
        .map(|r| r.model_id.as_str())
        .collect();
    println!("top 3 by weight: {top3:?}\n");

    let mut grid = Vec::new();
    for method in [Method::MajorityVoted, Method::Weighted] {
        for k in [TopK::Count(3), TopK::Count(5), TopK::All] {
            let (_, report) =
                run_ensemble(&runs, &dataset, &schema, &EnsembleConfig::new(method, k))?;
            grid.push((method, k, report));
        }
    }
    let rows: Vec<_> = grid.iter().map(|(m, k, r)| (*m, *k, r)).collect();
    print!("{}", ensemble_table(&rows, &[Average::Macro], false));
    Ok(())
}
