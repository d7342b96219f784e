//! Scores one prediction vector against gold labels and prints every
//! averaging scheme plus the confusion matrix.

use polarvote::report::{detail_table, model_table};
use polarvote::{evaluate, Average, LabelId, LabelSchema};

fn main() -> polarvote::Result<()> {
    let schema = LabelSchema::default();
    let gold = [0, 0, 0, 0, 1, 1, 2, 2, 2, 2].map(LabelId);
    let pred = [0, 0, 2, 0, 1, 0, 2, 2, 1, 2].map(LabelId);

    let report = evaluate(&gold, &pred, &schema)?;
    print!(
        "{}",
        model_table(&[("toy-model", &report)], &Average::ALL, false)
    );
    println!();
    print!("{}", detail_table(&report, false));

    // micro F1 always equals accuracy for single-label data
    assert_eq!(report.micro.f1, report.accuracy);
    Ok(())
}
