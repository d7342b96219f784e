//! Label distribution of a simulated split shaped like a skewed
//! three-class sentiment corpus.

use polarvote::report::distribution_table;
use polarvote::{generate, label_distribution, LabelSchema, ModelSpec, SimSpec};

fn main() -> polarvote::Result<()> {
    let schema = LabelSchema::default();
    let spec = SimSpec::new(
        35266,
        vec![0.4375, 0.1875, 0.375],
        vec![ModelSpec::new(1.0, 1.0)],
        7,
    );
    let (dataset, _) = generate(&spec)?;
    let counts = label_distribution(dataset.gold(), &schema)?;
    print!("{}", distribution_table(&counts, false));
    println!("total: {}", dataset.len());
    Ok(())
}
