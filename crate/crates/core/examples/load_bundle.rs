//! Writes a tiny gold file and two prediction files, loads them back and
//! validates the bundle.

use std::fs;

use polarvote::{load_dataset, load_predictions, validate_bundle, LabelSchema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("polarvote-load-bundle");
    fs::create_dir_all(&dir)?;
    let schema = LabelSchema::default();

    let gold = dir.join("gold.tsv");
    fs::write(&gold, "id\ttext\tlabel\nr1\tkhub valo laglo\tPositive\nr2\tonek kharap\tNegative\nr3\tthik ache\tNeutral\n")?;

    // label columns may come in any order; they are mapped onto the schema
    let a = dir.join("model-a.jsonl");
    fs::write(
        &a,
        r#"{"model_id":"model-a","weight":0.71,"labels":["Positive","Neutral","Negative"]}
{"id":"r1","probs":[0.8,0.1,0.1]}
{"id":"r2","probs":[0.1,0.2,0.7]}
{"id":"r3","probs":[0.3,0.4,0.3]}
"#,
    )?;
    let b = dir.join("model-b.jsonl");
    fs::write(
        &b,
        r#"{"model_id":"model-b","weight":0.64,"labels":["Negative","Neutral","Positive"]}
{"id":"r3","probs":[0.2,0.5,0.3]}
{"id":"r1","probs":[0.1,0.3,0.6]}
{"id":"r2","probs":[0.6,0.3,0.1]}
"#,
    )?;

    let dataset = load_dataset(&gold, &schema)?;
    let runs = vec![
        load_predictions(&a, &dataset, &schema)?,
        load_predictions(&b, &dataset, &schema)?,
    ];
    let bundle = validate_bundle(dataset, runs, &schema)?;
    println!(
        "{} samples, {} models",
        bundle.dataset.len(),
        bundle.runs.len()
    );
    for run in &bundle.runs {
        println!(
            "{} (weight {}): row r1 = {:?}",
            run.model_id,
            run.weight,
            run.predictions.row(0)
        );
    }

    // a file missing a sample is refused
    let short = dir.join("short.jsonl");
    fs::write(&short, "{\"model_id\":\"short\",\"weight\":0.5,\"labels\":[\"Negative\",\"Neutral\",\"Positive\"]}\n{\"id\":\"r1\",\"probs\":[1,0,0]}\n")?;
    let err = load_predictions(&short, &bundle.dataset, &schema).unwrap_err();
    println!("short.jsonl: {err}");
    Ok(())
}
