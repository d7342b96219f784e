use std::fs;

use polarvote::ensemble::{ensemble_to_string, parse_ensemble};
use polarvote::ingest::{
    dataset_to_string, parse_dataset, parse_predictions, predictions_to_string,
};
use polarvote::{
    generate, load_dataset, load_predictions, run_ensemble, EnsembleConfig, LabelSchema, Method,
    ModelSpec, SimSpec, TopK,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dataset_and_predictions_round_trip(seed in any::<u64>(), n in 1usize..120, sharp in 1.0f64..6.0) {
        let schema = LabelSchema::default();
        let spec = SimSpec::new(n, vec![0.45, 0.2, 0.35], vec![ModelSpec::new(0.6, sharp), ModelSpec::new(0.8, 1.0)], seed);
        let (dataset, runs) = generate(&spec).unwrap();

        let text = dataset_to_string(&dataset, &schema).unwrap();
        let again = parse_dataset(&text, &schema).unwrap();
        prop_assert_eq!(&again, &dataset);
        prop_assert_eq!(dataset_to_string(&again, &schema).unwrap(), text);

        for run in &runs {
            let text = predictions_to_string(run, &dataset, &schema, Some(seed)).unwrap();
            let back = parse_predictions(&text, &dataset, &schema).unwrap();
            prop_assert_eq!(&back.model_id, &run.model_id);
            prop_assert_eq!(back.weight, run.weight);
            for (a, b) in back.predictions.rows().zip(run.predictions.rows()) {
                prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn files_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let schema = LabelSchema::default();
    let (dataset, runs) =
        generate(&SimSpec::uniform(50, 3, vec![ModelSpec::new(0.7, 2.0)], 4)).unwrap();
    let dpath = dir.path().join("d.tsv");
    let ppath = dir.path().join("p.jsonl");
    polarvote::ingest::write_dataset(&dpath, &dataset, &schema).unwrap();
    polarvote::ingest::write_predictions(&ppath, &runs[0], &dataset, &schema, None).unwrap();
    let d = load_dataset(&dpath, &schema).unwrap();
    let r = load_predictions(&ppath, &d, &schema).unwrap();
    assert_eq!(d, dataset);
    assert_eq!(
        r.predictions.argmax_labels(),
        runs[0].predictions.argmax_labels()
    );
}

#[test]
fn ensemble_file_round_trip() {
    let schema = LabelSchema::default();
    let (dataset, runs) = generate(&SimSpec::uniform(
        80,
        3,
        vec![ModelSpec::new(0.7, 1.0); 3],
        12,
    ))
    .unwrap();
    let config = EnsembleConfig::new(Method::Weighted, TopK::Count(2));
    let (pred, _) = run_ensemble(&runs, &dataset, &schema, &config).unwrap();
    let text = ensemble_to_string(&pred, &dataset, &schema, &config).unwrap();
    let (header, back) = parse_ensemble(&text, &dataset, &schema).unwrap();
    assert_eq!(header.method, Method::Weighted);
    assert_eq!(header.top_k, TopK::Count(2));
    assert_eq!(header.model_id, "ensemble-weighted-top2");
    assert_eq!(back, pred);
}

#[test]
fn custom_schema_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.txt");
    fs::write(&path, "Positive\nNegative\n").unwrap();
    let schema = LabelSchema::from_file(&path).unwrap();
    let d = parse_dataset("id\ttext\tlabel\na\tx\tnegative\n", &schema).unwrap();
    assert_eq!(d.gold()[0].0, 1);
}
