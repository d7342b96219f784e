//! Aggregation and evaluation of per-model class-probability predictions for
//! multiclass text classification.
//!
//! - [`schema`]: label vocabulary and class order
//! - [`ingest`]: gold TSV datasets and JSON-lines prediction files
//! - [`metrics`]: confusion matrix, accuracy, precision/recall/F1 (micro, macro, weighted)
//! - [`ensemble`]: majority voting, accuracy-weighted soft voting, top-k selection
//! - [`simgen`]: seeded synthetic datasets and model predictions
//! - [`report`]: tables, JSON-lines records and run manifests
//! - [`cli`]: the `polarvote` command
//!
//! Runnable walkthroughs live in the crate's `examples/` directory:
//!
//! ```bash
//! cargo run -p polarvote --example weighted_vote
//! ```

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod schema;
pub mod simgen;

pub use ensemble::{
    majority_vote, rank_models, run_ensemble, weighted_vote, EnsembleConfig, EnsemblePrediction,
    Method, TieBreak, TopK,
};
pub use error::{Error, Result};
pub use ingest::{
    load_dataset, load_predictions, validate_bundle, Bundle, GoldDataset, ModelRun,
    PredictionMatrix,
};
pub use metrics::{confusion, evaluate, label_distribution, Average, ConfusionMatrix, EvalReport};
pub use schema::{parse_label, LabelId, LabelSchema};
pub use simgen::{generate, Correctness, ModelSpec, SimSpec};
