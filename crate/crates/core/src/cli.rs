//! Command-line front end. Exit codes: 0 success, 1 validation or runtime
//! failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::ensemble::{ensemble_to_string, run_ensemble, EnsembleConfig, Method, TopK};
use crate::error::Error;
use crate::ingest::{
    load_dataset, load_predictions, validate_bundle, write_dataset, write_predictions, Bundle,
    GoldDataset, ModelRun,
};
use crate::metrics::{evaluate, label_distribution, Average};
use crate::report::{self, Record, RunManifest};
use crate::schema::LabelSchema;
use crate::simgen::{generate, Correctness, ModelSpec, SimSpec};

#[derive(Debug, Parser)]
#[command(
    name = "polarvote",
    version,
    about = "Evaluate and ensemble multiclass classifier predictions"
)]
pub struct Cli {
    /// Label schema file, one label per line. Defaults to Negative, Neutral, Positive.
    #[arg(long, global = true)]
    schema: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a dataset and prediction files load and line up.
    Validate(InputArgs),
    /// Gold label distribution.
    Stats(StatsArgs),
    /// Score each prediction file against the gold labels.
    Evaluate(EvaluateArgs),
    /// Combine prediction files by majority or weighted voting.
    Ensemble(EnsembleArgs),
    /// Write a synthetic dataset and prediction files.
    Simgen(SimgenArgs),
    /// Per-model table plus the method x top-k ensemble grid.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long = "pred", required = true)]
    preds: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Averaging scheme for precision, recall and F1.
    #[arg(long, value_enum, default_value = "all")]
    average: AverageArg,
    /// Print unrounded scores instead of 3 decimals.
    #[arg(long)]
    full_precision: bool,
    /// Also write line-delimited JSON records (manifest first) to this path.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum AverageArg {
    Micro,
    Macro,
    Weighted,
    All,
}

impl AverageArg {
    fn schemes(self) -> Vec<Average> {
        match self {
            AverageArg::Micro => vec![Average::Micro],
            AverageArg::Macro => vec![Average::Macro],
            AverageArg::Weighted => vec![Average::Weighted],
            AverageArg::All => Average::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    full_precision: bool,
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Print per-class scores and the confusion matrix for each model.
    #[arg(long)]
    detail: bool,
}

#[derive(Debug, Args)]
struct WeightArgs {
    /// Override a model's weight, as MODEL_ID=WEIGHT. Repeatable.
    #[arg(long = "weight", value_parser = parse_weight_override)]
    weights: Vec<(String, f64)>,
    /// Replace every weight with the model's accuracy on --dataset.
    #[arg(long)]
    weights_from_accuracy: bool,
}

#[derive(Debug, Args)]
struct EnsembleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    method: Method,
    /// Number of highest-weight models to combine, or `all`.
    #[arg(long, default_value = "all")]
    top_k: TopK,
    /// Write the ensemble prediction file here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SimgenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: usize,
    /// Comma-separated class priors in schema order. Defaults to uniform.
    #[arg(long, value_delimiter = ',')]
    priors: Option<Vec<f64>>,
    /// Model as ACCURACY,SHARPNESS. Repeatable.
    #[arg(long = "model", required = true, value_parser = parse_model_spec)]
    models: Vec<ModelSpec>,
    /// Hit each target accuracy exactly instead of sampling correctness.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Top-k values for the ensemble grid.
    #[arg(long, value_delimiter = ',', default_value = "3,5,all")]
    top_k: Vec<TopK>,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_weight_override(s: &str) -> Result<(String, f64), String> {
    let (id, w) = s.rsplit_once('=').ok_or("expected MODEL_ID=WEIGHT")?;
    let w: f64 = w.parse().map_err(|_| format!("bad weight {w:?}"))?;
    if id.is_empty() {
        return Err("empty model id".into());
    }
    Ok((id.to_string(), w))
}

fn parse_model_spec(s: &str) -> Result<ModelSpec, String> {
    let (acc, sharp) = s.split_once(',').ok_or("expected ACCURACY,SHARPNESS")?;
    let acc: f64 = acc
        .trim()
        .parse()
        .map_err(|_| format!("bad accuracy {acc:?}"))?;
    let sharp: f64 = sharp
        .trim()
        .parse()
        .map_err(|_| format!("bad sharpness {sharp:?}"))?;
    Ok(ModelSpec::new(acc, sharp))
}

/// A failure already rendered with file context.
#[derive(Debug)]
struct Failure(Vec<String>);

impl Failure {
    fn at(path: &Path, err: Error) -> Self {
        Failure(vec![format!("{}: {err}", path.display())])
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(vec![err.to_string()])
    }
}

type CmdResult = Result<(), Failure>;

struct Context {
    schema: LabelSchema,
    schema_path: Option<PathBuf>,
    argv: Vec<String>,
}

impl Context {
    fn manifest(
        &self,
        inputs: &[&Path],
        config: serde_json::Value,
    ) -> Result<RunManifest, Failure> {
        let mut paths: Vec<&Path> = self.schema_path.iter().map(PathBuf::as_path).collect();
        paths.extend(inputs);
        Ok(RunManifest::new(
            self.argv.clone(),
            &paths,
            self.schema.labels(),
            config,
        )?)
    }

    fn dataset(&self, path: &Path) -> Result<GoldDataset, Failure> {
        load_dataset(path, &self.schema).map_err(|e| Failure::at(path, e))
    }

    /// Loads everything, collecting one diagnostic per failing file.
    fn bundle(&self, input: &InputArgs) -> Result<Bundle, Failure> {
        let dataset = self.dataset(&input.dataset)?;
        let mut runs = Vec::new();
        let mut errors = Vec::new();
        for p in &input.preds {
            match load_predictions(p, &dataset, &self.schema) {
                Ok(r) => runs.push(r),
                Err(e) => errors.extend(Failure::at(p, e).0),
            }
        }
        if !errors.is_empty() {
            return Err(Failure(errors));
        }
        Ok(validate_bundle(dataset, runs, &self.schema)?)
    }
}

pub fn main() -> ExitCode {
    run(std::env::args_os())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let argv = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(messages)) => {
            for m in messages {
                eprintln!("error: {m}");
            }
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli, argv: Vec<String>) -> CmdResult {
    let schema = match &cli.schema {
        Some(p) => LabelSchema::from_file(p).map_err(|e| Failure::at(p, e))?,
        None => LabelSchema::default(),
    };
    let ctx = Context {
        schema,
        schema_path: cli.schema.clone(),
        argv,
    };
    match cli.command {
        Command::Validate(args) => cmd_validate(&ctx, &args),
        Command::Stats(args) => cmd_stats(&ctx, &args),
        Command::Evaluate(args) => cmd_evaluate(&ctx, &args),
        Command::Ensemble(args) => cmd_ensemble(&ctx, &args),
        Command::Simgen(args) => cmd_simgen(&ctx, &args),
        Command::Report(args) => cmd_report(&ctx, &args),
    }
}

fn input_paths(input: &InputArgs) -> Vec<&Path> {
    std::iter::once(input.dataset.as_path())
        .chain(input.preds.iter().map(PathBuf::as_path))
        .collect()
}

fn cmd_validate(ctx: &Context, args: &InputArgs) -> CmdResult {
    let bundle = ctx.bundle(args)?;
    println!(
        "ok: {} samples, {} classes, {} models",
        bundle.dataset.len(),
        ctx.schema.count(),
        bundle.runs.len()
    );
    for r in &bundle.runs {
        println!("  {}  weight {}", r.model_id, r.weight);
    }
    Ok(())
}

fn cmd_stats(ctx: &Context, args: &StatsArgs) -> CmdResult {
    let dataset = ctx.dataset(&args.dataset)?;
    let dist = label_distribution(dataset.gold(), &ctx.schema)?;
    let manifest = ctx.manifest(&[&args.dataset], json!({"command": "stats"}))?;
    print!("{}", report::distribution_table(&dist, args.full_precision));
    println!("total: {}", dataset.len());
    print!("{}", manifest.footer());
    if let Some(path) = &args.records {
        report::write_records(
            path,
            &[
                Record::Manifest(&manifest),
                Record::Distribution { labels: &dist },
            ],
        )?;
    }
    Ok(())
}

fn cmd_evaluate(ctx: &Context, args: &EvaluateArgs) -> CmdResult {
    let bundle = ctx.bundle(&args.input)?;
    let gold = bundle.dataset.gold();
    let reports = bundle
        .runs
        .iter()
        .map(|r| evaluate(gold, &r.predictions.argmax_labels(), &ctx.schema))
        .collect::<Result<Vec<_>, _>>()?;
    let manifest = ctx.manifest(
        &input_paths(&args.input),
        json!({"command": "evaluate", "average": format!("{:?}", args.output.average).to_lowercase()}),
    )?;

    let full = args.output.full_precision;
    let rows: Vec<(&str, _)> = bundle
        .runs
        .iter()
        .map(|r| r.model_id.as_str())
        .zip(&reports)
        .collect();
    print!(
        "{}",
        report::model_table(&rows, &args.output.average.schemes(), full)
    );
    if args.detail {
        for (name, r) in &rows {
            println!("\n{name}");
            print!("{}", report::detail_table(r, full));
        }
    }
    print!("{}", manifest.footer());

    if let Some(path) = &args.output.records {
        let mut records = vec![Record::Manifest(&manifest)];
        records.extend(
            rows.iter()
                .map(|(model, report)| Record::Model { model, report }),
        );
        report::write_records(path, &records)?;
    }
    Ok(())
}

fn apply_weights(bundle: &mut Bundle, args: &WeightArgs, schema: &LabelSchema) -> CmdResult {
    if args.weights_from_accuracy {
        for run in &mut bundle.runs {
            run.weight = evaluate(
                bundle.dataset.gold(),
                &run.predictions.argmax_labels(),
                schema,
            )?
            .accuracy;
        }
    }
    for (id, w) in &args.weights {
        let run: &mut ModelRun = bundle
            .runs
            .iter_mut()
            .find(|r| &r.model_id == id)
            .ok_or_else(|| Failure(vec![format!("--weight: no model {id:?}")]))?;
        if !(w.is_finite() && (0.0..=1.0).contains(w)) {
            return Err(Error::WeightOutOfRange(*w).into());
        }
        run.weight = *w;
    }
    Ok(())
}

fn weights_json(bundle: &Bundle) -> serde_json::Value {
    bundle
        .runs
        .iter()
        .map(|r| (r.model_id.clone(), json!(r.weight)))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn cmd_ensemble(ctx: &Context, args: &EnsembleArgs) -> CmdResult {
    let mut bundle = ctx.bundle(&args.input)?;
    apply_weights(&mut bundle, &args.weights, &ctx.schema)?;
    let config = EnsembleConfig::new(args.method, args.top_k);
    let (prediction, eval) = run_ensemble(&bundle.runs, &bundle.dataset, &ctx.schema, &config)?;
    let manifest = ctx.manifest(
        &input_paths(&args.input),
        json!({"command": "ensemble", "ensemble": config, "weights": weights_json(&bundle)}),
    )?;

    if let Some(out) = &args.out {
        let text = ensemble_to_string(&prediction, &bundle.dataset, &ctx.schema, &config)?;
        fs::write(out, text).map_err(|e| Error::io(out, e))?;
    }

    let full = args.output.full_precision;
    print!(
        "{}",
        report::ensemble_table(
            &[(config.method, config.top_k, &eval)],
            &args.output.average.schemes(),
            full
        )
    );
    println!("models: {}", prediction.contributing_models.join(", "));
    print!("{}", manifest.footer());

    if let Some(path) = &args.output.records {
        report::write_records(
            path,
            &[
                Record::Manifest(&manifest),
                Record::Ensemble {
                    method: config.method,
                    top_k: config.top_k,
                    contributing_models: &prediction.contributing_models,
                    report: &eval,
                },
            ],
        )?;
    }
    Ok(())
}

fn cmd_simgen(ctx: &Context, args: &SimgenArgs) -> CmdResult {
    let c = ctx.schema.count();
    let priors = args
        .priors
        .clone()
        .unwrap_or_else(|| vec![1.0 / c as f64; c]);
    if priors.len() != c {
        return Err(Error::BadSpec(format!("{} priors for {c} classes", priors.len())).into());
    }
    let correctness = if args.exact {
        Correctness::Exact
    } else {
        Correctness::Bernoulli
    };
    let spec =
        SimSpec::new(args.n, priors, args.models.clone(), args.seed).with_correctness(correctness);
    let (dataset, runs) = generate(&spec)?;

    fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let data_path = args.out_dir.join("dataset.tsv");
    write_dataset(&data_path, &dataset, &ctx.schema)?;
    let mut written = vec![data_path];
    for run in &runs {
        let path = args.out_dir.join(format!("{}.jsonl", run.model_id));
        write_predictions(&path, run, &dataset, &ctx.schema, Some(args.seed))?;
        written.push(path);
    }
    for (path, run) in written.iter().skip(1).zip(&runs) {
        println!("{}  accuracy {}", path.display(), run.weight);
    }
    println!(
        "{}  {} samples, seed {}",
        written[0].display(),
        dataset.len(),
        args.seed
    );
    Ok(())
}

fn cmd_report(ctx: &Context, args: &ReportArgs) -> CmdResult {
    let mut bundle = ctx.bundle(&args.input)?;
    apply_weights(&mut bundle, &args.weights, &ctx.schema)?;
    let gold = bundle.dataset.gold();
    let reports = bundle
        .runs
        .iter()
        .map(|r| evaluate(gold, &r.predictions.argmax_labels(), &ctx.schema))
        .collect::<Result<Vec<_>, _>>()?;

    let mut grid = Vec::new();
    for method in [Method::MajorityVoted, Method::Weighted] {
        for &k in &args.top_k {
            if let TopK::Count(k) = k {
                if k > bundle.runs.len() {
                    eprintln!("note: skipping top-{k}, only {} models", bundle.runs.len());
                    continue;
                }
            }
            let config = EnsembleConfig::new(method, k);
            let (prediction, eval) =
                run_ensemble(&bundle.runs, &bundle.dataset, &ctx.schema, &config)?;
            grid.push((config, prediction.contributing_models, eval));
        }
    }
    let manifest = ctx.manifest(
        &input_paths(&args.input),
        json!({
            "command": "report",
            "top_k": args.top_k.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "weights": weights_json(&bundle),
        }),
    )?;

    let full = args.output.full_precision;
    let averages = args.output.average.schemes();
    let rows: Vec<(&str, _)> = bundle
        .runs
        .iter()
        .map(|r| r.model_id.as_str())
        .zip(&reports)
        .collect();
    print!("{}", report::model_table(&rows, &averages, full));
    println!();
    let grid_rows: Vec<_> = grid
        .iter()
        .map(|(cfg, _, e)| (cfg.method, cfg.top_k, e))
        .collect();
    print!("{}", report::ensemble_table(&grid_rows, &averages, full));
    print!("{}", manifest.footer());

    if let Some(path) = &args.output.records {
        let mut records = vec![Record::Manifest(&manifest)];
        records.extend(
            rows.iter()
                .map(|(model, report)| Record::Model { model, report }),
        );
        records.extend(grid.iter().map(|(cfg, models, report)| Record::Ensemble {
            method: cfg.method,
            top_k: cfg.top_k,
            contributing_models: models,
            report,
        }));
        report::write_records(path, &records)?;
    }
    Ok(())
}
