//! Command-line entry point: train and persist models, predict and evaluate
//! with them, reproduce the benchmark matrix, and list the bundled tasks.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grkneg::data::{
    derive_seed, load_csv, load_features, make_split, LabelColumn, NegBudget, BUNDLED_TASKS,
};
use grkneg::experiment::{
    aggregate, cross_validate, fit_single, gmean_from_counts, load_datasets_for, missing_cells,
    run_matrix, HyperGrid, MatrixRequest, Method,
};
use grkneg::model::TrainedModel;
use grkneg::report;
use grkneg::svm::SolverConfig;

#[derive(Parser)]
#[command(
    name = "grkneg",
    version,
    about = "One-class SVM toolkit with reference-vector kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model on one split of a labeled dataset and write a model file.
    Train(TrainArgs),
    /// Score new samples with a saved model.
    Predict(PredictArgs),
    /// Evaluate a saved model against a labeled file (Gmean, TPR, TNR).
    Evaluate(EvaluateArgs),
    /// Run the benchmark matrix over the bundled tasks and write result files.
    Reproduce(ReproduceArgs),
    /// List the bundled one-class tasks and their shapes.
    ListTasks(ListTasksArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled input file (delimited text, one label column).
    #[arg(long)]
    data: PathBuf,
    /// Label column: first, last, or a 0-based index.
    #[arg(long, default_value = "last")]
    label_col: String,
    /// Class treated as the positive class.
    #[arg(long)]
    target_class: String,
    /// ocsvm, svm, or grk1..grk9.
    #[arg(long)]
    method: String,
    /// Negative training budget: 5, 10, 20, 30, or all.
    #[arg(long, default_value = "all")]
    neg_budget: NegBudget,
    /// Which of the five train/test splits to use (0..4).
    #[arg(long, default_value_t = 0)]
    repeat: u32,
    /// Extra seed mixed into split and generation streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Select s and nu/C by 5-fold cross-validation.
    #[arg(long)]
    auto_cv: bool,
    /// Kernel scale factor (sigma = sqrt(s * d_aver)).
    #[arg(long)]
    s: Option<f64>,
    /// One-class nu (ocsvm and grk methods only).
    #[arg(long)]
    nu: Option<f64>,
    /// Binary SVM cost (svm only).
    #[arg(long)]
    c: Option<f64>,
    /// Output model file (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Dataset name recorded in the model file; defaults to the file stem.
    #[arg(long)]
    dataset_name: Option<String>,
}

#[derive(Args)]
struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Input file of samples to score.
    #[arg(long)]
    data: PathBuf,
    /// Label column to skip: none, first, last, or a 0-based index.
    #[arg(long, default_value = "none")]
    label_col: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Labeled input file.
    #[arg(long)]
    data: PathBuf,
    /// Label column: first, last, or a 0-based index.
    #[arg(long, default_value = "last")]
    label_col: String,
    /// Class counted as positive; defaults to the class the model was trained on.
    #[arg(long)]
    target_class: Option<String>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Directory holding the bundled datasets.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    /// Output directory for results, summaries, and plot series.
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated methods (ocsvm, svm, grk1..grk9).
    #[arg(
        long,
        default_value = "ocsvm,svm,grk1,grk2,grk3,grk4,grk5,grk6,grk7,grk8,grk9"
    )]
    methods: String,
    /// Comma-separated negative budgets out of 5,10,20,30,all.
    #[arg(long, default_value = "5,10,20,30,all")]
    budgets: String,
    /// Train/test splits per task.
    #[arg(long, default_value_t = 5)]
    repeats: u32,
    /// Extra seed mixed into every split and generation stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent cells; defaults to the core count.
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Args)]
struct ListTasksArgs {
    /// Directory holding the bundled datasets.
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
}

fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn parse_label_col(s: &str) -> LabelColumn {
    match s {
        "first" => LabelColumn::First,
        "last" => LabelColumn::Last,
        other => match other.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => usage_error(&format!(
                "invalid --label-col {other:?} (expected first, last, or an index)"
            )),
        },
    }
}

fn parse_method(s: &str) -> Method {
    Method::parse(s).unwrap_or_else(|| {
        usage_error(&format!(
            "invalid --method {s:?} (expected ocsvm, svm, or grk1..grk9)"
        ))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Reproduce(args) => cmd_reproduce(args),
        Command::ListTasks(args) => cmd_list_tasks(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

/// Seed-derivation parts shared by cross-validation and final training so a
/// cell is reproducible from its coordinates alone.
fn seed_parts(
    cell_id: &str,
    method: Method,
    budget: NegBudget,
    repeat: u32,
    seed: u64,
) -> Vec<String> {
    vec![
        "refgen".to_string(),
        cell_id.to_string(),
        method.as_str(),
        budget.to_string(),
        repeat.to_string(),
        seed.to_string(),
    ]
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let method = parse_method(&args.method);
    // hyperparameter flags must match the method family
    if args.auto_cv && (args.s.is_some() || args.nu.is_some() || args.c.is_some()) {
        usage_error("--auto-cv cannot be combined with --s/--nu/--c");
    }
    if method.is_one_class() && args.c.is_some() {
        usage_error(&format!(
            "--c is not valid for method {}; use --nu",
            args.method
        ));
    }
    if !method.is_one_class() && args.nu.is_some() {
        usage_error(&format!(
            "--nu is not valid for method {}; use --c",
            args.method
        ));
    }
    if !args.auto_cv {
        let missing = args.s.is_none()
            || (method.is_one_class() && args.nu.is_none())
            || (!method.is_one_class() && args.c.is_none());
        if missing {
            usage_error("provide --auto-cv, or --s together with --nu (one-class) or --c (svm)");
        }
    }

    let label_col = parse_label_col(&args.label_col);
    let name = args.dataset_name.clone().unwrap_or_else(|| {
        args.data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    let dataset = load_csv(&args.data, &name, label_col)?;
    let target = dataset.class_index(&args.target_class)?;
    let split = make_split(&dataset, target, args.repeat, args.neg_budget, args.seed)?;

    let cell_id = format!("{name}:{}", args.target_class);
    let parts = seed_parts(&cell_id, method, args.neg_budget, args.repeat, args.seed);
    let cfg = SolverConfig::default();

    let (s, param) = if args.auto_cv {
        let part_refs: Vec<&str> = parts.iter().map(String::as_str).collect();
        let chosen = cross_validate(&split, method, &HyperGrid::default(), &part_refs, &cfg)?;
        println!(
            "cross-validation chose s={} {}={} (pooled Gmean {:.1})",
            chosen.s,
            if method.is_one_class() { "nu" } else { "C" },
            chosen.param,
            chosen.cv_gmean
        );
        (chosen.s, chosen.param)
    } else {
        let param = if method.is_one_class() {
            args.nu.unwrap()
        } else {
            args.c.unwrap()
        };
        (args.s.unwrap(), param)
    };

    let mut final_parts = parts.clone();
    final_parts.push("final".to_string());
    let final_refs: Vec<&str> = final_parts.iter().map(String::as_str).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&final_refs));
    let fitted = fit_single(&split, method, s, param, &mut rng, &cfg)?;

    let model = TrainedModel::from_fitted(
        &fitted,
        &method.as_str(),
        &name,
        &args.target_class,
        &args.neg_budget.to_string(),
        args.repeat,
        args.seed,
        s,
        param,
        split.standardizer.clone(),
    );
    model.save(&args.out)?;
    println!(
        "trained {} on {} positives / {} negatives; model written to {}",
        method.as_str(),
        split.pos_train.cols(),
        split.neg_train.cols(),
        args.out.display()
    );
    Ok(())
}

fn load_prediction_features(path: &Path, label_col: &str) -> Result<grkneg::matrix::Matrix> {
    if label_col == "none" {
        Ok(load_features(path)?)
    } else {
        let col = parse_label_col(label_col);
        Ok(load_csv(path, "input", col)?.features)
    }
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let model = TrainedModel::load(&args.model)?;
    let features = load_prediction_features(&args.data, &args.label_col)?;
    let values = model.decision_values(&features)?;

    let mut out = String::from("index,decision_value,label\n");
    for (i, v) in values.iter().enumerate() {
        let label = if *v >= 0.0 { 1 } else { -1 };
        out.push_str(&format!("{i},{v:.9e},{label}\n"));
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{out}"),
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let model = TrainedModel::load(&args.model)?;
    let label_col = parse_label_col(&args.label_col);
    let dataset = load_csv(&args.data, "input", label_col)?;
    let target_name = args
        .target_class
        .clone()
        .unwrap_or_else(|| model.target_class.clone());
    let target = dataset.class_index(&target_name)?;

    let values = model.decision_values(&dataset.features)?;
    let (mut tp, mut fne, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for (v, &label) in values.iter().zip(&dataset.labels) {
        let positive = *v >= 0.0;
        match (label == target, positive) {
            (true, true) => tp += 1,
            (true, false) => fne += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
        }
    }
    let eval = gmean_from_counts(tp, fne, tn, fp)?;
    println!(
        "samples={} positives={} negatives={} tpr={:.6} tnr={:.6} gmean={:.3}",
        dataset.num_samples(),
        tp + fne,
        tn + fp,
        eval.tpr,
        eval.tnr,
        eval.gmean
    );
    Ok(())
}

fn parse_list<T, F: Fn(&str) -> T>(raw: &str, what: &str, parse: F) -> Vec<T> {
    let items: Vec<T> = raw
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse(t.trim()))
        .collect();
    if items.is_empty() {
        usage_error(&format!("--{what} must list at least one value"));
    }
    items
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<()> {
    let methods = parse_list(&args.methods, "methods", parse_method);
    let budgets = parse_list(&args.budgets, "budgets", |t| {
        t.parse::<NegBudget>().unwrap_or_else(|e| usage_error(&e))
    });
    if args.repeats == 0 || args.repeats > 5 {
        usage_error("--repeats must be between 1 and 5");
    }

    let tasks: Vec<_> = BUNDLED_TASKS.iter().collect();
    let datasets = load_datasets_for(&args.data_dir, &tasks)?;
    let request = MatrixRequest {
        tasks,
        budgets,
        methods,
        repeats: args.repeats,
        user_seed: args.seed,
    };

    let cells = request.tasks.len()
        * request.budgets.len()
        * request.methods.len()
        * request.repeats as usize;
    eprintln!(
        "running {cells} cells over {} tasks...",
        request.tasks.len()
    );
    let records = run_matrix(&datasets, &request, &HyperGrid::default(), args.parallelism);

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let summary = aggregate(&records);
    let absent = missing_cells(&records, &request);
    report::write_results_csv(&args.out_dir.join("results.csv"), &records)?;
    report::write_missing_csv(
        &args.out_dir.join("missing.csv"),
        &summary.failures,
        &absent,
    )?;
    report::write_task_summary_csv(&args.out_dir.join("summary_tasks.csv"), &summary)?;
    report::write_grand_summary_csv(&args.out_dir.join("summary_grand.csv"), &summary)?;
    report::write_markdown_summary(&args.out_dir.join("summary.md"), &summary)?;
    report::write_panel_series(&args.out_dir, &summary)?;

    println!("grand average Gmean per (method, budget):");
    for agg in &summary.grand {
        println!(
            "  {:>6} @ {:>3}: {:>5.1} +- {:.1}",
            agg.method.as_str(),
            agg.budget.to_string(),
            agg.mean_gmean,
            agg.mean_std
        );
    }
    if !summary.failures.is_empty() {
        println!("{} cells failed; see missing.csv", summary.failures.len());
    }
    println!("wrote results to {}", args.out_dir.display());
    Ok(())
}

fn cmd_list_tasks(args: ListTasksArgs) -> Result<()> {
    let tasks: Vec<_> = BUNDLED_TASKS.iter().collect();
    let datasets: BTreeMap<String, grkneg::data::Dataset> =
        load_datasets_for(&args.data_dir, &tasks)?;
    println!(
        "{:<7} {:<11} {:>4} {:>3} {:>6} {:<14} {:>4} {:>8}",
        "task", "dataset", "D", "C", "N_tot", "target", "P", "neg pool"
    );
    for task in tasks {
        let ds = &datasets[task.dataset];
        let target = ds.class_index(task.target_class).map_err(|e| anyhow!(e))?;
        let pos_total = ds.class_count(target);
        let p = (pos_total as f64 * 0.7).floor() as usize;
        let neg_pool: usize = (0..ds.num_classes())
            .filter(|&c| c != target)
            .map(|c| (ds.class_count(c) as f64 * 0.7).floor() as usize)
            .sum();
        println!(
            "{:<7} {:<11} {:>4} {:>3} {:>6} {:<14} {:>4} {:>8}",
            task.id,
            task.dataset,
            ds.dims(),
            ds.num_classes(),
            ds.num_samples(),
            task.target_class,
            p,
            neg_pool
        );
    }
    Ok(())
}
