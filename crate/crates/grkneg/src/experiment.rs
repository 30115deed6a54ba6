//! Hyperparameter cross-validation, Gmean scoring, and the experiment
//! matrix over (method x task x negative budget x repeat).
//!
//! Negative training samples never enter one-class training columns: for
//! `ocsvm` they only steer hyperparameter selection, and for `grk*` they
//! shape the kernel through the reference set. Cross-validation pools the
//! held-out predictions of all five folds before computing one Gmean per
//! grid point, which keeps tiny negative budgets (one negative per fold)
//! usable.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{self, derive_seed, make_split, Dataset, NegBudget, SplitData, TaskSpec};
use crate::grk::{build_reference_set, grk_test, grk_train, GrkError, GrkModel, ReferenceVariant};
use crate::kernel::rbf_kernel;
use crate::matrix::{Matrix, MatrixError};
use crate::svm::{decide, train_binary, train_oneclass, SolverConfig, SvmError, SvmModel};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("need at least {need} positive training samples, got {got}")]
    TooFewPositives { need: usize, got: usize },
    #[error("training samples are all identical (zero average pairwise distance)")]
    DegenerateSpread,
    #[error("{0}")]
    EmptyClass(String),
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error(transparent)]
    Data(#[from] data::DataError),
    #[error(transparent)]
    Grk(#[from] GrkError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The hyperparameter grids swept by cross-validation, iterated ascending.
#[derive(Debug, Clone)]
pub struct HyperGrid {
    pub s_values: Vec<f64>,
    pub nu_values: Vec<f64>,
    pub c_values: Vec<f64>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            s_values: vec![0.1, 1.0, 10.0, 100.0, 1000.0],
            nu_values: vec![0.05, 0.1, 0.15, 0.2],
            c_values: vec![1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3],
        }
    }
}

/// Classification rates plus the geometric mean on the 0..100 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub tpr: f64,
    pub tnr: f64,
    pub gmean: f64,
}

/// Gmean from confusion counts: `100 * sqrt(tpr * tnr)`.
pub fn gmean_from_counts(
    tp: usize,
    false_neg: usize,
    tn: usize,
    false_pos: usize,
) -> Result<EvalResult, ExperimentError> {
    let pos = tp + false_neg;
    let neg = tn + false_pos;
    if pos == 0 {
        return Err(ExperimentError::EmptyClass(
            "no positive samples to score".into(),
        ));
    }
    if neg == 0 {
        return Err(ExperimentError::EmptyClass(
            "no negative samples to score".into(),
        ));
    }
    let tpr = tp as f64 / pos as f64;
    let tnr = tn as f64 / neg as f64;
    Ok(EvalResult {
        tpr,
        tnr,
        gmean: 100.0 * (tpr * tnr).sqrt(),
    })
}

/// RBF bandwidth from the grid scale `s`: `sqrt(s * d_aver)` where `d_aver`
/// is the average squared distance over ordered pairs `i != j` of the
/// positive training columns.
pub fn sigma_from_s(train: &Matrix, s: f64) -> Result<f64, ExperimentError> {
    let p = train.cols();
    if p < 2 {
        return Err(ExperimentError::TooFewPositives { need: 2, got: p });
    }
    let cols = train.transpose();
    let mut total = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            let mut d2 = 0.0;
            for (a, b) in cols.row(i).iter().zip(cols.row(j).iter()) {
                let d = a - b;
                d2 += d * d;
            }
            total += d2;
        }
    }
    let d_aver = 2.0 * total / (p * (p - 1)) as f64;
    if d_aver <= 0.0 {
        return Err(ExperimentError::DegenerateSpread);
    }
    Ok((s * d_aver).sqrt())
}

/// One column of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    OcsvmRbf,
    Grk(ReferenceVariant),
    BinarySvm,
}

impl Method {
    pub fn as_str(self) -> String {
        match self {
            Method::OcsvmRbf => "ocsvm".into(),
            Method::BinarySvm => "svm".into(),
            Method::Grk(v) => format!("grk{}", v.index()),
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "ocsvm" => Some(Method::OcsvmRbf),
            "svm" => Some(Method::BinarySvm),
            _ => {
                let idx: u8 = s.strip_prefix("grk")?.parse().ok()?;
                ReferenceVariant::from_index(idx).map(Method::Grk)
            }
        }
    }

    /// One-class methods take nu; the binary SVM takes C.
    pub fn is_one_class(self) -> bool {
        !matches!(self, Method::BinarySvm)
    }
}

/// Everything needed to train and to score new points for one (method,
/// training set, s) combination.
#[derive(Debug, Clone)]
pub enum Machine {
    /// Plain RBF kernel over stored training columns; `labels` marks the
    /// binary case.
    Plain {
        cols: Matrix,
        sigma: f64,
        labels: Option<Vec<f64>>,
        train_kernel: Matrix,
    },
    /// Reference-kernel pipeline.
    Grk { model: GrkModel },
}

impl Machine {
    pub fn train_kernel(&self) -> &Matrix {
        match self {
            Machine::Plain { train_kernel, .. } => train_kernel,
            Machine::Grk { model } => &model.train_kernel,
        }
    }

    /// Kernel block between training columns and new points.
    pub fn cross_kernel(&self, x: &Matrix) -> Result<Matrix, ExperimentError> {
        match self {
            Machine::Plain { cols, sigma, .. } => Ok(rbf_kernel(cols, x, *sigma)?),
            Machine::Grk { model } => Ok(grk_test(model, x)?),
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            Machine::Plain { sigma, .. } => *sigma,
            Machine::Grk { model } => model.base_sigma,
        }
    }
}

/// Reference columns for GRK methods; `None` for plain-kernel methods.
/// Built once per training unit and reused across the whole `s` grid so
/// hyperparameters are compared on identical reference sets.
fn prepare_reference(
    method: Method,
    pos: &Matrix,
    neg: &Matrix,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Matrix>, ExperimentError> {
    match method {
        Method::Grk(v) => Ok(Some(build_reference_set(v, pos, neg, rng)?)),
        _ => Ok(None),
    }
}

fn build_machine(
    method: Method,
    pos: &Matrix,
    neg: &Matrix,
    reference: Option<&Matrix>,
    s: f64,
) -> Result<Machine, ExperimentError> {
    let sigma = sigma_from_s(pos, s)?;
    match method {
        Method::OcsvmRbf => {
            let train_kernel = rbf_kernel(pos, pos, sigma)?;
            Ok(Machine::Plain {
                cols: pos.clone(),
                sigma,
                labels: None,
                train_kernel,
            })
        }
        Method::BinarySvm => {
            let cols = Matrix::hconcat(&[pos, neg])?;
            let mut labels = vec![1.0; pos.cols()];
            labels.extend(std::iter::repeat_n(-1.0, neg.cols()));
            let train_kernel = rbf_kernel(&cols, &cols, sigma)?;
            Ok(Machine::Plain {
                cols,
                sigma,
                labels: Some(labels),
                train_kernel,
            })
        }
        Method::Grk(_) => {
            let model = grk_train(pos, reference.expect("reference prepared for GRK"), sigma)?;
            Ok(Machine::Grk { model })
        }
    }
}

fn train_on_machine(
    machine: &Machine,
    param: f64,
    cfg: &SolverConfig,
) -> Result<SvmModel, ExperimentError> {
    let labels = match machine {
        Machine::Plain { labels, .. } => labels.clone(),
        Machine::Grk { .. } => None,
    };
    let model = match labels {
        Some(labels) => train_binary(machine.train_kernel(), &labels, param, cfg)?.0,
        None => train_oneclass(machine.train_kernel(), param, cfg)?.0,
    };
    Ok(model)
}

/// A fully trained method for one training set and hyperparameter choice.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub machine: Machine,
    pub svm: SvmModel,
}

impl FittedModel {
    pub fn decision_values(&self, x: &Matrix) -> Result<Vec<f64>, ExperimentError> {
        Ok(decide(&self.svm, &self.machine.cross_kernel(x)?)?)
    }
}

/// Train `method` on the full training blocks with fixed hyperparameters.
pub fn fit_single(
    split: &SplitData,
    method: Method,
    s: f64,
    param: f64,
    reference_rng: &mut ChaCha8Rng,
    cfg: &SolverConfig,
) -> Result<FittedModel, ExperimentError> {
    let reference = prepare_reference(method, &split.pos_train, &split.neg_train, reference_rng)?;
    let machine = build_machine(
        method,
        &split.pos_train,
        &split.neg_train,
        reference.as_ref(),
        s,
    )?;
    let svm = train_on_machine(&machine, param, cfg)?;
    Ok(FittedModel { machine, svm })
}

/// The grid point selected by cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChosenParams {
    pub s: f64,
    /// nu for one-class methods, C for the binary SVM.
    pub param: f64,
    pub cv_gmean: f64,
}

struct Fold {
    pos_train: Matrix,
    neg_train: Matrix,
    heldout_pos: Matrix,
    heldout_neg: Matrix,
}

fn round_robin_folds(split: &SplitData, folds: usize) -> Vec<Fold> {
    let assign = |total: usize, k: usize| -> (Vec<usize>, Vec<usize>) {
        let mut held = Vec::new();
        let mut rest = Vec::new();
        for i in 0..total {
            if i % folds == k {
                held.push(i);
            } else {
                rest.push(i);
            }
        }
        (held, rest)
    };
    (0..folds)
        .map(|k| {
            let (pos_held, pos_rest) = assign(split.pos_train.cols(), k);
            let (neg_held, neg_rest) = assign(split.neg_train.cols(), k);
            Fold {
                pos_train: split.pos_train.select_columns(&pos_rest),
                neg_train: split.neg_train.select_columns(&neg_rest),
                heldout_pos: split.pos_train.select_columns(&pos_held),
                heldout_neg: split.neg_train.select_columns(&neg_held),
            }
        })
        .collect()
}

fn count_decisions(values: &[f64]) -> (usize, usize) {
    let hits = values.iter().filter(|v| **v >= 0.0).count();
    (hits, values.len() - hits)
}

/// 5-fold pooled cross-validation over the method's grid. Returns the
/// grid point with the best pooled Gmean; ties keep the earliest point in
/// (s ascending, then nu/C ascending) order.
pub fn cross_validate(
    split: &SplitData,
    method: Method,
    grid: &HyperGrid,
    fold_seed_parts: &[&str],
    cfg: &SolverConfig,
) -> Result<ChosenParams, ExperimentError> {
    const FOLDS: usize = 5;
    let p = split.pos_train.cols();
    if p < FOLDS {
        return Err(ExperimentError::TooFewPositives {
            need: FOLDS,
            got: p,
        });
    }
    let params = if method.is_one_class() {
        &grid.nu_values
    } else {
        &grid.c_values
    };
    if grid.s_values.is_empty() || params.is_empty() {
        return Err(ExperimentError::EmptyGrid);
    }

    let folds = round_robin_folds(split, FOLDS);
    let references: Vec<Option<Matrix>> = folds
        .iter()
        .enumerate()
        .map(|(k, fold)| {
            let mut parts: Vec<&str> = fold_seed_parts.to_vec();
            let tag = format!("fold{k}");
            parts.push(&tag);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&parts));
            prepare_reference(method, &fold.pos_train, &fold.neg_train, &mut rng)
        })
        .collect::<Result<_, _>>()?;

    let mut best: Option<ChosenParams> = None;
    for &s in &grid.s_values {
        let machines: Vec<Machine> = folds
            .iter()
            .zip(&references)
            .map(|(fold, reference)| {
                build_machine(
                    method,
                    &fold.pos_train,
                    &fold.neg_train,
                    reference.as_ref(),
                    s,
                )
            })
            .collect::<Result<_, _>>()?;
        for &param in params {
            let (mut tp, mut fne, mut tn, mut fp) = (0usize, 0usize, 0usize, 0usize);
            for (fold, machine) in folds.iter().zip(&machines) {
                let svm = train_on_machine(machine, param, cfg)?;
                let (pos_hit, pos_miss) =
                    count_decisions(&decide(&svm, &machine.cross_kernel(&fold.heldout_pos)?)?);
                let (neg_hit, neg_miss) =
                    count_decisions(&decide(&svm, &machine.cross_kernel(&fold.heldout_neg)?)?);
                tp += pos_hit;
                fne += pos_miss;
                fp += neg_hit;
                tn += neg_miss;
            }
            let eval = gmean_from_counts(tp, fne, tn, fp)?;
            if best.is_none_or(|b| eval.gmean > b.cv_gmean) {
                best = Some(ChosenParams {
                    s,
                    param,
                    cv_gmean: eval.gmean,
                });
            }
        }
    }
    Ok(best.expect("non-empty grid"))
}

/// Outcome of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub s: f64,
    pub param: f64,
    pub cv_gmean: f64,
    pub eval: EvalResult,
}

/// One record per (method, task, budget, repeat) cell; failures are carried
/// instead of crashing the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub task: String,
    pub budget: NegBudget,
    pub repeat: u32,
    pub outcome: Result<CellResult, String>,
}

/// Run one cell: split, cross-validate, retrain on the full training set,
/// and evaluate on the untouched test set.
pub fn run_cell(
    dataset: &Dataset,
    task: &TaskSpec,
    budget: NegBudget,
    repeat: u32,
    method: Method,
    grid: &HyperGrid,
    user_seed: u64,
) -> RunRecord {
    let outcome = run_cell_inner(dataset, task, budget, repeat, method, grid, user_seed)
        .map_err(|e| e.to_string());
    RunRecord {
        method,
        task: task.id.to_string(),
        budget,
        repeat,
        outcome,
    }
}

fn run_cell_inner(
    dataset: &Dataset,
    task: &TaskSpec,
    budget: NegBudget,
    repeat: u32,
    method: Method,
    grid: &HyperGrid,
    user_seed: u64,
) -> Result<CellResult, ExperimentError> {
    let target = dataset.class_index(task.target_class)?;
    let split = make_split(dataset, target, repeat, budget, user_seed)?;
    let cfg = SolverConfig::default();

    let method_name = method.as_str();
    let budget_name = budget.to_string();
    let repeat_name = repeat.to_string();
    let seed_name = user_seed.to_string();
    let parts: Vec<&str> = vec![
        "refgen",
        task.id,
        &method_name,
        &budget_name,
        &repeat_name,
        &seed_name,
    ];

    let chosen = cross_validate(&split, method, grid, &parts, &cfg)?;

    let mut final_parts = parts.clone();
    final_parts.push("final");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&final_parts));
    let fitted = fit_single(&split, method, chosen.s, chosen.param, &mut rng, &cfg)?;

    let (tp, fne) = count_decisions(&fitted.decision_values(&split.pos_test)?);
    let (fp, tn) = count_decisions(&fitted.decision_values(&split.neg_test)?);
    let eval = gmean_from_counts(tp, fne, tn, fp)?;
    Ok(CellResult {
        s: chosen.s,
        param: chosen.param,
        cv_gmean: chosen.cv_gmean,
        eval,
    })
}

/// A requested slice of the experiment matrix.
#[derive(Debug, Clone)]
pub struct MatrixRequest {
    pub tasks: Vec<&'static TaskSpec>,
    pub budgets: Vec<NegBudget>,
    pub methods: Vec<Method>,
    pub repeats: u32,
    pub user_seed: u64,
}

/// Run the requested cells, in parallel, in a fixed deterministic order:
/// tasks, then budgets, then methods, then repeats.
pub fn run_matrix(
    datasets: &BTreeMap<String, Dataset>,
    request: &MatrixRequest,
    grid: &HyperGrid,
    threads: Option<usize>,
) -> Vec<RunRecord> {
    let mut cells = Vec::new();
    for task in &request.tasks {
        for &budget in &request.budgets {
            for &method in &request.methods {
                for repeat in 0..request.repeats {
                    cells.push((*task, budget, method, repeat));
                }
            }
        }
    }

    let run_all = || {
        cells
            .par_iter()
            .map(|&(task, budget, method, repeat)| {
                let dataset = &datasets[task.dataset];
                run_cell(
                    dataset,
                    task,
                    budget,
                    repeat,
                    method,
                    grid,
                    request.user_seed,
                )
            })
            .collect()
    };

    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(run_all),
        None => run_all(),
    }
}

/// Load every bundled dataset a request needs.
pub fn load_datasets_for(
    data_dir: &Path,
    tasks: &[&'static TaskSpec],
) -> Result<BTreeMap<String, Dataset>, ExperimentError> {
    let mut map = BTreeMap::new();
    for task in tasks {
        if !map.contains_key(task.dataset) {
            let spec = data::dataset_spec(task.dataset).ok_or_else(|| {
                ExperimentError::EmptyClass(format!("unknown dataset {}", task.dataset))
            })?;
            map.insert(
                task.dataset.to_string(),
                data::load_bundled(data_dir, spec)?,
            );
        }
    }
    Ok(map)
}

/// Mean and std of Gmean over the repeats of one (method, task, budget).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskAggregate {
    pub method: Method,
    pub task: String,
    pub budget: NegBudget,
    pub mean_gmean: f64,
    pub std_gmean: f64,
    pub repeats: usize,
}

/// Grand average over tasks for one (method, budget): the mean of task
/// means, with the mean of task stds as the spread figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrandAggregate {
    pub method: Method,
    pub budget: NegBudget,
    pub mean_gmean: f64,
    pub mean_std: f64,
    pub tasks: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub per_task: Vec<TaskAggregate>,
    pub grand: Vec<GrandAggregate>,
    /// Failed cells: (method, task, budget, repeat, error).
    pub failures: Vec<(Method, String, NegBudget, u32, String)>,
}

/// Aggregate records into per-task and grand summaries. Groups follow the
/// record order of first appearance, so deterministic inputs give
/// deterministic tables.
pub fn aggregate(records: &[RunRecord]) -> Summary {
    let mut order: Vec<(Method, String, NegBudget)> = Vec::new();
    let mut by_cell: BTreeMap<(String, String, String), Vec<f64>> = BTreeMap::new();
    let mut failures = Vec::new();

    for rec in records {
        match &rec.outcome {
            Ok(cell) => {
                let key = (rec.method, rec.task.clone(), rec.budget);
                if !order.contains(&key) {
                    order.push(key.clone());
                }
                by_cell
                    .entry((
                        rec.method.as_str(),
                        rec.task.clone(),
                        rec.budget.to_string(),
                    ))
                    .or_default()
                    .push(cell.eval.gmean);
            }
            Err(err) => failures.push((
                rec.method,
                rec.task.clone(),
                rec.budget,
                rec.repeat,
                err.clone(),
            )),
        }
    }

    let mut per_task = Vec::new();
    for (method, task, budget) in &order {
        let values = &by_cell[&(method.as_str(), task.clone(), budget.to_string())];
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        per_task.push(TaskAggregate {
            method: *method,
            task: task.clone(),
            budget: *budget,
            mean_gmean: mean,
            std_gmean: std,
            repeats: n,
        });
    }

    let mut grand_order: Vec<(Method, NegBudget)> = Vec::new();
    for agg in &per_task {
        let key = (agg.method, agg.budget);
        if !grand_order.contains(&key) {
            grand_order.push(key);
        }
    }
    let grand = grand_order
        .into_iter()
        .map(|(method, budget)| {
            let group: Vec<&TaskAggregate> = per_task
                .iter()
                .filter(|a| a.method == method && a.budget == budget)
                .collect();
            let n = group.len();
            GrandAggregate {
                method,
                budget,
                mean_gmean: group.iter().map(|a| a.mean_gmean).sum::<f64>() / n as f64,
                mean_std: group.iter().map(|a| a.std_gmean).sum::<f64>() / n as f64,
                tasks: n,
            }
        })
        .collect();

    Summary {
        per_task,
        grand,
        failures,
    }
}

/// Cells requested but absent from `records` (e.g. lost to earlier partial
/// runs), as (method, task, budget, repeat).
pub fn missing_cells(
    records: &[RunRecord],
    request: &MatrixRequest,
) -> Vec<(Method, String, NegBudget, u32)> {
    let mut missing = Vec::new();
    for task in &request.tasks {
        for &budget in &request.budgets {
            for &method in &request.methods {
                for repeat in 0..request.repeats {
                    let found = records.iter().any(|r| {
                        r.method == method
                            && r.task == task.id
                            && r.budget == budget
                            && r.repeat == repeat
                    });
                    if !found {
                        missing.push((method, task.id.to_string(), budget, repeat));
                    }
                }
            }
        }
    }
    missing
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn cluster(center: &[f64], radius: f64, count: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(center.len(), count, |d, _| {
            center[d] + rng.gen_range(-radius..radius)
        })
        .unwrap()
    }

    fn separable_split() -> SplitData {
        let pos = cluster(&[0.0, 0.0], 1.0, 10, 1);
        let neg = cluster(&[20.0, 20.0], 1.0, 10, 2);
        SplitData {
            pos_train: pos.clone(),
            neg_train: neg.clone(),
            pos_test: cluster(&[0.0, 0.0], 1.0, 6, 3),
            neg_test: cluster(&[20.0, 20.0], 1.0, 6, 4),
            standardizer: crate::data::Standardizer {
                mean: vec![0.0, 0.0],
                std: vec![1.0, 1.0],
            },
        }
    }

    #[test]
    fn sigma_from_s_single_pair() {
        // two points at distance 2: d_aver = 4, s = 1 -> sigma = 2
        let m = Matrix::from_rows(&[&[0.0, 2.0]]).unwrap();
        assert!((sigma_from_s(&m, 1.0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_from_s_rejects_degenerate_inputs() {
        let single = Matrix::from_rows(&[&[1.0]]).unwrap();
        assert!(matches!(
            sigma_from_s(&single, 1.0),
            Err(ExperimentError::TooFewPositives { .. })
        ));
        let identical = Matrix::from_rows(&[&[3.0, 3.0, 3.0]]).unwrap();
        assert!(matches!(
            sigma_from_s(&identical, 1.0),
            Err(ExperimentError::DegenerateSpread)
        ));
    }

    #[test]
    fn sigma_from_s_matches_double_loop_oracle() {
        let pts = cluster(&[0.5, -1.0, 2.0], 2.0, 10, 9);
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..10 {
            for j in 0..10 {
                if i == j {
                    continue;
                }
                let mut d2 = 0.0;
                for d in 0..3 {
                    let diff = pts.get(d, i) - pts.get(d, j);
                    d2 += diff * diff;
                }
                total += d2;
                pairs += 1;
            }
        }
        let expect = (2.5 * total / pairs as f64).sqrt();
        assert!((sigma_from_s(&pts, 2.5).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn gmean_analytic_values() {
        assert_eq!(gmean_from_counts(10, 0, 8, 0).unwrap().gmean, 100.0);
        let r = gmean_from_counts(8, 2, 5, 5).unwrap();
        assert!((r.gmean - 100.0 * (0.8f64 * 0.5).sqrt()).abs() < 1e-9);
        assert!((r.gmean - 63.245553).abs() < 1e-3);
        assert_eq!(gmean_from_counts(0, 10, 8, 0).unwrap().gmean, 0.0);
        assert!(gmean_from_counts(0, 0, 1, 1).is_err());
        assert!(gmean_from_counts(1, 1, 0, 0).is_err());
    }

    #[test]
    fn gmean_symmetric_and_monotone() {
        let a = gmean_from_counts(6, 4, 3, 7).unwrap();
        let b = gmean_from_counts(3, 7, 6, 4).unwrap();
        assert!((a.gmean - b.gmean).abs() < 1e-12);
        let better_tpr = gmean_from_counts(7, 3, 3, 7).unwrap();
        assert!(better_tpr.gmean > a.gmean);
    }

    #[test]
    fn cv_single_grid_point_is_returned() {
        let split = separable_split();
        let grid = HyperGrid {
            s_values: vec![1.0],
            nu_values: vec![0.2],
            c_values: vec![1.0],
        };
        let chosen = cross_validate(
            &split,
            Method::OcsvmRbf,
            &grid,
            &["t"],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(chosen.s, 1.0);
        assert_eq!(chosen.param, 0.2);
    }

    #[test]
    fn cv_prefers_separating_grid_point() {
        let split = separable_split();
        // s = 1 separates the far clusters perfectly; s = 1e10 flattens the
        // kernel to all-ones and scores zero
        let grid = HyperGrid {
            s_values: vec![1.0, 1e10],
            nu_values: vec![0.2],
            c_values: vec![1.0],
        };
        let chosen = cross_validate(
            &split,
            Method::BinarySvm,
            &grid,
            &["t"],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(chosen.s, 1.0);
        assert_eq!(chosen.cv_gmean, 100.0);

        let chosen = cross_validate(
            &split,
            Method::Grk(ReferenceVariant::V7),
            &grid,
            &["t"],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(chosen.s, 1.0, "grk7 cv gmean {}", chosen.cv_gmean);
    }

    #[test]
    fn cv_tie_break_keeps_earliest_point() {
        let split = separable_split();
        // both s values separate perfectly -> earliest wins
        let grid = HyperGrid {
            s_values: vec![1.0, 2.0],
            nu_values: vec![0.2],
            c_values: vec![1.0],
        };
        let chosen = cross_validate(
            &split,
            Method::BinarySvm,
            &grid,
            &["t"],
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(chosen.cv_gmean, 100.0);
        assert_eq!(chosen.s, 1.0);
    }

    #[test]
    fn cv_requires_five_positives() {
        let mut split = separable_split();
        split.pos_train = split.pos_train.select_columns(&[0, 1, 2]);
        let err = cross_validate(
            &split,
            Method::OcsvmRbf,
            &HyperGrid::default(),
            &["t"],
            &SolverConfig::default(),
        );
        assert!(matches!(err, Err(ExperimentError::TooFewPositives { .. })));
    }

    #[test]
    fn aggregate_handles_single_and_synthetic_records() {
        let mk = |method: Method, task: &str, gmean: f64, repeat: u32| RunRecord {
            method,
            task: task.into(),
            budget: NegBudget::N5,
            repeat,
            outcome: Ok(CellResult {
                s: 1.0,
                param: 0.1,
                cv_gmean: gmean,
                eval: EvalResult {
                    tpr: 1.0,
                    tnr: 1.0,
                    gmean,
                },
            }),
        };
        let records = vec![
            mk(Method::OcsvmRbf, "A", 80.0, 0),
            mk(Method::OcsvmRbf, "A", 90.0, 1),
            mk(Method::OcsvmRbf, "B", 70.0, 0),
        ];
        let summary = aggregate(&records);
        assert_eq!(summary.per_task.len(), 2);
        let a = &summary.per_task[0];
        assert_eq!(a.task, "A");
        assert!((a.mean_gmean - 85.0).abs() < 1e-12);
        // sample std over {80, 90}
        assert!((a.std_gmean - 50.0f64.sqrt()).abs() < 1e-12);
        let b = &summary.per_task[1];
        assert_eq!(b.std_gmean, 0.0);
        assert_eq!(b.repeats, 1);

        let grand = &summary.grand[0];
        assert!((grand.mean_gmean - 77.5).abs() < 1e-12);
        assert_eq!(grand.tasks, 2);
    }

    #[test]
    fn aggregate_collects_failures() {
        let records = vec![RunRecord {
            method: Method::BinarySvm,
            task: "A".into(),
            budget: NegBudget::N5,
            repeat: 0,
            outcome: Err("solver blew up".into()),
        }];
        let summary = aggregate(&records);
        assert!(summary.per_task.is_empty());
        assert_eq!(summary.failures.len(), 1);
    }

    #[test]
    fn method_names_round_trip() {
        let methods = [
            Method::OcsvmRbf,
            Method::BinarySvm,
            Method::Grk(ReferenceVariant::V7),
        ];
        for m in methods {
            assert_eq!(Method::parse(&m.as_str()), Some(m));
        }
        assert_eq!(Method::parse("grk10"), None);
        assert_eq!(Method::parse("bogus"), None);
    }
}
