//! Result and summary writers: delimited machine-readable tables, a
//! Markdown summary, and plot-ready series for the four comparison panels.
//!
//! Machine-readable floats are written in scientific notation with ten
//! significant digits so downstream tooling can reparse them faithfully.

use std::io::Write;
use std::path::Path;

use crate::data::NegBudget;
use crate::experiment::{Method, RunRecord, Summary};

/// The four comparison panels: training-sample references, generated
/// references, mixed references, and the standard-method comparison.
pub const PANELS: [(&str, &[&str]); 4] = [
    ("fig_a_training_refs", &["grk1", "grk2", "grk3"]),
    ("fig_b_generated_refs", &["grk4", "grk5", "grk6"]),
    ("fig_c_mixed_refs", &["grk7", "grk8", "grk9"]),
    ("fig_d_standard_methods", &["ocsvm", "svm", "grk3", "grk7"]),
];

fn fmt(v: f64) -> String {
    format!("{v:.9e}")
}

fn write_file(path: &Path, content: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(content.as_bytes())
}

/// One row per successful cell:
/// `method,task,budget,repeat,s,param,tpr,tnr,gmean`
/// where `param` is nu for one-class methods and C for the binary SVM.
pub fn write_results_csv(path: &Path, records: &[RunRecord]) -> std::io::Result<()> {
    let mut out = String::from("method,task,budget,repeat,s,param,tpr,tnr,gmean\n");
    for rec in records {
        if let Ok(cell) = &rec.outcome {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                rec.method.as_str(),
                rec.task,
                rec.budget,
                rec.repeat,
                fmt(cell.s),
                fmt(cell.param),
                fmt(cell.eval.tpr),
                fmt(cell.eval.tnr),
                fmt(cell.eval.gmean),
            ));
        }
    }
    write_file(path, &out)
}

/// Failed and absent cells: `method,task,budget,repeat,reason`.
pub fn write_missing_csv(
    path: &Path,
    failures: &[(Method, String, NegBudget, u32, String)],
    absent: &[(Method, String, NegBudget, u32)],
) -> std::io::Result<()> {
    let mut out = String::from("method,task,budget,repeat,reason\n");
    for (method, task, budget, repeat, err) in failures {
        out.push_str(&format!(
            "{},{task},{budget},{repeat},{}\n",
            method.as_str(),
            err.replace(',', ";")
        ));
    }
    for (method, task, budget, repeat) in absent {
        out.push_str(&format!(
            "{},{task},{budget},{repeat},not run\n",
            method.as_str()
        ));
    }
    write_file(path, &out)
}

/// Per-task aggregates: `method,task,budget,repeats,mean_gmean,std_gmean`.
pub fn write_task_summary_csv(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let mut out = String::from("method,task,budget,repeats,mean_gmean,std_gmean\n");
    for agg in &summary.per_task {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            agg.method.as_str(),
            agg.task,
            agg.budget,
            agg.repeats,
            fmt(agg.mean_gmean),
            fmt(agg.std_gmean),
        ));
    }
    write_file(path, &out)
}

/// Grand means over tasks: `method,budget,tasks,mean_gmean,mean_std`.
pub fn write_grand_summary_csv(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let mut out = String::from("method,budget,tasks,mean_gmean,mean_std\n");
    for agg in &summary.grand {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            agg.method.as_str(),
            agg.budget,
            agg.tasks,
            fmt(agg.mean_gmean),
            fmt(agg.mean_std),
        ));
    }
    write_file(path, &out)
}

/// Human-readable tables, one per budget, tasks as rows and methods as
/// columns, with a grand-average row at the bottom.
pub fn write_markdown_summary(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let mut budgets: Vec<NegBudget> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    let mut tasks: Vec<String> = Vec::new();
    for agg in &summary.per_task {
        if !budgets.contains(&agg.budget) {
            budgets.push(agg.budget);
        }
        if !methods.contains(&agg.method) {
            methods.push(agg.method);
        }
        if !tasks.contains(&agg.task) {
            tasks.push(agg.task.clone());
        }
    }

    let mut out = String::from("# Average Gmean by task and method\n");
    for budget in budgets {
        out.push_str(&format!("\n## {budget} negative training samples\n\n"));
        out.push_str("| Task |");
        for m in &methods {
            out.push_str(&format!(" {} |", m.as_str()));
        }
        out.push('\n');
        out.push_str("|---|");
        out.push_str(&"---|".repeat(methods.len()));
        out.push('\n');
        for task in &tasks {
            out.push_str(&format!("| {task} |"));
            for m in &methods {
                let cell = summary
                    .per_task
                    .iter()
                    .find(|a| a.budget == budget && a.method == *m && a.task == *task);
                match cell {
                    Some(a) => out.push_str(&format!(" {:.1}±{:.1} |", a.mean_gmean, a.std_gmean)),
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out.push_str("| Aver. |");
        for m in &methods {
            let cell = summary
                .grand
                .iter()
                .find(|a| a.budget == budget && a.method == *m);
            match cell {
                Some(a) => out.push_str(&format!(" {:.1}±{:.1} |", a.mean_gmean, a.mean_std)),
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Plot-ready series per panel: `budget,method,mean_gmean`, one file per
/// panel, methods restricted to those present in the summary.
pub fn write_panel_series(dir: &Path, summary: &Summary) -> std::io::Result<()> {
    for (name, methods) in PANELS {
        let mut out = String::from("budget,method,mean_gmean\n");
        for agg in &summary.grand {
            if methods.contains(&agg.method.as_str().as_str()) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    agg.budget,
                    agg.method.as_str(),
                    fmt(agg.mean_gmean)
                ));
            }
        }
        write_file(&dir.join(format!("{name}.csv")), &out)?;
    }
    Ok(())
}
