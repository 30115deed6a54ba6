//! End-to-end CLI tests: exit codes, model round trips, and reproducible
//! output files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grkneg"))
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn iris_csv() -> String {
    data_dir().join("iris.csv").display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn grkneg")
}

fn assert_exit(output: &Output, code: i32, context: &str) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "{context}: stdout={} stderr={}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn train_predict_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Setosa",
        "--method",
        "grk7",
        "--neg-budget",
        "5",
        "--repeat",
        "0",
        "--s",
        "1",
        "--nu",
        "0.1",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "train");
    assert!(model.exists());

    let preds = dir.path().join("preds.csv");
    let out = run(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--data",
        &iris_csv(),
        "--label-col",
        "last",
        "--out",
        preds.to_str().unwrap(),
    ]);
    assert_exit(&out, 0, "predict");
    let text = std::fs::read_to_string(&preds).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 151, "header plus one row per iris sample");
    assert_eq!(lines[0], "index,decision_value,label");
    assert!(lines[1].ends_with(",1") || lines[1].ends_with(",-1"));

    let out = run(&[
        "evaluate",
        "--model",
        model.to_str().unwrap(),
        "--data",
        &iris_csv(),
        "--label-col",
        "last",
    ]);
    assert_exit(&out, 0, "evaluate");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("gmean="), "evaluate output: {stdout}");
}

#[test]
fn fixed_seed_gives_byte_identical_models() {
    let dir = tempfile::tempdir().unwrap();
    let args_for = |name: &str, dir: &std::path::Path| -> Vec<String> {
        vec![
            "train".into(),
            "--data".into(),
            iris_csv(),
            "--target-class".into(),
            "Versicolor".into(),
            "--method".into(),
            "grk5".into(),
            "--neg-budget".into(),
            "10".into(),
            "--repeat".into(),
            "2".into(),
            "--seed".into(),
            "7".into(),
            "--auto-cv".into(),
            "--out".into(),
            dir.join(name).display().to_string(),
        ]
    };
    for name in ["a.json", "b.json"] {
        let out = bin().args(args_for(name, dir.path())).output().unwrap();
        assert_exit(&out, 0, "train with auto-cv");
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b, "same seed must produce byte-identical model files");
}

#[test]
fn usage_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json").display().to_string();

    // nu with the binary SVM
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Setosa",
        "--method",
        "svm",
        "--s",
        "1",
        "--nu",
        "0.1",
        "--out",
        &model,
    ]);
    assert_exit(&out, 2, "svm with --nu");

    // C with a one-class method
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Setosa",
        "--method",
        "grk7",
        "--s",
        "1",
        "--c",
        "1",
        "--out",
        &model,
    ]);
    assert_exit(&out, 2, "grk with --c");

    // unknown method
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Setosa",
        "--method",
        "grk12",
        "--auto-cv",
        "--out",
        &model,
    ]);
    assert_exit(&out, 2, "unknown method");

    // auto-cv combined with explicit hyperparameters
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Setosa",
        "--method",
        "ocsvm",
        "--auto-cv",
        "--s",
        "1",
        "--out",
        &model,
    ]);
    assert_exit(&out, 2, "auto-cv plus explicit s");

    // neither auto-cv nor full hyperparameters
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Setosa",
        "--method",
        "ocsvm",
        "--s",
        "1",
        "--out",
        &model,
    ]);
    assert_exit(&out, 2, "missing nu");

    // empty budget list on reproduce
    let out = run(&[
        "reproduce",
        "--data-dir",
        data_dir().to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
        "--methods",
        "ocsvm",
        "--budgets",
        "",
    ]);
    assert_exit(&out, 2, "empty budgets");

    // invalid budget token
    let out = run(&[
        "reproduce",
        "--data-dir",
        data_dir().to_str().unwrap(),
        "--out-dir",
        dir.path().join("out").to_str().unwrap(),
        "--methods",
        "ocsvm",
        "--budgets",
        "7",
    ]);
    assert_exit(&out, 2, "bad budget token");
}

#[test]
fn runtime_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json").display().to_string();

    // unreadable data file
    let out = run(&[
        "train",
        "--data",
        "/nonexistent/nope.csv",
        "--target-class",
        "Setosa",
        "--method",
        "ocsvm",
        "--auto-cv",
        "--out",
        &model,
    ]);
    assert_exit(&out, 1, "missing file");

    // unknown class in an otherwise valid file
    let out = run(&[
        "train",
        "--data",
        &iris_csv(),
        "--target-class",
        "Tulip",
        "--method",
        "ocsvm",
        "--auto-cv",
        "--out",
        &model,
    ]);
    assert_exit(&out, 1, "unknown class");
}

#[test]
fn reproduce_writes_stable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let run_into = |sub: &str| -> PathBuf {
        let out_dir = dir.path().join(sub);
        let out = run(&[
            "reproduce",
            "--data-dir",
            data_dir().to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--methods",
            "ocsvm",
            "--budgets",
            "5",
            "--repeats",
            "1",
            "--parallelism",
            "2",
        ]);
        assert_exit(&out, 0, "reproduce");
        out_dir
    };

    let first = run_into("a");
    let second = run_into("b");

    for file in [
        "results.csv",
        "missing.csv",
        "summary_tasks.csv",
        "summary_grand.csv",
        "summary.md",
        "fig_a_training_refs.csv",
        "fig_b_generated_refs.csv",
        "fig_c_mixed_refs.csv",
        "fig_d_standard_methods.csv",
    ] {
        let a = std::fs::read(first.join(file)).unwrap_or_else(|_| panic!("{file} missing"));
        let b = std::fs::read(second.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }

    let results = std::fs::read_to_string(first.join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines[0], "method,task,budget,repeat,s,param,tpr,tnr,gmean");
    assert_eq!(lines.len(), 15, "header plus one row per task");
    let missing = std::fs::read_to_string(first.join("missing.csv")).unwrap();
    assert_eq!(missing.lines().count(), 1, "no failures expected");
}
